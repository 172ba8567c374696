#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "takagi/matrix.hpp"

namespace takagi {

// ---------------------------------------------------------------------------
// Named matrices of the strip-counting recursions

// Type-transition matrices of the two-type extremal construction.
inline RationalMatrix matrix_A() { return {{2, 1, 0}, {2, 1, 0}, {0, 1, 0}}; }
inline RationalMatrix matrix_B() { return {{2, 1, 1}, {2, 1, 0}, {0, 0, 1}}; }
inline RationalMatrix matrix_M() { return matrix_B() * matrix_A(); }
inline RationalMatrix matrix_Mhat() { return {{6, 4}, {6, 3}}; }

// Domination matrices of the (c, sigma, m) strip recursion.
inline RationalMatrix matrix_E() { return {{2, 0, 1}, {2, 0, 2}, {2, 0, 1}}; }
inline RationalMatrix matrix_F() { return {{2, 1, 0}, {2, 1, 0}, {2, 0, 1}}; }
inline RationalMatrix matrix_G() { return matrix_F() * matrix_E(); }
inline RationalMatrix matrix_D() {
    RationalMatrix d(3);
    d.at(2, 2) = Rational(2);
    return d;
}

// alpha = (9 + sqrt(105)) / 2, the Perron root of Mhat and of FE.
inline double alpha_constant() { return (9.0 + std::sqrt(105.0)) / 2.0; }
// d_v* = log(alpha) / log(16).
inline double flexible_dimension_constant() { return std::log(alpha_constant()) / std::log(16.0); }
// d_0 = log((1+sqrt 5)/2) / log 4.
inline double golden_dimension_constant() {
    return std::log((1.0 + std::sqrt(5.0)) / 2.0) / std::log(4.0);
}

// ---------------------------------------------------------------------------
// Joint spectral radius bracket

struct JsrBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::string witness;      // product word attaining the lower bound
    unsigned witness_len = 0;
    unsigned max_len = 0;
    std::vector<double> upper_by_len;  // upper bound per product length 1..L
};

inline constexpr uint64_t kJsrEnumerationGuard = 10'000'000;

namespace detail {

// Products of length k are walked in base-|set| counter order; the witness
// is reported as the cyclic rotation that is lexicographically greatest,
// since rotations share the same spectral radius.
inline std::string canonical_rotation(const std::string& w) {
    std::string best = w;
    for (size_t i = 1; i < w.size(); ++i) {
        std::string rot = w.substr(i) + w.substr(0, i);
        if (rot > best) best = rot;
    }
    return best;
}

}  // namespace detail

// Bracket for the joint spectral radius of a finite set of nonnegative
// matrices: lower = max over products P of length k <= L of rho(P)^(1/k),
// upper = max over products of length exactly L of ||P||^(1/L) in the
// entry-sum norm.
inline JsrBracket jsr_bracket(const std::vector<RationalMatrix>& matrices,
                              unsigned max_len,
                              const std::vector<std::string>& names = {}) {
    if (matrices.empty() || max_len < 1) throw std::domain_error("jsr: need matrices and L >= 1");
    for (const auto& m : matrices)
        if (!m.nonnegative()) throw std::domain_error("jsr: negative entries");
    double guard = std::pow(static_cast<double>(matrices.size()), static_cast<double>(max_len));
    if (guard > static_cast<double>(kJsrEnumerationGuard))
        throw std::length_error("jsr: enumeration guard exceeded");

    std::vector<std::string> labels = names;
    if (labels.size() != matrices.size()) {
        labels.clear();
        for (size_t i = 0; i < matrices.size(); ++i) labels.push_back("M" + std::to_string(i));
    }

    JsrBracket out;
    out.max_len = max_len;
    std::vector<Rational> norm_max(max_len + 1, Rational(0));

    // Depth-first walk of the word tree; memory stays O(L) matrices.
    std::vector<RationalMatrix> stack{RationalMatrix::identity(matrices[0].dim())};
    std::string word;
    auto visit = [&](auto&& self, unsigned len) -> void {
        if (len > 0) {
            const RationalMatrix& p = stack.back();
            Rational norm = p.entry_sum_norm();
            if (norm > norm_max[len]) norm_max[len] = norm;
            double rho = spectral_radius(p, 1e-13);
            double root = std::pow(rho, 1.0 / static_cast<double>(len));
            if (root > out.lower + 1e-12) {
                out.lower = root;
                out.witness = detail::canonical_rotation(word);
                out.witness_len = len;
            }
        }
        if (len == max_len) return;
        for (size_t i = 0; i < matrices.size(); ++i) {
            stack.push_back(stack.back() * matrices[i]);
            word += labels[i];
            self(self, len + 1);
            word.pop_back();
            stack.pop_back();
        }
    };
    visit(visit, 0);

    for (unsigned len = 1; len <= max_len; ++len)
        out.upper_by_len.push_back(
            std::pow(norm_max[len].to_double(), 1.0 / static_cast<double>(len)));
    out.upper = out.upper_by_len.back();
    return out;
}

// ---------------------------------------------------------------------------
// Exact identities behind the joint-spectral-radius argument

struct IdentityCheck {
    std::string name;
    bool passed = false;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

inline std::vector<RationalMatrix> all_products(const std::vector<RationalMatrix>& gens,
                                                unsigned max_len) {
    std::vector<RationalMatrix> out{RationalMatrix::identity(gens[0].dim())};
    std::vector<RationalMatrix> current = out;
    for (unsigned len = 1; len <= max_len; ++len) {
        std::vector<RationalMatrix> next;
        for (const auto& p : current)
            for (const auto& g : gens) next.push_back(p * g);
        out.insert(out.end(), next.begin(), next.end());
        current = std::move(next);
    }
    return out;
}

}  // namespace detail

// Verifies, in exact rational arithmetic, the identities that reduce every
// {E,F} product to a power of FE:
//   (a) G^3 = 9 G^2 + 6 G for G = FE,
//   (b) F^2 E = 3 FE + D with d_33 = 2 the only nonzero entry of D,
//   (c) S_k = (FE)^{k+3} - F^2 E (FE)^k F^2 E is sparse with a >= b >= 0,
//       and matches 6G^{k+1} - 3G^{k+1}D - 3DG^{k+1} - DG^kD,
//   (d) E^2 M 1^t <= E F M 1^t for products M of length <= 6,
//   (e) the 1M / M1^t component orderings for products of length <= 8.
inline IdentityReport verify_jsr_identities() {
    IdentityReport report;
    auto add = [&report](const std::string& name, bool ok) {
        report.checks.push_back({name, ok});
        if (!ok) throw std::logic_error("matrix identity failed: " + name);
    };

    RationalMatrix E = matrix_E(), F = matrix_F(), G = matrix_G(), D = matrix_D();

    add("G^3 = 9G^2 + 6G",
        G.pow(3) == Rational(9) * G.pow(2) + Rational(6) * G);

    RationalMatrix FFE = F * F * E;
    add("F^2E = 3FE + D", FFE == Rational(3) * G + D);

    // G^k keeps the sparse shape [[a,0,b],[a,0,b],[c,0,d]]; S_k inherits
    // [[a,0,0],[a,0,0],[0,0,-b]] with a = 6 alpha_{k+1}, b = 6 delta_{k+1} + 4 delta_k.
    for (unsigned k = 0; k <= 10; ++k) {
        RationalMatrix Gk = G.pow(k), Gk1 = G.pow(k + 1);
        RationalMatrix S = G.pow(k + 3) - FFE * Gk * FFE;
        RationalMatrix S_expanded = Rational(6) * Gk1 - Rational(3) * (Gk1 * D) -
                                    Rational(3) * (D * Gk1) - D * Gk * D;
        bool ok = S == S_expanded;
        Rational a = S.at(0, 0), b = -S.at(2, 2);
        ok = ok && S.at(0, 1).is_zero() && S.at(0, 2).is_zero() && S.at(1, 1).is_zero() &&
             S.at(1, 2).is_zero() && S.at(2, 0).is_zero() && S.at(2, 1).is_zero() &&
             S.at(1, 0) == a;
        ok = ok && a >= b && b >= Rational(0);
        ok = ok && a == Rational(6) * Gk1.at(0, 0);
        ok = ok && b == Rational(6) * Gk1.at(2, 2) + Rational(4) * Gk.at(2, 2);
        add("S_" + std::to_string(k) + " sparse with a >= b >= 0", ok);
    }

    std::vector<Rational> ones{Rational(1), Rational(1), Rational(1)};
    {
        bool ok = true;
        for (const auto& M : detail::all_products({E, F}, 6)) {
            auto lhs = (E * E * M).apply(ones);
            auto rhs = (E * F * M).apply(ones);
            for (unsigned i = 0; i < 3; ++i) ok = ok && lhs[i] <= rhs[i];
        }
        add("E^2 M 1^t <= EF M 1^t (|M| <= 6)", ok);
    }
    {
        bool ok = true;
        for (const auto& M : detail::all_products({E, F}, 8)) {
            auto v = M.apply_left(ones);   // 1 M
            auto w = M.apply(ones);        // M 1^t
            ok = ok && v[0] >= v[1] && v[0] >= v[2];
            ok = ok && w[0] >= w[2] && w[1] >= w[2];
        }
        add("1M and M1^t component order (|M| <= 8)", ok);
    }
    return report;
}

// ---------------------------------------------------------------------------
// The tridiagonal family A_k of the Model-1 zero-set bound

// A_k is (k+1)x(k+1): rows (1, 1/4, 0...), (2, 3/4, 1/4, 0...), interior
// (1/4, 1/2, 1/4), last (..., 1/4, 1). The display pins the second row only
// for k >= 2, so the full matrix needs k >= 2.
inline RationalMatrix a_k_full(unsigned k) {
    if (k < 2) throw std::domain_error("A_k: need k >= 2");
    RationalMatrix m(k + 1);
    m.at(0, 0) = Rational(1);
    m.at(0, 1) = Rational(1, 4);
    m.at(1, 0) = Rational(2);
    m.at(1, 1) = Rational(3, 4);
    m.at(1, 2) = Rational(1, 4);
    for (unsigned i = 2; i < k; ++i) {
        m.at(i, i - 1) = Rational(1, 4);
        m.at(i, i) = Rational(1, 2);
        m.at(i, i + 1) = Rational(1, 4);
    }
    m.at(k, k - 1) = Rational(1, 4);
    m.at(k, k) = Rational(1);
    return m;
}

// The truncation deleting the last row and column; ~A_1 = [1] and
// ~A_2 = [[1,1/4],[2,3/4]] by definition.
inline RationalMatrix a_k_truncated(unsigned k) {
    if (k < 1) throw std::domain_error("~A_k: need k >= 1");
    if (k == 1) {
        RationalMatrix m(1);
        m.at(0, 0) = Rational(1);
        return m;
    }
    RationalMatrix full = a_k_full(k);
    RationalMatrix m(k);
    for (unsigned i = 0; i < k; ++i)
        for (unsigned j = 0; j < k; ++j) m.at(i, j) = full.at(i, j);
    return m;
}

struct ZetaXi {
    Polynomial zeta;  // char poly of ~A_k (det convention A - lambda I)
    Polynomial xi;    // char poly of A_k
};

// zeta_1 = 1 - lambda, zeta_2 = lambda^2 - (7/4) lambda + 1/4,
// zeta_k = (1/2 - lambda) zeta_{k-1} - (1/16) zeta_{k-2},
// xi_k = (1 - lambda) zeta_k - (1/16) zeta_{k-1}.
inline ZetaXi zeta_xi(unsigned k) {
    if (k < 2) throw std::domain_error("zeta/xi recursion: need k >= 2");
    Polynomial z1({Rational(1), Rational(-1)});
    Polynomial z2({Rational(1, 4), Rational(-7, 4), Rational(1)});
    Polynomial prev = z1, cur = z2;
    Polynomial step({Rational(1, 2), Rational(-1)});
    Rational sixteenth(1, 16);
    for (unsigned i = 3; i <= k; ++i) {
        Polynomial next = step * cur - Polynomial::constant(sixteenth) * prev;
        prev = cur;
        cur = next;
    }
    ZetaXi out;
    out.zeta = cur;
    Polynomial one_minus({Rational(1), Rational(-1)});
    out.xi = one_minus * cur - Polynomial::constant(sixteenth) * prev;
    return out;
}

// Evaluates zeta_k and xi_k numerically by running the recursion at a fixed
// argument; stable for the lambda range of interest, any k.
inline double xi_eval(unsigned k, double lambda) {
    if (k < 2) throw std::domain_error("xi: need k >= 2");
    double prev = 1.0 - lambda;
    double cur = lambda * lambda - 1.75 * lambda + 0.25;
    for (unsigned i = 3; i <= k; ++i) {
        double next = (0.5 - lambda) * cur - prev / 16.0;
        prev = cur;
        cur = next;
    }
    return (1.0 - lambda) * cur - prev / 16.0;
}

struct RhoScan {
    std::vector<unsigned> k_values;
    std::vector<double> rho;          // Perron root of A_k
    double min_rho = HUGE_VAL;
    unsigned argmin_k = 0;
    double golden_gap = 0.0;          // min_rho - (1+sqrt 5)/2
};

// rho_k for 3 <= k <= k_max via power iteration on the tridiagonal A_k,
// refined by bisection on xi_k.
inline RhoScan rho_k_limit_scan(unsigned k_max) {
    if (k_max < 3) throw std::domain_error("rho scan: need k_max >= 3");
    RhoScan out;
    for (unsigned k = 3; k <= k_max; ++k) {
        std::vector<std::vector<double>> m(k + 1, std::vector<double>(k + 1, 0.0));
        m[0][0] = 1.0; m[0][1] = 0.25;
        m[1][0] = 2.0; m[1][1] = 0.75; m[1][2] = 0.25;
        for (unsigned i = 2; i < k; ++i) {
            m[i][i - 1] = 0.25; m[i][i] = 0.5; m[i][i + 1] = 0.25;
        }
        m[k][k - 1] = 0.25; m[k][k] = 1.0;
        double rho = power_iteration_radius(m, 1e-11);
        // Polish on xi_k: bisect the sign change in a small window.
        double lo = rho - 1e-6, hi = rho + 1e-6;
        double flo = xi_eval(k, lo), fhi = xi_eval(k, hi);
        if (flo * fhi < 0) {
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = xi_eval(k, mid);
                if (fm == 0) { lo = hi = mid; break; }
                if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
                else { hi = mid; fhi = fm; }
            }
            rho = 0.5 * (lo + hi);
        }
        out.k_values.push_back(k);
        out.rho.push_back(rho);
        if (rho < out.min_rho) { out.min_rho = rho; out.argmin_k = k; }
    }
    out.golden_gap = out.min_rho - (1.0 + std::sqrt(5.0)) / 2.0;
    return out;
}

// ---------------------------------------------------------------------------
// Moran-type dimension equations

struct MoranPiece {
    uint64_t count;
    Rational ratio;  // contraction ratio in (0,1)
};

// Unique s >= 0 with sum count_i ratio_i^s = 1, by bisection on the strictly
// decreasing left-hand side.
inline double moran_dimension(const std::vector<MoranPiece>& pieces, double tol = 1e-14) {
    if (pieces.empty()) throw std::domain_error("moran: no pieces");
    for (const auto& p : pieces) {
        if (p.count == 0) throw std::domain_error("moran: zero count");
        if (p.ratio.sign() <= 0 || p.ratio >= Rational(1))
            throw std::domain_error("moran: ratio must be in (0,1)");
    }
    auto lhs = [&pieces](double s) {
        double acc = 0;
        for (const auto& p : pieces)
            acc += static_cast<double>(p.count) * std::pow(p.ratio.to_double(), s);
        return acc;
    };
    if (lhs(0.0) <= 1.0 + 1e-15) {
        if (pieces.size() == 1 && pieces[0].count == 1) return 0.0;
        if (std::abs(lhs(0.0) - 1.0) < 1e-12) return 0.0;
        throw std::domain_error("moran: no root with s >= 0");
    }
    double lo = 0.0, hi = 10.0;
    if (lhs(hi) > 1.0) throw std::domain_error("moran: no root in [0, 10]");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (lhs(mid) > 1.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Zero-set equation of the Gray Takagi function: the copies scale by
// 4^-(2m-1), m >= 1, so with t = 4^-s the equation is t/(1-t^2) = 1.
inline double gray_zero_moran_dimension(double tol = 1e-14) {
    double lo = 0.0, hi = 1.0;
    auto lhs = [](double s) {
        double t = std::pow(4.0, -s);
        return t / (1.0 - t * t);
    };
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (lhs(mid) > 1.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Hitting-time pgf of the symmetric simple random walk.
inline double psi1(double x) { return (1.0 - std::sqrt(1.0 - x * x)) / x; }

struct RandomMoranSolution {
    double r = 0.0;          // contraction-pgf root in (0,1)
    double dimension = 0.0;  // s = -log2 r
};

// Solves 2 r psi1(r) + psi1(r)^2 = 1 for r in (0,1); the closed form is
// r^2 = (sqrt 5 - 1)/2, hence s = d_0.
inline RandomMoranSolution random_moran_dimension(double tol = 1e-14) {
    auto lhs = [](double r) { return 2.0 * r * psi1(r) + psi1(r) * psi1(r); };
    double lo = 1e-9, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (lhs(mid) < 1.0) lo = mid; else hi = mid;
        if (hi - lo < tol) break;
    }
    RandomMoranSolution out;
    out.r = 0.5 * (lo + hi);
    out.dimension = -std::log2(out.r);
    return out;
}

}  // namespace takagi
