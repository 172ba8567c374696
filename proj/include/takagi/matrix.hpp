#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "takagi/rational.hpp"

namespace takagi {

// Polynomial with exact rational coefficients, ascending degree, leading
// coefficient nonzero (the zero polynomial has no coefficients).
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial constant(Rational v) { return Polynomial({std::move(v)}); }

    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Rational coeff(size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

    Rational eval(const Rational& x) const {
        Rational acc(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }
    double eval(double x) const {
        double acc = 0;
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i].to_double();
        return acc;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial();
        std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    Polynomial operator-() const { return Polynomial() - *this; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (size_t i = 0; i < a.c_.size(); ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    std::string to_string() const {
        if (c_.empty()) return "0";
        std::string out;
        for (size_t i = c_.size(); i-- > 0;) {
            if (c_[i].is_zero()) continue;
            if (!out.empty()) out += " + ";
            out += c_[i].to_string();
            if (i > 0) out += "*x^" + std::to_string(i);
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<Rational> c_;
};

inline constexpr unsigned kMaxMatrixDim = 64;

// Small dense matrix with exact rational entries.
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(unsigned dim) : dim_(dim), e_(dim * dim, Rational(0)) {
        if (dim == 0 || dim > kMaxMatrixDim) throw std::domain_error("matrix dimension out of range");
    }
    RationalMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
        dim_ = static_cast<unsigned>(rows.size());
        if (dim_ == 0 || dim_ > kMaxMatrixDim) throw std::domain_error("matrix dimension out of range");
        for (auto& r : rows) {
            if (r.size() != dim_) throw std::domain_error("matrix must be square");
            for (long long v : r) e_.emplace_back(v);
        }
    }

    static RationalMatrix identity(unsigned dim) {
        RationalMatrix m(dim);
        for (unsigned i = 0; i < dim; ++i) m.at(i, i) = Rational(1);
        return m;
    }

    unsigned dim() const { return dim_; }
    Rational& at(unsigned i, unsigned j) { return e_[i * dim_ + j]; }
    const Rational& at(unsigned i, unsigned j) const { return e_[i * dim_ + j]; }

    bool nonnegative() const {
        for (const auto& v : e_)
            if (v.sign() < 0) return false;
        return true;
    }

    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
        check_dims(a, b);
        RationalMatrix r(a.dim_);
        for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
        return r;
    }
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
        check_dims(a, b);
        RationalMatrix r(a.dim_);
        for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] - b.e_[i];
        return r;
    }
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
        check_dims(a, b);
        RationalMatrix r(a.dim_);
        for (unsigned i = 0; i < a.dim_; ++i)
            for (unsigned k = 0; k < a.dim_; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (unsigned j = 0; j < a.dim_; ++j)
                    r.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        return r;
    }
    friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a) {
        RationalMatrix r(a.dim_);
        for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = s * a.e_[i];
        return r;
    }
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.dim_ == b.dim_ && a.e_ == b.e_;
    }
    friend bool operator!=(const RationalMatrix& a, const RationalMatrix& b) { return !(a == b); }

    // Componentwise a <= b.
    friend bool dominated_by(const RationalMatrix& a, const RationalMatrix& b) {
        check_dims(a, b);
        for (size_t i = 0; i < a.e_.size(); ++i)
            if (a.e_[i] > b.e_[i]) return false;
        return true;
    }

    RationalMatrix pow(unsigned e) const {
        RationalMatrix r = identity(dim_), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    Rational trace() const {
        Rational t(0);
        for (unsigned i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    // Entry-sum norm ||T|| = sum |t_ij| (equals 1 T 1^t for nonnegative T).
    Rational entry_sum_norm() const {
        Rational t(0);
        for (const auto& v : e_) t += abs(v);
        return t;
    }

    std::vector<Rational> apply(const std::vector<Rational>& x) const {
        if (x.size() != dim_) throw std::domain_error("matrix-vector size mismatch");
        std::vector<Rational> y(dim_, Rational(0));
        for (unsigned i = 0; i < dim_; ++i)
            for (unsigned j = 0; j < dim_; ++j) y[i] += at(i, j) * x[j];
        return y;
    }
    std::vector<Rational> apply_left(const std::vector<Rational>& x) const {
        if (x.size() != dim_) throw std::domain_error("matrix-vector size mismatch");
        std::vector<Rational> y(dim_, Rational(0));
        for (unsigned j = 0; j < dim_; ++j)
            for (unsigned i = 0; i < dim_; ++i) y[j] += x[i] * at(i, j);
        return y;
    }

    std::string to_string() const {
        std::string out;
        for (unsigned i = 0; i < dim_; ++i) {
            for (unsigned j = 0; j < dim_; ++j) {
                if (j) out += ' ';
                out += at(i, j).to_string();
            }
            out += '\n';
        }
        return out;
    }

private:
    static void check_dims(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.dim_ != b.dim_) throw std::domain_error("matrix dimension mismatch");
    }

    unsigned dim_ = 0;
    std::vector<Rational> e_;
};

// Exact characteristic polynomial det(M - lambda I) by the Faddeev-LeVerrier
// recurrence (rational divisions by 1..d only).
inline Polynomial char_poly(const RationalMatrix& M) {
    unsigned d = M.dim();
    std::vector<Rational> c(d + 1, Rational(0));
    c[d] = Rational(1);
    RationalMatrix N = RationalMatrix::identity(d);
    for (unsigned k = 1; k <= d; ++k) {
        N = M * N;
        Rational ck = -(N.trace() / Rational(static_cast<long long>(k)));
        c[d - k] = ck;
        for (unsigned i = 0; i < d; ++i) N.at(i, i) += ck;
    }
    // Faddeev-LeVerrier yields det(lambda I - M); flip for odd dimension.
    if (d % 2 == 1)
        for (auto& v : c) v = -v;
    return Polynomial(std::move(c));
}

inline Polynomial derivative(const Polynomial& p) {
    if (p.degree() < 1) return Polynomial();
    std::vector<Rational> c(static_cast<size_t>(p.degree()));
    for (size_t i = 1; i <= c.size(); ++i)
        c[i - 1] = p.coeff(i) * Rational(static_cast<long long>(i));
    return Polynomial(std::move(c));
}

inline void poly_divmod(const Polynomial& a, const Polynomial& b, Polynomial& q, Polynomial& r) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem = a.coeffs();
    std::vector<Rational> quot;
    int db = b.degree();
    Rational lead = b.coeff(static_cast<size_t>(db));
    while (static_cast<int>(rem.size()) - 1 >= db) {
        while (!rem.empty() && rem.back().is_zero()) rem.pop_back();
        if (static_cast<int>(rem.size()) - 1 < db) break;
        size_t shift = rem.size() - 1 - static_cast<size_t>(db);
        Rational f = rem.back() / lead;
        if (quot.size() < shift + 1) quot.resize(shift + 1, Rational(0));
        quot[shift] += f;
        for (size_t i = 0; i <= static_cast<size_t>(db); ++i)
            rem[shift + i] -= f * b.coeff(i);
        rem.pop_back();
    }
    q = Polynomial(std::move(quot));
    r = Polynomial(std::move(rem));
}

inline Polynomial poly_gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        Polynomial q, r;
        poly_divmod(a, b, q, r);
        a = b;
        b = r;
    }
    if (!a.is_zero()) {
        Rational lead = a.coeff(static_cast<size_t>(a.degree()));
        std::vector<Rational> c = a.coeffs();
        for (auto& v : c) v = v / lead;
        a = Polynomial(std::move(c));
    }
    return a;
}

// p with repeated roots collapsed to simple ones.
inline Polynomial square_free_part(const Polynomial& p) {
    if (p.degree() < 1) return p;
    Polynomial g = poly_gcd(p, derivative(p));
    if (g.degree() < 1) return p;
    Polynomial q, r;
    poly_divmod(p, g, q, r);
    return q;
}

namespace detail {

// Horner value together with a running magnitude bound; the true value is
// within ~2*deg*eps*bound of the returned one.
inline void eval_with_bound(const Polynomial& p, double x, double& value, double& bound) {
    value = 0;
    bound = 0;
    double ax = std::abs(x);
    for (size_t i = p.coeffs().size(); i-- > 0;) {
        double c = p.coeffs()[i].to_double();
        value = value * x + c;
        bound = bound * ax + std::abs(c);
    }
}

// Exact sign of p(n/d) for d > 0 via the integer form of the polynomial:
// sign(sum C_i n^i d^(deg-i)) with C_i = c_i * lcm(denominators). Pure
// integer Horner, no gcd churn.
struct PolySignEvaluator {
    std::vector<BigInt> C;

    explicit PolySignEvaluator(const Polynomial& p) {
        BigInt lcm(1);
        for (const Rational& c : p.coeffs()) {
            BigInt g = gcd(lcm, c.den());
            lcm = lcm * (c.den() / g);
        }
        C.reserve(p.coeffs().size());
        for (const Rational& c : p.coeffs()) C.push_back(c.num() * (lcm / c.den()));
    }

    int sign_at(const BigInt& n, const BigInt& d) const {
        if (C.empty()) return 0;
        BigInt acc = C.back();
        BigInt dp(1);
        for (size_t i = C.size() - 1; i-- > 0;) {
            dp = dp * d;
            acc = acc * n + C[i] * dp;
        }
        return acc.sign();
    }
};

}  // namespace detail

// Largest real root of p in [0, hi] by exact-sign bisection on the
// square-free part. A double-precision march proposes the bracket; both
// bracket ends are re-verified with exact signs, and any mismatch falls back
// to a fully exact march.
inline double largest_root_bisect(const Polynomial& p, const Rational& hi, double tol) {
    Polynomial q = square_free_part(p);
    detail::PolySignEvaluator eval(q);
    // Work over x = n / (den_hi * kSteps * 2^j) so every sign test is an
    // integer Horner evaluation.
    const long long kSteps = 1024;
    BigInt hi_num = hi.num() * BigInt(kSteps);
    BigInt den = hi.den() * BigInt(kSteps);
    int sign_hi = eval.sign_at(hi_num, den);
    if (sign_hi == 0) return hi.to_double();

    BigInt a_num(0), b_num = hi_num;
    bool bracketed = false;
    double hid = hi.to_double();
    int candidate = -1;
    for (int i = 1; i <= kSteps; ++i) {
        double value, bound;
        detail::eval_with_bound(q, hid * static_cast<double>(kSteps - i) / kSteps, value, bound);
        double slack = bound * 1e-12 * static_cast<double>(q.degree() + 1);
        if (value * static_cast<double>(sign_hi) <= slack) { candidate = i; break; }
    }
    auto grid_num = [&](long long i) { return hi.num() * BigInt(kSteps - i); };
    if (candidate > 0) {
        int sa = eval.sign_at(grid_num(candidate), den);
        if (sa == 0) return hi.to_double() * static_cast<double>(kSteps - candidate) / kSteps;
        if (sa != sign_hi && eval.sign_at(grid_num(candidate - 1), den) == sign_hi) {
            a_num = grid_num(candidate);
            b_num = grid_num(candidate - 1);
            bracketed = true;
        }
    }
    if (!bracketed) {  // exact march, always correct
        for (int i = 1; i <= kSteps; ++i) {
            int s = eval.sign_at(grid_num(i), den);
            if (s == 0) return hi.to_double() * static_cast<double>(kSteps - i) / kSteps;
            if (s != sign_hi) {
                a_num = grid_num(i);
                b_num = grid_num(i - 1);
                bracketed = true;
                break;
            }
        }
    }
    if (!bracketed) return 0.0;  // only root at or below zero
    for (unsigned i = 0; i < 300; ++i) {
        BigInt mid = a_num + b_num;  // over denominator 2*den
        den = den.shifted_left(1);
        a_num = a_num.shifted_left(1);
        b_num = b_num.shifted_left(1);
        int s = eval.sign_at(mid, den);
        if (s == 0) {
            a_num = mid;
            b_num = mid;
            break;
        }
        if (s == sign_hi) b_num = mid; else a_num = mid;
        if ((b_num - a_num).to_double() / den.to_double() < tol) break;
    }
    double denom = den.to_double();
    return ((a_num.to_double() + b_num.to_double()) / 2.0) / denom;
}

// Collatz-Wielandt upper ratios tighten toward the Perron root under power
// iteration; the running minimum is always an upper bound for nonnegative
// matrices, so it serves as a convergent estimate even in reducible cases.
inline double power_iteration_radius(const std::vector<std::vector<double>>& m, double tol,
                                     unsigned max_iter = 200000) {
    size_t d = m.size();
    std::vector<double> x(d, 1.0), y(d);
    double best = HUGE_VAL;
    unsigned stall = 0;
    for (unsigned it = 0; it < max_iter; ++it) {
        double norm = 0;
        for (size_t i = 0; i < d; ++i) {
            double acc = 0;
            for (size_t j = 0; j < d; ++j) acc += m[i][j] * x[j];
            y[i] = acc;
            norm = std::max(norm, std::abs(acc));
        }
        if (norm == 0) return 0.0;
        double rmin = HUGE_VAL, rmax = 0;
        for (size_t i = 0; i < d; ++i) {
            if (x[i] > 0) {
                double r = y[i] / x[i];
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
            }
        }
        if (rmax < best - tol * 1e-2) { best = rmax; stall = 0; }
        else { best = std::min(best, rmax); ++stall; }
        if (rmax - rmin < tol || stall > 300) return best;
        for (size_t i = 0; i < d; ++i) x[i] = y[i] / norm;
    }
    return best;
}

// Spectral radius of a nonnegative rational matrix: bisection on the exact
// characteristic polynomial, cross-checked against power iteration.
inline double spectral_radius(const RationalMatrix& M, double tol = 1e-12) {
    if (tol <= 0) throw std::domain_error("spectral radius: tolerance must be positive");
    if (!M.nonnegative()) throw std::domain_error("spectral radius: negative entries");
    Rational max_row(0);
    for (unsigned i = 0; i < M.dim(); ++i) {
        Rational row(0);
        for (unsigned j = 0; j < M.dim(); ++j) row += M.at(i, j);
        if (row > max_row) max_row = row;
    }
    if (max_row.is_zero()) return 0.0;
    Polynomial p = char_poly(M);
    double rho = largest_root_bisect(p, max_row + Rational(1), tol / 4);
    std::vector<std::vector<double>> md(M.dim(), std::vector<double>(M.dim()));
    for (unsigned i = 0; i < M.dim(); ++i)
        for (unsigned j = 0; j < M.dim(); ++j) md[i][j] = M.at(i, j).to_double();
    double check = power_iteration_radius(md, std::max(tol, 1e-9));
    if (std::abs(check - rho) > 1e-6 * std::max(1.0, std::abs(rho)))
        throw std::runtime_error("spectral radius: bisection and power iteration disagree");
    return rho;
}

}  // namespace takagi
