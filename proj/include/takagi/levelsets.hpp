#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "takagi/piecewise.hpp"
#include "takagi/rational.hpp"
#include "takagi/signs.hpp"

namespace takagi {

// Counts for one horizontal strip J_{n,k} = [2k/4^n, (2k+2)/4^n] against the
// graph of f_{2n}: n0 = #{flat cells at exactly the strip floor}, n1 =
// #{cells whose segment enters the open strip interior}.
struct StripCounts {
    unsigned stage = 0;
    int64_t k = 0;
    uint64_t n0 = 0;
    uint64_t n1 = 0;
};

namespace detail {

// Decides, on exact integers, whether a segment attains a value strictly
// inside (2k, 2k+2) at the even-depth scale. Values at even depth are even,
// so a flat segment can only sit on a strip boundary and never counts.
inline bool segment_in_strip_interior(int64_t va, int64_t vb, int64_t k) {
    int64_t lo = std::min(va, vb), hi = std::max(va, vb);
    if (!(lo < 2 * k + 2 && hi > 2 * k)) return false;
    if (va == vb && (va == 2 * k || va == 2 * k + 2)) return false;
    return true;
}

}  // namespace detail

inline StripCounts strip_counts(const GridFunction& gf, int64_t k) {
    if (gf.depth() % 2 != 0) throw std::domain_error("strip counts need an even depth");
    StripCounts out;
    out.stage = gf.depth() / 2;
    out.k = k;
    for (uint64_t j = 0; j < gf.cell_count(); ++j) {
        int64_t va = gf.value(j), vb = gf.value(j + 1);
        if (va == vb && va == 2 * k) ++out.n0;
        if (detail::segment_in_strip_interior(va, vb, k)) ++out.n1;
    }
    return out;
}

struct MaxCounts {
    uint64_t m0 = 0;      // max_k N0_{n,k}
    uint64_t m1 = 0;      // max_k N1_{n,k}
    uint64_t bound = 0;   // 2*m0 + 3*m1, the cover bound on M_n
};

inline MaxCounts max_counts(const GridFunction& gf) {
    if (gf.depth() % 2 != 0) throw std::domain_error("strip counts need an even depth");
    std::map<int64_t, uint64_t> flat;
    std::map<int64_t, int64_t> sloped_diff;  // difference array over k
    for (uint64_t j = 0; j < gf.cell_count(); ++j) {
        int64_t va = gf.value(j), vb = gf.value(j + 1);
        if (va == vb) {
            ++flat[va / 2];  // even depth: values are even
            continue;
        }
        // A sloped segment enters the interior of strip k exactly for
        // k in [min/2, max/2 - 1] (endpoints even).
        int64_t lo = std::min(va, vb), hi = std::max(va, vb);
        ++sloped_diff[lo / 2];
        --sloped_diff[hi / 2];
    }
    MaxCounts out;
    for (auto& [k, c] : flat) out.m0 = std::max(out.m0, c);
    int64_t run = 0;
    for (auto& [k, d] : sloped_diff) {
        run += d;
        out.m1 = std::max<uint64_t>(out.m1, static_cast<uint64_t>(run));
    }
    out.bound = 2 * out.m0 + 3 * out.m1;
    return out;
}

// ---------------------------------------------------------------------------
// Level-set covers

// One tracked dyadic cell: endpoint values of f_n scaled by 2^n.
struct TrackedCell {
    uint64_t j;
    int64_t vlo;
    int64_t vhi;
};

struct CoverReport {
    std::vector<unsigned> depths;
    std::vector<uint64_t> counts;
    std::vector<TrackedCell> final_cells;
    unsigned final_depth = 0;
    double fitted_dimension = 0.0;
    double residual = 0.0;
};

struct DimensionFit {
    double dimension = 0.0;
    double residual = 0.0;
};

// Least-squares slope of log2(count) against depth (cells have width 2^-n).
// A zero count anywhere signals an empty level set.
inline DimensionFit fit_dimension(const std::vector<unsigned>& depths,
                                  const std::vector<uint64_t>& counts) {
    if (depths.size() != counts.size() || depths.size() < 4)
        throw std::domain_error("dimension fit needs at least 4 depths");
    for (uint64_t c : counts)
        if (c == 0) throw std::domain_error("dimension fit: empty level set");
    double n = static_cast<double>(depths.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < depths.size(); ++i) {
        double x = depths[i], y = std::log2(static_cast<double>(counts[i]));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    DimensionFit fit;
    fit.dimension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - fit.dimension * sx) / n;
    double ss = 0;
    for (size_t i = 0; i < depths.size(); ++i) {
        double e = std::log2(static_cast<double>(counts[i])) - (icpt + fit.dimension * depths[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

// The first depths of a cover are transient; they are dropped from the fit.
inline constexpr unsigned kFitTransientDepths = 4;

inline void finish_report(CoverReport& report) {
    std::vector<unsigned> ds;
    std::vector<uint64_t> cs;
    for (size_t i = 0; i < report.depths.size(); ++i) {
        if (report.depths[i] <= kFitTransientDepths) continue;
        if (report.counts[i] == 0) return;  // empty: leave fit at zero
        ds.push_back(report.depths[i]);
        cs.push_back(report.counts[i]);
    }
    if (ds.size() < 4) return;
    DimensionFit fit = fit_dimension(ds, cs);
    report.fitted_dimension = fit.dimension;
    report.residual = fit.residual;
}

namespace detail {

// y*2^n compared against an integer bound, exactly. Depths and denominators
// are capped so the cross products stay inside __int128.
struct ScaledLevel {
    __int128 num;
    __int128 den;

    ScaledLevel(const Rational& y, unsigned depth) {
        if (!y.num().fits_int64() || !y.den().fits_int64() || depth > 60)
            throw std::domain_error("cover level: rational level too large for depth");
        num = static_cast<__int128>(y.num().to_int64()) << depth;
        den = static_cast<__int128>(y.den().to_int64());
    }
    bool at_least(int64_t bound) const { return num >= static_cast<__int128>(bound) * den; }
    bool at_most(int64_t bound) const { return num <= static_cast<__int128>(bound) * den; }
};

}  // namespace detail

// Covers larger than this trip the resource guard; level sets of maximal
// dimension stay below it for depths up to ~29.
inline constexpr uint64_t kMaxCoverCells = uint64_t{1} << 24;

// Cells of depth n whose envelope [min f_n - 2^-n, max f_n + 2^-n] still
// contains y, refined level by level. A discarded cell never comes back
// (strict tail bound), so the surviving set covers L_f(y) at every depth.
inline CoverReport cover_level(const SignProvider& provider, const Rational& y,
                               unsigned max_depth) {
    if (max_depth < 1) throw std::domain_error("cover: depth must be >= 1");
    CoverReport report;
    std::vector<TrackedCell> cells{{0, 0, 0}};
    for (unsigned n = 0; n < max_depth; ++n) {
        if (cells.size() * 2 > kMaxCoverCells)
            throw std::length_error("cover: cell budget exceeded");
        std::vector<TrackedCell> next;
        next.reserve(cells.size() * 2);
        detail::ScaledLevel level(y, n + 1);
        for (const TrackedCell& c : cells) {
            Sign w = provider.sign(n, c.j);
            int64_t mid = c.vlo + c.vhi + w;
            TrackedCell kids[2] = {{2 * c.j, 2 * c.vlo, mid}, {2 * c.j + 1, mid, 2 * c.vhi}};
            for (const TrackedCell& kid : kids) {
                int64_t lo = std::min(kid.vlo, kid.vhi), hi = std::max(kid.vlo, kid.vhi);
                if (level.at_least(lo - 1) && level.at_most(hi + 1)) next.push_back(kid);
            }
        }
        cells = std::move(next);
        report.depths.push_back(n + 1);
        report.counts.push_back(cells.size());
        if (cells.empty()) break;
    }
    report.final_depth = report.depths.back();
    report.final_cells = std::move(cells);
    finish_report(report);
    return report;
}

// ---------------------------------------------------------------------------
// Maximum-set covers

// Keeps cell j at depth n iff max(f_n on j) + 2^-n > (max over all cells) -
// 2^-n. Discarded cells cannot contain a maximizer of f, and their children
// never re-qualify, so the sparse refinement is exact.
inline CoverReport max_set_cover(const SignProvider& provider, unsigned max_depth) {
    if (max_depth < 1) throw std::domain_error("max cover: depth must be >= 1");
    CoverReport report;
    std::vector<TrackedCell> cells{{0, 0, 0}};
    for (unsigned n = 0; n < max_depth; ++n) {
        if (cells.size() * 2 > kMaxCoverCells)
            throw std::length_error("max cover: cell budget exceeded");
        std::vector<TrackedCell> next;
        next.reserve(cells.size() * 2);
        int64_t global_max = INT64_MIN;
        std::vector<TrackedCell> kids_all;
        kids_all.reserve(cells.size() * 2);
        for (const TrackedCell& c : cells) {
            Sign w = provider.sign(n, c.j);
            int64_t mid = c.vlo + c.vhi + w;
            kids_all.push_back({2 * c.j, 2 * c.vlo, mid});
            kids_all.push_back({2 * c.j + 1, mid, 2 * c.vhi});
            global_max = std::max({global_max, 2 * c.vlo, mid, 2 * c.vhi});
        }
        for (const TrackedCell& kid : kids_all)
            if (std::max(kid.vlo, kid.vhi) + 1 > global_max - 1) next.push_back(kid);
        cells = std::move(next);
        report.depths.push_back(n + 1);
        report.counts.push_back(cells.size());
    }
    report.final_depth = max_depth;
    report.final_cells = std::move(cells);
    finish_report(report);
    return report;
}

// ---------------------------------------------------------------------------
// Shape detection and the zero-set index sets

struct ShapeCounts {
    uint64_t z_count = 0;    // slope patterns (2,0,2) or (-2,0,-2) on Gamma_n triples
    uint64_t cup_count = 0;  // slope pattern (-2,0,2)
};

namespace detail {

inline bool touches_zero(int64_t va, int64_t vb) {
    return std::min(va, vb) <= 0 && std::max(va, vb) >= 0;
}

// Z / cup counting over a sorted list of zero-touching cells with slopes.
struct GammaCell {
    uint64_t j;
    int64_t vlo;
    int64_t vhi;
    int64_t slope() const { return vhi - vlo; }
};

inline ShapeCounts count_shapes(const std::vector<GammaCell>& gamma) {
    ShapeCounts out;
    if (gamma.size() < 3) return out;
    for (size_t i = 0; i + 2 < gamma.size(); ++i) {
        if (gamma[i + 1].j != gamma[i].j + 1 || gamma[i + 2].j != gamma[i].j + 2) continue;
        int64_t a = gamma[i].slope(), b = gamma[i + 1].slope(), c = gamma[i + 2].slope();
        if (b != 0) continue;
        if ((a == 2 && c == 2) || (a == -2 && c == -2)) ++out.z_count;
        if (a == -2 && c == 2) ++out.cup_count;
    }
    return out;
}

}  // namespace detail

// Gamma_n and shape counts from a dense even-depth grid.
inline ShapeCounts detect_shapes(const GridFunction& gf) {
    if (gf.depth() % 2 != 0) throw std::domain_error("shape detection needs an even depth");
    std::vector<detail::GammaCell> gamma;
    for (uint64_t j = 0; j < gf.cell_count(); ++j)
        if (detail::touches_zero(gf.value(j), gf.value(j + 1)))
            gamma.push_back({j, gf.value(j), gf.value(j + 1)});
    return detail::count_shapes(gamma);
}

// Sparse tracker for Gamma_n: only zero-touching cells survive refinement
// (exact, not envelope-based; a cell strictly off the axis at even depth
// keeps all its descendants off it). Used for deep Model-1 statistics.
class ZeroSetTracker {
public:
    explicit ZeroSetTracker(ProviderPtr provider, uint64_t max_cells = uint64_t{1} << 22)
        : provider_(std::move(provider)), cells_{{0, 0, 0}}, max_cells_(max_cells) {}

    unsigned depth() const { return depth_; }
    unsigned stage() const { return depth_ / 2; }
    const std::vector<detail::GammaCell>& cells() const { return cells_; }
    uint64_t count() const { return cells_.size(); }

    void refine_stage() {
        refine_once();
        refine_once();
    }

    // False (and no change) when the next stage would exceed the cell budget;
    // heavy seeds stop early instead of exhausting memory.
    bool try_refine_stage() {
        if (cells_.size() * 4 > max_cells_) return false;
        refine_stage();
        return true;
    }

    ShapeCounts shapes() const { return detail::count_shapes(cells_); }

private:
    void refine_once() {
        std::vector<detail::GammaCell> next;
        next.reserve(cells_.size() * 2);
        for (const auto& c : cells_) {
            Sign w = provider_->sign(depth_, c.j);
            int64_t mid = c.vlo + c.vhi + w;
            detail::GammaCell kids[2] = {{2 * c.j, 2 * c.vlo, mid},
                                         {2 * c.j + 1, mid, 2 * c.vhi}};
            for (const auto& kid : kids)
                if (detail::touches_zero(kid.vlo, kid.vhi)) next.push_back(kid);
        }
        cells_ = std::move(next);
        ++depth_;
    }

    ProviderPtr provider_;
    std::vector<detail::GammaCell> cells_;
    unsigned depth_ = 0;
    uint64_t max_cells_;
};

// ---------------------------------------------------------------------------
// The (c, sigma, m) triple of Section-3.3 strip counting

struct TripleState {
    unsigned stage = 0;
    int64_t k = 0;        // chosen strip index k_n
    uint64_t c = 0;       // N0_{n,k_n}
    uint64_t l = 0;       // N1_{n,k_n-1}
    uint64_t u = 0;       // N1_{n,k_n}
    uint64_t sigma() const { return l + u; }
    uint64_t m() const { return std::max(l, u); }
};

// k_n selection: y in [2j/4^n, (2j+1)/4^n) picks j, y in [(2j+1)/4^n,
// (2j+2)/4^n) picks j+1; i.e. k_n = floor(y*4^n/2 + 1/2).
inline int64_t select_strip_index(const Rational& y, unsigned stage) {
    Rational scaled = y * Rational(BigInt::pow2(2 * stage)) / Rational(2) + Rational(1, 2);
    BigInt k = scaled.floor();
    if (!k.fits_int64()) throw std::domain_error("strip index overflow");
    return k.to_int64();
}

inline TripleState triple_state_at(const GridFunction& gf, const Rational& y) {
    if (gf.depth() % 2 != 0) throw std::domain_error("triple state needs an even depth");
    TripleState st;
    st.stage = gf.depth() / 2;
    st.k = select_strip_index(y, st.stage);
    for (uint64_t j = 0; j < gf.cell_count(); ++j) {
        int64_t va = gf.value(j), vb = gf.value(j + 1);
        if (va == vb && va == 2 * st.k) ++st.c;
        if (detail::segment_in_strip_interior(va, vb, st.k - 1)) ++st.l;
        if (detail::segment_in_strip_interior(va, vb, st.k)) ++st.u;
    }
    return st;
}

// Advances the triple by one stage: the caller supplies the grid at depth
// 2(n+1) built from the same provider.
inline TripleState triple_step(const TripleState& state, const GridFunction& gf_next,
                               const Rational& y) {
    if (gf_next.depth() != 2 * (state.stage + 1))
        throw std::domain_error("triple step: grid depth mismatch");
    TripleState st = triple_state_at(gf_next, y);
    if (st.k < 4 * state.k - 2 || st.k > 4 * state.k + 2)
        throw std::logic_error("triple step: k_{n+1} left the admissible window");
    return st;
}

}  // namespace takagi
