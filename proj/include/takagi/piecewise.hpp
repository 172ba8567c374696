#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "takagi/dyadic.hpp"
#include "takagi/signs.hpp"

namespace takagi {

// Dense partial sums become unwieldy past this depth; single points go
// through eval_enclosure instead.
inline constexpr unsigned kMaxDenseDepth = 26;

// Exact partial sum f_n on the dyadic grid: values[j] = 2^n f_n(j/2^n) and
// slope(j) = s_{n,j}. Immutable once built; refine returns a new object.
class GridFunction {
public:
    static GridFunction root() {
        GridFunction g;
        g.depth_ = 0;
        g.values_ = {0, 0};
        return g;
    }

    // One refinement step: s'_{2j} = s_j + w, s'_{2j+1} = s_j - w, and the
    // midpoint value picks up the new tent, v'_{2j+1} = v_j + v_{j+1} + w.
    static GridFunction refine(const GridFunction& gf, const SignProvider& provider) {
        if (gf.depth_ + 1 > kMaxDenseDepth)
            throw std::domain_error("grid: dense refinement beyond depth cap");
        GridFunction out;
        out.depth_ = gf.depth_ + 1;
        uint64_t cells = uint64_t{1} << gf.depth_;
        out.values_.resize(2 * cells + 1);
        for (uint64_t j = 0; j < cells; ++j) {
            Sign w = provider.sign(gf.depth_, j);
            out.values_[2 * j] = 2 * gf.values_[j];
            out.values_[2 * j + 1] = gf.values_[j] + gf.values_[j + 1] + w;
        }
        out.values_[2 * cells] = 2 * gf.values_[cells];
        return out;
    }

    static GridFunction build(const SignProvider& provider, unsigned depth) {
        GridFunction g = root();
        for (unsigned n = 0; n < depth; ++n) g = refine(g, provider);
        return g;
    }

    unsigned depth() const { return depth_; }
    uint64_t cell_count() const { return uint64_t{1} << depth_; }
    int32_t value(uint64_t j) const { return values_[j]; }
    int32_t slope(uint64_t j) const { return values_[j + 1] - values_[j]; }
    const std::vector<int32_t>& values() const { return values_; }

    // [min f_n - 2^-n, max f_n + 2^-n] over cell j; by the tail bound f stays
    // strictly inside, so pruning with the closed interval is sound.
    std::pair<Dyadic, Dyadic> envelope(uint64_t j) const {
        if (j >= cell_count()) throw std::domain_error("envelope: cell out of range");
        int64_t lo = std::min(values_[j], values_[j + 1]);
        int64_t hi = std::max(values_[j], values_[j + 1]);
        return {Dyadic(lo - 1, depth_), Dyadic(hi + 1, depth_)};
    }

private:
    unsigned depth_ = 0;
    std::vector<int32_t> values_;
};

// Exact f_m(x) at a dyadic point x = a/2^e in [0,1]. Terms with k >= e
// vanish (phi of an integer), so the sum is finite and integral at scale 2^e.
inline Dyadic eval_partial_sum(const SignProvider& provider, const Dyadic& x, unsigned m) {
    if (x.num().is_negative() || x.to_rational() > Rational(1))
        throw std::domain_error("eval: x outside [0,1]");
    unsigned e = x.exp();
    if (e > 4096) throw std::domain_error("eval: dyadic exponent too large");
    BigInt acc(0);
    for (unsigned k = 0; k < std::min(m, e); ++k) {
        unsigned me = e - k;
        BigInt cell = x.num().shifted_right(me);          // floor(2^k x)
        BigInt r = x.num() - cell.shifted_left(me);       // 2^k x mod 1, scaled by 2^me
        BigInt tent = std::min(r, BigInt::pow2(me) - r);  // 2^me * phi(2^k x)
        uint64_t j = static_cast<uint64_t>(cell.to_int64());
        if (j >> k) j = (uint64_t{1} << k) - 1;  // x == 1 uses the last cell
        Sign w = provider.sign(k, j);
        if (w > 0) acc += tent; else acc -= tent;
    }
    return Dyadic(acc, e);
}

// Interval of width 2^(1-m) that contains f(x), from |f - f_m| < 2^-m.
inline std::pair<Dyadic, Dyadic> eval_enclosure(const SignProvider& provider, const Dyadic& x,
                                                unsigned m) {
    Dyadic center = eval_partial_sum(provider, x, m);
    Dyadic tail(1, m);
    return {center - tail, center + tail};
}

}  // namespace takagi
