#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "takagi/dyadic.hpp"
#include "takagi/piecewise.hpp"
#include "takagi/signs.hpp"

namespace takagi {

// ---------------------------------------------------------------------------
// The extremal function attaining level-set dimension log(alpha)/log(16)

// Cell of K_n: depth-2n interval with slope in {-2,0,2}, classified
// 1 = flat on the baseline, 2 = sloped on the advancing side, 3 = sloped on
// the retreating side.
struct TypedCell {
    uint64_t j;
    int8_t slope;
    int8_t type;
};

struct TypedCellSet {
    unsigned stage = 0;
    std::vector<TypedCell> cells;
};

struct Baseline {
    unsigned stage = 0;
    Dyadic y;  // y_n, an even integer at scale 4^n
};

struct ExtremalConstruction {
    std::shared_ptr<ExplicitTreeProvider> provider;
    std::vector<Baseline> baselines;                    // y_0 .. y_n
    std::vector<std::array<uint64_t, 3>> type_counts;   // t_0 .. t_n
    std::vector<TypedCellSet> stages;                   // filled when keep_cells
};

namespace detail {

// Direction of the baseline over the next two stages: up-hold-down-hold.
inline int baseline_two_step_sign(unsigned n) {
    switch (n % 4) {
        case 0: return 1;
        case 1: return -1;
        case 2: return -1;
        default: return 1;
    }
}

inline int8_t classify_extremal_cell(unsigned stage, int slope, int64_t rel_left,
                                     int64_t rel_right) {
    if (slope == 0) return 1;
    int above = (rel_left + rel_right) > 0 ? 1 : -1;
    return above == baseline_two_step_sign(stage) ? 2 : 3;
}

}  // namespace detail

// Builds the stage-n approximants of the extremal function: baselines move
// up, hold, down, hold (n mod 4) by half a cell height, and the sign triple
// on each K_n cell follows the case table. Outside K_n every sign is +1.
inline ExtremalConstruction extremal_flexible(unsigned depth, bool keep_cells = true) {
    if (depth > 13) throw std::domain_error("extremal construction: depth capped at 13");
    ExtremalConstruction out;
    auto tree = std::make_shared<ExplicitTreeProvider>(2 * depth, 1);

    struct Cell {
        uint64_t j;
        int64_t v;      // left endpoint of f_{2n}, scaled by 4^n
        int8_t slope;
    };
    std::vector<Cell> cells{{0, 0, 0}};
    int64_t baseline = 0;  // y_n scaled by 4^n

    auto record_stage = [&](unsigned stage) {
        out.baselines.push_back({stage, Dyadic(baseline, 2 * stage)});
        std::array<uint64_t, 3> counts{0, 0, 0};
        TypedCellSet set;
        set.stage = stage;
        for (const Cell& c : cells) {
            int64_t rel_l = c.v - baseline;
            int64_t rel_r = c.v + c.slope - baseline;
            int8_t type = detail::classify_extremal_cell(stage, c.slope, rel_l, rel_r);
            ++counts[static_cast<size_t>(type - 1)];
            if (keep_cells) set.cells.push_back({c.j, c.slope, type});
        }
        out.type_counts.push_back(counts);
        if (keep_cells) out.stages.push_back(std::move(set));
    };

    record_stage(0);
    for (unsigned n = 0; n < depth; ++n) {
        int64_t next_baseline = 4 * baseline;
        switch (n % 4) {
            case 0: next_baseline += 2; break;
            case 2: next_baseline -= 2; break;
            default: break;
        }
        std::vector<Cell> next;
        next.reserve(cells.size() * 3);
        for (const Cell& c : cells) {
            int s = c.slope;
            int w0, w1, w2;
            switch (n % 4) {
                case 0:
                    if (s == 0) { w0 = 1; w1 = 1; w2 = 1; }
                    else if (s == 2) { w0 = -1; w1 = 1; w2 = -1; }
                    else { w0 = -1; w1 = -1; w2 = 1; }
                    break;
                case 2:
                    // mirror of the up-stage: negate that stage's signs for
                    // the mirrored slope
                    if (s == 0) { w0 = -1; w1 = -1; w2 = -1; }
                    else if (s == 2) { w0 = 1; w1 = 1; w2 = -1; }
                    else { w0 = 1; w1 = -1; w2 = 1; }
                    break;
                default:  // hold stages
                    if (s == 0) { w0 = (n % 4 == 1) ? -1 : 1; w1 = -w0; w2 = -w0; }
                    else if (c.v <= baseline && c.v + s <= baseline) { w0 = 1; w1 = 1; w2 = 1; }
                    else { w0 = -1; w1 = -1; w2 = -1; }
                    break;
            }
            tree->set(2 * n, c.j, w0);
            tree->set(2 * n + 1, 2 * c.j, w1);
            tree->set(2 * n + 1, 2 * c.j + 1, w2);

            int cs[4] = {s + w0 + w1, s + w0 - w1, s - w0 + w2, s - w0 - w2};
            int64_t V[5];
            V[0] = 4 * c.v;
            for (int t = 0; t < 4; ++t) V[t + 1] = V[t] + cs[t];
            for (int t = 0; t < 4; ++t) {
                int64_t lo = std::min(V[t], V[t + 1]), hi = std::max(V[t], V[t + 1]);
                if (lo <= next_baseline && next_baseline <= hi) {
                    if (cs[t] != 0 && cs[t] != 2 && cs[t] != -2)
                        throw std::logic_error("extremal construction: slope left {-2,0,2}");
                    next.push_back({4 * c.j + static_cast<uint64_t>(t), V[t],
                                    static_cast<int8_t>(cs[t])});
                }
            }
        }
        cells = std::move(next);
        baseline = next_baseline;
        record_stage(n + 1);
    }
    out.provider = tree;
    return out;
}

// Hold-stage sign choice for slope 0 differs between cases 2 and 4; encoded
// inline above. The baseline limit is 8/17.
inline Rational extremal_baseline_limit() { return Rational(8, 17); }

// ---------------------------------------------------------------------------
// The extremal level of a level-constant function

struct RigidLevel {
    Rational y;                   // sum (w_{2n} + w_{2n+1}) / 4^(n+1)
    std::vector<int64_t> k_path;  // k_0 = 0, k_{n+1} = 4 k_n + (w_{2n}+w_{2n+1})/2
};

inline RigidLevel rigid_extremal_level(const std::vector<Sign>& level_signs) {
    if (level_signs.size() % 2 != 0)
        throw std::domain_error("rigid level: need an even number of level signs");
    if (level_signs.size() > 60) throw std::domain_error("rigid level: too many stages");
    RigidLevel out;
    out.k_path.push_back(0);
    Rational y(0);
    for (size_t n = 0; 2 * n < level_signs.size(); ++n) {
        int sum = level_signs[2 * n] + level_signs[2 * n + 1];
        y += Rational(sum, 1) / Rational(BigInt::pow2(2 * (static_cast<unsigned>(n) + 1)));
        out.k_path.push_back(4 * out.k_path.back() + sum / 2);
    }
    out.y = y;
    return out;
}

// ---------------------------------------------------------------------------
// Gray Takagi special sets

struct GrayZeroPoints {
    std::vector<Rational> x;  // x_m = 1 - sum_{i<=m} 4^-(2i-1)
    Rational x_star;          // 11/15, the limit
};

inline GrayZeroPoints gray_zero_points(unsigned m_max) {
    if (m_max < 1) throw std::domain_error("gray zero points: need m >= 1");
    GrayZeroPoints out;
    Rational x(1);
    for (unsigned m = 1; m <= m_max; ++m) {
        x -= Rational(1) / Rational(BigInt::pow2(2 * (2 * m - 1)));
        out.x.push_back(x);
    }
    out.x_star = Rational(11, 15);
    return out;
}

// Copies of the two-segment figure X in the approximants of the Gray Takagi
// function around level 2/5. Each copy covers two adjacent depth-2s cells.
struct GrayCopies {
    unsigned stage = 0;           // copies live in the graph of f_{2*stage}
    bool upright = true;          // slopes (2,0) if upright, (0,2) if inverted
    Dyadic baseline;              // height of the horizontal parts
    std::vector<uint64_t> left_cells;
};

struct GrayTwoFifths {
    std::vector<GrayCopies> stages;
    Rational limit;  // 2/5
};

inline GrayTwoFifths gray_level_two_fifths(unsigned depth) {
    if (depth < 1 || depth > 30) throw std::domain_error("gray copies: depth in [1,30]");
    GrayTwoFifths out;
    out.limit = Rational(2, 5);
    GrayCopies cur;
    cur.stage = 1;
    cur.upright = true;
    int64_t baseline = 2;  // y_1 = 1/2 at scale 4
    cur.baseline = Dyadic(baseline, 2);
    cur.left_cells = {0};
    out.stages.push_back(cur);
    for (unsigned s = 1; s < depth; ++s) {
        GrayCopies next;
        next.stage = s + 1;
        next.upright = !cur.upright;
        baseline = 4 * baseline + (s % 2 == 1 ? -2 : 2);  // y alternates: 1/2, 3/8, 13/32, ...
        next.baseline = Dyadic(baseline, 2 * (s + 1));
        next.left_cells.reserve(cur.left_cells.size() * 2);
        for (uint64_t d : cur.left_cells) {
            if (cur.upright) {
                next.left_cells.push_back(4 * d + 2);
                next.left_cells.push_back(4 * d + 6);
            } else {
                next.left_cells.push_back(4 * d);
                next.left_cells.push_back(4 * d + 4);
            }
        }
        out.stages.push_back(next);
        cur = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integer slopes and line reductions

// The unique depth-|m| cell where f_{|m|} has slope m, found by always
// descending into the child whose slope moves toward m.
inline uint64_t slope_interval(const SignProvider& provider, int m) {
    unsigned depth = static_cast<unsigned>(m < 0 ? -m : m);
    if (depth > 62) throw std::domain_error("slope interval: |m| too large");
    uint64_t j = 0;
    int s = 0;
    for (unsigned n = 0; n < depth; ++n) {
        Sign w = provider.sign(n, j);
        // left child has slope s + w, right child s - w
        if ((m > s) == (w > 0)) {
            j = 2 * j;
            s += w;
        } else {
            j = 2 * j + 1;
            s -= w;
        }
    }
    return j;
}

struct LineReduction {
    ProviderPtr g;     // sign source of the reduced function
    Rational level;    // b / 2^m
    unsigned shift;    // |m|
};

// Affine reduction of graph(f) against the line y = m x + b onto a level set
// of g(x) = -sum_{k<m} 2^-k phi(2^k x) + 2^-m f(2^m x); negative slopes go
// through -f first.
inline LineReduction line_reduction(ProviderPtr f, int m, const Rational& b) {
    LineReduction out;
    if (m >= 0) {
        out.shift = static_cast<unsigned>(m);
        out.g = m == 0 ? std::move(f)
                       : std::make_shared<LineLiftProvider>(std::move(f), out.shift, -1);
        out.level = b / Rational(BigInt::pow2(out.shift));
    } else {
        out.shift = static_cast<unsigned>(-m);
        out.g = std::make_shared<LineLiftProvider>(negate_provider(std::move(f)), out.shift, -1);
        out.level = -b / Rational(BigInt::pow2(out.shift));
    }
    return out;
}

}  // namespace takagi
