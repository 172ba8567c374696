#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "takagi/levelsets.hpp"
#include "takagi/signs.hpp"
#include "takagi/spectra.hpp"

namespace takagi {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    uint64_t trials = 0;
    // Documented truncation allowance for finite-horizon proxies of tail
    // events; zero when the horizon bias is negligible.
    double bias_bound = 0.0;
};

namespace detail {

inline Estimate summarize(const std::vector<double>& xs) {
    Estimate e;
    e.trials = xs.size();
    if (xs.empty()) return e;
    double s = 0;
    for (double x : xs) s += x;
    e.mean = s / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    if (xs.size() > 1)
        e.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                                static_cast<double>(xs.size()));
    return e;
}

inline Estimate summarize_bernoulli(uint64_t hits, uint64_t trials) {
    Estimate e;
    e.trials = trials;
    e.mean = static_cast<double>(hits) / static_cast<double>(trials);
    e.std_error = std::sqrt(std::max(e.mean * (1.0 - e.mean), 1e-12) /
                            static_cast<double>(trials));
    return e;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random-walk layer (Model 1 slope walks and hitting times)

// Walk step n for a seed: +1 with probability p, from the counter generator.
class WalkSource {
public:
    WalkSource(uint64_t seed, const Rational& p)
        : seed_(seed), threshold_(detail_signs_threshold(p)) {}

    int step(uint64_t n) const {
        return detail::counter_hash(seed_, n, 0) < threshold_ ? 1 : -1;
    }

private:
    static uint64_t detail_signs_threshold(const Rational& p) {
        return takagi::detail::bernoulli_threshold(p);
    }
    uint64_t seed_;
    uint64_t threshold_;
};

// First odd time 2n+1 such that S_{2n-1} = -1, S_{2n} = 0, S_{2n+1} = 1,
// i.e. the walk event that plants a Z-shape; 0 if not seen by the horizon.
inline uint64_t z_pattern_time(const WalkSource& walk, uint64_t horizon) {
    int64_t s_prev2 = 0, s_prev1 = 0, s = 0;
    for (uint64_t n = 1; n <= horizon; ++n) {
        s_prev2 = s_prev1;
        s_prev1 = s;
        s += walk.step(n - 1);
        if (n >= 3 && n % 2 == 1 && s_prev2 == -1 && s_prev1 == 0 && s == 1) return n;
    }
    return 0;
}

// P(no Z-pattern by horizon N) decays like the tail of the hitting time of
// level -1; these are safe analytic envelopes used as truncation allowances.
inline double z_pattern_tail_bound(const Rational& p, uint64_t horizon) {
    double pd = p.to_double();
    double qd = 1.0 - pd;
    if (std::abs(pd - 0.5) < 1e-12)
        return 4.0 / std::sqrt(static_cast<double>(horizon));
    double mu = std::abs(pd - qd);
    double n = static_cast<double>(horizon);
    double hoeffding = std::exp(-n * mu * mu / 8.0);
    double ratio = std::min(pd, qd) / std::max(pd, qd);
    double geometric = std::pow(ratio, mu * n / 2.0);
    return hoeffding + geometric;
}

// Fraction of seeds whose Model-1 walk shows the Z-pattern by the horizon:
// a lower-bound estimator converging to min{q/p, p/q} (the probability that
// a Z-shape, hence an infinite zero set, appears).
inline Estimate mc_z_shape_probability(const Rational& p, uint64_t trials, uint64_t depth,
                                       uint64_t seed_base) {
    if (p.sign() <= 0 || p >= Rational(1)) throw std::domain_error("p must be in (0,1)");
    Rational p_eff = p < Rational(1, 2) ? Rational(1) - p : p;  // reflect by symmetry
    uint64_t hits = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        WalkSource walk(seed_base + t, p_eff);
        if (z_pattern_time(walk, depth) != 0) ++hits;
    }
    Estimate e = detail::summarize_bernoulli(hits, trials);
    e.bias_bound = z_pattern_tail_bound(p_eff, depth);
    return e;
}

// Complementary estimator of P(#L_f(0) < infinity) = 1 - min{p/q, q/p}.
inline Estimate mc_zero_finiteness(const Rational& p, uint64_t trials, uint64_t depth,
                                   uint64_t seed_base) {
    Estimate e = mc_z_shape_probability(p, trials, depth, seed_base);
    e.mean = 1.0 - e.mean;
    return e;
}

struct HittingTimeSamples {
    unsigned level = 1;
    uint64_t horizon = 0;
    std::vector<uint64_t> tau;  // capped at horizon
    uint64_t capped = 0;

    // Empirical E r^tau; capped trials enter as r^horizon (upper bias).
    Estimate pgf_at(double r) const {
        std::vector<double> xs;
        xs.reserve(tau.size());
        for (uint64_t t : tau) xs.push_back(std::pow(r, static_cast<double>(t)));
        Estimate e = detail::summarize(xs);
        e.bias_bound = std::pow(r, static_cast<double>(horizon));
        return e;
    }
};

// Hitting time of level m for the symmetric simple random walk.
inline HittingTimeSamples hitting_time_tools(unsigned level, uint64_t trials, uint64_t horizon,
                                             uint64_t seed_base) {
    if (level < 1 || level > 2) throw std::domain_error("hitting times: level must be 1 or 2");
    HittingTimeSamples out;
    out.level = level;
    out.horizon = horizon;
    out.tau.reserve(trials);
    Rational half(1, 2);
    for (uint64_t t = 0; t < trials; ++t) {
        WalkSource walk(seed_base + t, half);
        int64_t s = 0;
        uint64_t n = 0;
        while (n < horizon) {
            s += walk.step(n);
            ++n;
            if (s == static_cast<int64_t>(level)) break;
        }
        if (s != static_cast<int64_t>(level)) ++out.capped;
        out.tau.push_back(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Z-shape growth in Model 1

struct ZGrowthTrial {
    uint64_t seed = 0;
    unsigned first_z_stage = 0;   // 0 when no Z-shape by the horizon
    unsigned stages_reached = 0;  // may stop short of the horizon at the cell budget
    std::vector<uint64_t> z_counts;
    bool monotone = true;
    bool triple_rule_held = true;
};

inline ZGrowthTrial z_growth_trial(uint64_t seed, const Rational& p, unsigned stages) {
    ZGrowthTrial out;
    out.seed = seed;
    auto provider = std::make_shared<SeededModel1Provider>(seed, p);
    ZeroSetTracker tracker(provider);
    out.z_counts.push_back(tracker.shapes().z_count);
    for (unsigned n = 1; n <= stages; ++n) {
        if (!tracker.try_refine_stage()) break;
        uint64_t z = tracker.shapes().z_count;
        out.z_counts.push_back(z);
        out.stages_reached = n;
        if (z < out.z_counts[n - 1]) out.monotone = false;
        if (out.first_z_stage == 0 && z > 0) out.first_z_stage = n;
    }
    // N_{n+2} >= 3 N_n whenever the level signs follow (+,-,-) or (-,+,+).
    for (unsigned n = 0; n + 2 <= out.stages_reached; ++n) {
        if (out.z_counts[n] == 0) continue;
        Sign a = provider->sign(2 * n, 0), b = provider->sign(2 * n + 1, 0),
             c = provider->sign(2 * n + 2, 0);
        if ((a == 1 && b == -1 && c == -1) || (a == -1 && b == 1 && c == 1)) {
            if (out.z_counts[n + 2] < 3 * out.z_counts[n]) out.triple_rule_held = false;
        }
    }
    return out;
}

// Mean exponential growth rate of the Z-shape count over seeds that see a
// Z-shape in the first half of the horizon; the theory floor is pq log(3)/2
// per stage.
inline Estimate mc_z_growth_rate(uint64_t trials, unsigned stages, uint64_t seed_base,
                                 const Rational& p = Rational(1, 2)) {
    std::vector<double> rates;
    for (uint64_t t = 0; t < trials; ++t) {
        ZGrowthTrial trial = z_growth_trial(seed_base + t, p, stages);
        if (!trial.monotone)
            throw std::logic_error("z-shape count decreased (replay: model=1 seed=" +
                                   std::to_string(trial.seed) + " p=" + p.to_string() +
                                   " stages=" + std::to_string(stages) + ")");
        if (!trial.triple_rule_held)
            throw std::logic_error("z-shape tripling rule failed (replay: model=1 seed=" +
                                   std::to_string(trial.seed) + " p=" + p.to_string() +
                                   " stages=" + std::to_string(stages) + ")");
        if (trial.first_z_stage == 0 || trial.first_z_stage >= stages / 2) continue;
        unsigned last = trial.stages_reached;  // capped seeds stop early
        if (last <= trial.first_z_stage + 4) continue;
        double n0 = static_cast<double>(trial.z_counts[trial.first_z_stage]);
        double n1 = static_cast<double>(trial.z_counts[last]);
        rates.push_back(std::log(n1 / n0) / static_cast<double>(last - trial.first_z_stage));
    }
    return detail::summarize(rates);
}

// ---------------------------------------------------------------------------
// Zero-set dimension estimates

struct ZeroDimensionResult {
    Estimate fit;            // mean per-seed box-dimension fit
    uint64_t nonempty = 0;   // seeds with a nonempty deep cover
    uint64_t constant_tail = 0;  // seeds whose cover count froze (finite sets)
};

inline ZeroDimensionResult mc_zero_dimension(int model, const Rational& p, uint64_t trials,
                                             unsigned depth, uint64_t seed_base,
                                             bool condition_on_z = false) {
    if (depth < 12) throw std::domain_error("zero dimension: depth too small");
    ZeroDimensionResult out;
    std::vector<double> fits;
    for (uint64_t t = 0; t < trials; ++t) {
        ProviderPtr provider;
        if (model == 1)
            provider = std::make_shared<SeededModel1Provider>(seed_base + t, p);
        else
            provider = std::make_shared<SeededModel2Provider>(seed_base + t, p);
        if (condition_on_z) {
            ZGrowthTrial zt = z_growth_trial(seed_base + t, p, depth / 2);
            if (zt.first_z_stage == 0) continue;
        }
        CoverReport cover = cover_level(*provider, Rational(0), depth);
        if (cover.counts.back() == 0) continue;
        ++out.nonempty;
        if (cover.counts.back() == cover.counts[cover.counts.size() / 2])
            ++out.constant_tail;
        std::vector<unsigned> ds;
        std::vector<uint64_t> cs;
        for (size_t i = 0; i < cover.depths.size(); ++i) {
            if (cover.depths[i] <= kFitTransientDepths) continue;
            ds.push_back(cover.depths[i]);
            cs.push_back(cover.counts[i]);
        }
        fits.push_back(fit_dimension(ds, cs).dimension);
    }
    out.fit = detail::summarize(fits);
    return out;
}

// ---------------------------------------------------------------------------
// Maximum sets: the embedded Galton-Watson process of Model 2

struct GwTrial {
    uint64_t seed = 0;
    bool extinct = false;
    std::vector<uint64_t> population;      // X^1_g, flat cells at the running top
    std::vector<unsigned> offspring_obs;   // children per parent, all generations
};

// Flat-at-maximum population evolved directly from Model-2 sign draws: a
// flat cell spawns its first quarter-pair child when (w0,w1) = (+,+) and its
// second when (w0,w2) = (+,+), matching the offspring law
// (1 - 2p^2 q - p^3, 2 p^2 q, p^3).
inline GwTrial gw_trial(uint64_t seed, const Rational& p, unsigned generations,
                        bool record_offspring = false) {
    GwTrial out;
    out.seed = seed;
    SeededModel2Provider provider(seed, p);
    std::vector<uint64_t> flat{0};  // cell indices at depth 2g
    out.population.push_back(1);
    for (unsigned g = 0; g < generations && !flat.empty(); ++g) {
        std::vector<uint64_t> next;
        next.reserve(flat.size() * 2);
        for (uint64_t j : flat) {
            Sign w0 = provider.sign(2 * g, j);
            Sign w1 = provider.sign(2 * g + 1, 2 * j);
            Sign w2 = provider.sign(2 * g + 1, 2 * j + 1);
            unsigned kids = 0;
            if (w0 == 1 && w1 == 1) { next.push_back(4 * j + 1); ++kids; }
            if (w0 == 1 && w2 == 1) { next.push_back(4 * j + 2); ++kids; }
            if (record_offspring) out.offspring_obs.push_back(kids);
        }
        flat = std::move(next);
        out.population.push_back(flat.size());
    }
    while (out.population.size() < generations + 1) out.population.push_back(0);
    out.extinct = flat.empty();
    return out;
}

// Exact extinction probability by generation g (iterated pgf) and in the
// limit; the difference bounds the finite-horizon bias of survival estimates.
inline double gw_extinction_by_generation(const Rational& p, unsigned generations) {
    double pd = p.to_double(), qd = 1.0 - pd;
    double pi2 = pd * pd * pd, pi1 = 2.0 * pd * pd * qd, pi0 = 1.0 - pi1 - pi2;
    double t = 0.0;
    for (unsigned g = 0; g < generations; ++g) t = pi0 + pi1 * t + pi2 * t * t;
    return t;
}
inline double gw_extinction_limit(const Rational& p) {
    double pd = p.to_double();
    double mu = 2.0 * pd * pd;
    if (mu <= 1.0) return 1.0;
    return (1.0 - 2.0 * pd * pd * (1.0 - pd) - pd * pd * pd) / (pd * pd * pd);
}

struct GwMaximum {
    Estimate survival;             // P(M_f = 2/3) estimate
    Estimate dim_fit;              // mean max-set cover fit over surviving seeds
    Estimate offspring_freq[3];    // empirical offspring law
    bool support_check = true;     // surviving maxima have the 1/2 sum 4^-j form
    bool supercritical = true;  // false when p <= 1/sqrt 2
};

inline GwMaximum mc_gw_maximum(const Rational& p, uint64_t trials, unsigned depth,
                               uint64_t seed_base) {
    if (depth % 2 != 0 || depth < 20) throw std::domain_error("gw maximum: even depth >= 20");
    unsigned generations = depth / 2;
    GwMaximum out;
    out.supercritical = p * p > Rational(1, 2);
    uint64_t survived = 0;
    uint64_t offspring_counts[3] = {0, 0, 0};
    uint64_t offspring_total = 0;
    std::vector<double> fits;
    for (uint64_t t = 0; t < trials; ++t) {
        GwTrial trial = gw_trial(seed_base + t, p, generations, true);
        for (unsigned kids : trial.offspring_obs) {
            ++offspring_counts[kids];
            ++offspring_total;
        }
        if (trial.extinct) continue;
        ++survived;
        SeededModel2Provider provider(seed_base + t, p);
        CoverReport cover = max_set_cover(provider, depth);
        std::vector<unsigned> ds;
        std::vector<uint64_t> cs;
        for (size_t i = 0; i < cover.depths.size(); ++i) {
            if (cover.depths[i] <= depth / 2 || cover.depths[i] % 2 != 0) continue;
            ds.push_back(cover.depths[i]);
            cs.push_back(cover.counts[i]);
        }
        if (ds.size() >= 4) fits.push_back(fit_dimension(ds, cs).dimension);
        // Surviving runs sit on the top path: the scaled maximum must have
        // ones exactly at the odd bit positions below 2*generations.
        int64_t vmax = INT64_MIN;
        for (const TrackedCell& c : cover.final_cells)
            vmax = std::max({vmax, c.vlo, c.vhi});
        for (unsigned b = 0; b < depth; ++b) {
            bool bit = (vmax >> b) & 1;
            if (bit != (b % 2 == 1)) { out.support_check = false; break; }
        }
    }
    out.survival = detail::summarize_bernoulli(survived, trials);
    out.survival.bias_bound =
        gw_extinction_limit(p) - gw_extinction_by_generation(p, generations);
    out.dim_fit = detail::summarize(fits);
    for (int i = 0; i < 3; ++i)
        out.offspring_freq[i] =
            detail::summarize_bernoulli(offspring_counts[i], std::max<uint64_t>(offspring_total, 1));
    return out;
}

// Model-1 maximum-set dimension cross-check: mean cover fit per seed.
inline Estimate mc_model1_max_dimension(const Rational& p, uint64_t trials, unsigned depth,
                                        uint64_t seed_base) {
    std::vector<double> fits;
    for (uint64_t t = 0; t < trials; ++t) {
        SeededModel1Provider provider(seed_base + t, p);
        CoverReport cover = max_set_cover(provider, depth);
        std::vector<unsigned> ds;
        std::vector<uint64_t> cs;
        for (size_t i = 0; i < cover.depths.size(); ++i) {
            if (cover.depths[i] <= kFitTransientDepths) continue;
            ds.push_back(cover.depths[i]);
            cs.push_back(cover.counts[i]);
        }
        fits.push_back(fit_dimension(ds, cs).dimension);
    }
    return detail::summarize(fits);
}

// ---------------------------------------------------------------------------
// Trial records for the simulate front end

// One seeded Monte Carlo outcome; a pure function of (model, seed, p, depth),
// so identical parameters reproduce the record bit-exactly regardless of
// worker count.
struct TrialRecord {
    int model = 2;
    uint64_t seed = 0;
    Rational p;
    unsigned depth = 0;
    std::map<std::string, double> observables;
};

inline TrialRecord run_trial(int model, uint64_t seed, const Rational& p, unsigned depth) {
    if (model != 1 && model != 2) throw std::domain_error("model must be 1 or 2");
    if (depth < 4 || depth > 60 || depth % 2 != 0)
        throw std::domain_error("trial depth must be even and in [4, 60]");
    TrialRecord rec;
    rec.model = model;
    rec.seed = seed;
    rec.p = p;
    rec.depth = depth;
    ProviderPtr provider;
    if (model == 1) provider = std::make_shared<SeededModel1Provider>(seed, p);
    else provider = std::make_shared<SeededModel2Provider>(seed, p);

    CoverReport zero_cover = cover_level(*provider, Rational(0), depth);
    for (size_t i = 0; i < zero_cover.depths.size(); ++i) {
        char key[32];
        std::snprintf(key, sizeof key, "cover_count_%02u", zero_cover.depths[i]);
        rec.observables[key] = static_cast<double>(zero_cover.counts[i]);
    }

    ZeroSetTracker tracker(provider);
    unsigned first_z = 0;
    for (unsigned n = 1; n <= depth / 2 && tracker.try_refine_stage(); ++n)
        if (first_z == 0 && tracker.shapes().z_count > 0) first_z = n;
    rec.observables["z_count"] = static_cast<double>(tracker.shapes().z_count);
    rec.observables["z_stage"] = static_cast<double>(tracker.stage());
    rec.observables["first_z_stage"] = static_cast<double>(first_z);

    CoverReport max_cover = max_set_cover(*provider, depth);
    int64_t vmax = INT64_MIN;
    for (const TrackedCell& c : max_cover.final_cells)
        vmax = std::max({vmax, c.vlo, c.vhi});
    rec.observables["max_value_scaled"] = static_cast<double>(vmax);
    rec.observables["max_cover_count"] = static_cast<double>(max_cover.counts.back());

    if (model == 2) {
        GwTrial gw = gw_trial(seed, p, depth / 2);
        rec.observables["gw_extinct"] = gw.extinct ? 1.0 : 0.0;
        rec.observables["gw_population"] = static_cast<double>(gw.population.back());
    }
    return rec;
}

// ---------------------------------------------------------------------------
// The four-case transition table of the zero-set counting state

// Counting state (c, u^(1..k), l^(1..k)) over zero-touching cells at even
// depth, with the >= 2k truncation class.
struct ZeroCountState {
    unsigned k = 0;
    uint64_t c = 0;
    std::vector<uint64_t> u;  // u[i-1] = #{above, |s| = 2i}, u[k-1] lumps >= 2k
    std::vector<uint64_t> l;

    std::vector<Rational> sigma_vector() const {
        std::vector<Rational> x;
        x.emplace_back(static_cast<long long>(c));
        for (unsigned i = 0; i < k; ++i)
            x.emplace_back(static_cast<long long>(u[i] + l[i]));
        return x;
    }
};

namespace detail {

inline ZeroCountState classify_zero_cells(const std::vector<GammaCell>& cells, unsigned k) {
    ZeroCountState st;
    st.k = k;
    st.u.assign(k, 0);
    st.l.assign(k, 0);
    for (const auto& c : cells) {
        int64_t s = c.slope();
        if (s == 0) {
            if (c.vlo == 0) ++st.c;
            continue;
        }
        int64_t mag = std::abs(s);
        if (mag % 2 != 0) throw std::logic_error("odd slope at even depth");
        unsigned cls = static_cast<unsigned>(std::min<int64_t>(mag / 2, k));
        bool above = std::min(c.vlo, c.vhi) >= 0;
        bool below = std::max(c.vlo, c.vhi) <= 0;
        if (above) ++st.u[cls - 1];
        else if (below) ++st.l[cls - 1];
        else throw std::logic_error("zero-crossing cell in Model-1 state");
    }
    return st;
}

// Two deterministic refinement levels with level signs (a, b).
inline std::vector<GammaCell> refine_zero_cells(const std::vector<GammaCell>& cells, Sign a,
                                                Sign b) {
    std::vector<GammaCell> mid;
    mid.reserve(cells.size() * 2);
    for (const auto& c : cells) {
        int64_t m = c.vlo + c.vhi + a;
        GammaCell kids[2] = {{2 * c.j, 2 * c.vlo, m}, {2 * c.j + 1, m, 2 * c.vhi}};
        for (const auto& kid : kids)
            if (touches_zero(kid.vlo, kid.vhi)) mid.push_back(kid);
    }
    std::vector<GammaCell> next;
    next.reserve(mid.size() * 2);
    for (const auto& c : mid) {
        int64_t m = c.vlo + c.vhi + b;
        GammaCell kids[2] = {{2 * c.j, 2 * c.vlo, m}, {2 * c.j + 1, m, 2 * c.vhi}};
        for (const auto& kid : kids)
            if (touches_zero(kid.vlo, kid.vhi)) next.push_back(kid);
    }
    return next;
}

}  // namespace detail

struct FourCaseReport {
    uint64_t states_checked = 0;
    uint64_t rows_checked = 0;
    bool all_passed = true;
};

// Applies each of the four sign cases to reachable Model-1 states, verifies
// every row of the transition table (equalities where the truncation class
// is not involved, inequalities at the boundary) and the conditional
// domination E(x_{n+1}) <= A_k x_n in exact arithmetic.
inline FourCaseReport four_case_table_check(unsigned k_trunc, uint64_t prefixes,
                                            unsigned max_stage, uint64_t seed_base) {
    if (k_trunc < 3) throw std::domain_error("four-case check: k >= 3");
    FourCaseReport report;
    RationalMatrix Ak = a_k_full(k_trunc);
    auto fail = [](const std::string& what) {
        throw std::logic_error("four-case table: " + what);
    };

    for (uint64_t t = 0; t < prefixes; ++t) {
        auto provider = std::make_shared<SeededModel1Provider>(seed_base + t, Rational(1, 2));
        ZeroSetTracker tracker(provider);
        for (unsigned stage = 0; stage <= max_stage; ++stage) {
            if (stage > 0) tracker.refine_stage();
            ZeroCountState st = detail::classify_zero_cells(tracker.cells(), k_trunc);
            ++report.states_checked;

            std::vector<Rational> avg(k_trunc + 1, Rational(0));
            const Sign cases[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
            for (const auto& cs : cases) {
                auto next_cells = detail::refine_zero_cells(tracker.cells(), cs[0], cs[1]);
                ZeroCountState nx = detail::classify_zero_cells(next_cells, k_trunc);
                unsigned k = k_trunc;
                auto expect = [&](bool ok, const char* what) {
                    ++report.rows_checked;
                    if (!ok) fail(what);
                };
                if (cs[0] == 1 && cs[1] == 1) {
                    expect(nx.c == st.l[0], "(+,+) c' = l1");
                    expect(nx.u[0] == 2 * st.c, "(+,+) u1' = 2c");
                    expect(nx.l[0] == st.l[0] + st.l[1], "(+,+) l1' = l1 + l2");
                    for (unsigned i = 2; i < k; ++i)
                        expect(nx.u[i - 1] == st.u[i - 2], "(+,+) u_i' = u_{i-1}");
                    expect(nx.u[k - 1] == st.u[k - 2] + st.u[k - 1], "(+,+) uk' = u_{k-1}+u_k");
                    for (unsigned i = 2; i + 1 < k; ++i)
                        expect(nx.l[i - 1] == st.l[i], "(+,+) l_i' = l_{i+1}");
                    expect(nx.l[k - 2] <= st.l[k - 1], "(+,+) l_{k-1}' <= l_k");
                    expect(nx.l[k - 1] <= st.l[k - 1], "(+,+) lk' <= lk");
                } else if (cs[0] == -1 && cs[1] == -1) {
                    expect(nx.c == st.u[0], "(-,-) c' = u1");
                    expect(nx.l[0] == 2 * st.c, "(-,-) l1' = 2c");
                    expect(nx.u[0] == st.u[0] + st.u[1], "(-,-) u1' = u1 + u2");
                    for (unsigned i = 2; i < k; ++i)
                        expect(nx.l[i - 1] == st.l[i - 2], "(-,-) l_i' = l_{i-1}");
                    expect(nx.l[k - 1] == st.l[k - 2] + st.l[k - 1], "(-,-) lk' = l_{k-1}+l_k");
                    for (unsigned i = 2; i + 1 < k; ++i)
                        expect(nx.u[i - 1] == st.u[i], "(-,-) u_i' = u_{i+1}");
                    expect(nx.u[k - 2] <= st.u[k - 1], "(-,-) u_{k-1}' <= u_k");
                    expect(nx.u[k - 1] <= st.u[k - 1], "(-,-) uk' <= uk");
                } else if (cs[0] == 1) {
                    expect(nx.c == 2 * st.c, "(+,-) c' = 2c");
                    expect(nx.u[0] == 2 * st.c + st.u[0], "(+,-) u1' = 2c + u1");
                    for (unsigned i = 2; i <= k; ++i)
                        expect(nx.u[i - 1] == st.u[i - 1], "(+,-) u_i' = u_i");
                    for (unsigned i = 1; i <= k; ++i)
                        expect(nx.l[i - 1] == st.l[i - 1], "(+,-) l_i' = l_i");
                } else {
                    expect(nx.c == 2 * st.c, "(-,+) c' = 2c");
                    expect(nx.l[0] == 2 * st.c + st.l[0], "(-,+) l1' = 2c + l1");
                    for (unsigned i = 2; i <= k; ++i)
                        expect(nx.l[i - 1] == st.l[i - 1], "(-,+) l_i' = l_i");
                    for (unsigned i = 1; i <= k; ++i)
                        expect(nx.u[i - 1] == st.u[i - 1], "(-,+) u_i' = u_i");
                }
                auto xv = nx.sigma_vector();
                for (unsigned i = 0; i <= k_trunc; ++i) avg[i] += xv[i];
            }
            for (auto& v : avg) v = v / Rational(4);
            auto bound = Ak.apply(st.sigma_vector());
            for (unsigned i = 0; i <= k_trunc; ++i) {
                ++report.rows_checked;
                if (avg[i] > bound[i]) fail("E(x') <= A_k x violated");
            }
        }
    }
    return report;
}

}  // namespace takagi
