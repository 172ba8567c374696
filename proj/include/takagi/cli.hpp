#pragma once

#include <atomic>
#include <cstdio>
#include <set>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "takagi/constructions.hpp"
#include "takagi/io.hpp"
#include "takagi/levelsets.hpp"
#include "takagi/piecewise.hpp"
#include "takagi/randomsim.hpp"
#include "takagi/spectra.hpp"

namespace takagi {

// Every run is fully determined by its config; the exit status encodes the
// failure class: 0 ok, 1 domain error, 2 identity/assertion failure,
// 3 resource guard.
struct RunConfig {
    std::string command;
    std::string function = "all-plus";  // provider spec, inline or @file
    std::string y = "0";
    unsigned depth = 12;
    unsigned min_depth = 5;
    unsigned max_depth = 20;
    int slope = 1;
    std::string intercept = "0";
    std::string target = "level";  // dimension command: level | max
    int model = 2;
    std::string p = "1/2";
    uint64_t trials = 100;
    uint64_t seed_base = 1;
    unsigned jobs = 1;
    unsigned max_len = 8;
    std::string matrices_file;
    std::string format = "csv";  // csv | json | svg
    std::string out = "-";       // output path; "-" = stdout
    bool mc = false;             // selftest: include the statistical suite
};

namespace detail {

inline ProviderPtr load_provider(const std::string& spec) {
    if (!spec.empty() && spec[0] == '@') {
        std::ifstream f(spec.substr(1));
        if (!f) throw std::domain_error("--function: cannot read file " + spec.substr(1));
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_provider(ss.str());
    }
    return parse_provider(spec);
}

inline void emit(const std::string& out, const std::string& content) {
    if (out == "-") std::cout << content;
    else write_file(out, content);
}

inline std::string with_suffix(const std::string& out, const std::string& suffix) {
    if (out == "-") return out;
    auto dot = out.rfind('.');
    if (dot == std::string::npos) return out + suffix;
    return out.substr(0, dot) + suffix + out.substr(dot);
}

inline ConfigEcho base_echo(const RunConfig& cfg) {
    ConfigEcho e;
    e["command"] = cfg.command;
    static const std::set<std::string> uses_function{"render", "levelset", "dimension", "line"};
    if (uses_function.count(cfg.command)) e["function"] = cfg.function;
    return e;
}

// Named matrices accepted by the `matrices` command and the jsr file parser.
inline RationalMatrix named_matrix(const std::string& name) {
    if (name == "A") return matrix_A();
    if (name == "B") return matrix_B();
    if (name == "M") return matrix_M();
    if (name == "Mhat") return matrix_Mhat();
    if (name == "E") return matrix_E();
    if (name == "F") return matrix_F();
    if (name == "G" || name == "FE") return matrix_G();
    if (name == "D") return matrix_D();
    throw std::domain_error("unknown matrix name: " + name);
}

// Text format: blocks of rows of rationals separated by blank lines; a
// leading "# name" line labels the block.
inline void parse_matrix_file(const std::string& path, std::vector<RationalMatrix>& mats,
                              std::vector<std::string>& names) {
    std::ifstream f(path);
    if (!f) throw std::domain_error("--matrices: cannot read file " + path);
    std::vector<std::vector<Rational>> rows;
    std::string pending_name;
    auto flush = [&]() {
        if (rows.empty()) return;
        unsigned d = static_cast<unsigned>(rows.size());
        RationalMatrix m(d);
        for (unsigned i = 0; i < d; ++i) {
            if (rows[i].size() != d)
                throw std::domain_error("matrix file: block is not square");
            for (unsigned j = 0; j < d; ++j) m.at(i, j) = rows[i][j];
        }
        mats.push_back(std::move(m));
        names.push_back(pending_name.empty() ? "M" + std::to_string(mats.size() - 1)
                                             : pending_name);
        rows.clear();
        pending_name.clear();
    };
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) { flush(); continue; }
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            ls >> pending_name;
            continue;
        }
        std::istringstream ls(line);
        std::vector<Rational> row;
        std::string tok;
        while (ls >> tok) row.push_back(Rational::parse(tok));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    flush();
    if (mats.empty()) throw std::domain_error("matrix file: no matrices found");
}

// ---------------------------------------------------------------------------
// simulate: parallel over seeds, aggregated by a single writer in seed order

inline nlohmann::json trial_json(const TrialRecord& rec) {
    nlohmann::json j;
    j["model"] = rec.model;
    j["seed"] = rec.seed;
    j["p"] = rec.p.to_string();
    j["depth"] = rec.depth;
    j["observables"] = rec.observables;
    return j;
}

inline std::string run_simulation(int model, const Rational& p, uint64_t trials, unsigned depth,
                                  uint64_t seed_base, unsigned jobs) {
    std::vector<TrialRecord> records(trials);
    std::atomic<uint64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            uint64_t i = next.fetch_add(1);
            if (i >= trials) return;
            records[i] = run_trial(model, seed_base + i, p, depth);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::string out;
    for (const auto& rec : records) {
        out += trial_json(rec).dump();
        out += '\n';
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// selftest: the exact identity suites, plus the statistical suite on demand

struct SelftestResult {
    std::vector<std::pair<std::string, bool>> items;
    bool all_passed() const {
        for (const auto& [n, ok] : items)
            if (!ok) return false;
        return true;
    }
};

inline SelftestResult selftest(bool include_mc = false, std::ostream& log = std::cout) {
    SelftestResult result;
    auto run_item = [&](const std::string& name, auto&& fn) {
        bool ok = true;
        std::string detail;
        try {
            fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        result.items.emplace_back(name, ok);
        log << (ok ? "PASS" : "FAIL") << "  " << name;
        if (!ok) log << "  (" << detail << ")";
        log << "\n";
    };

    run_item("matrix transcriptions", [] {
        if (matrix_M() != RationalMatrix{{6, 4, 0}, {6, 3, 0}, {0, 1, 0}})
            throw std::logic_error("M = BA mismatch");
        if (matrix_G() != RationalMatrix{{6, 0, 4}, {6, 0, 4}, {6, 0, 3}})
            throw std::logic_error("G = FE mismatch");
        RationalMatrix e2 = matrix_E() * matrix_E();
        if (e2 != RationalMatrix{{6, 0, 3}, {8, 0, 4}, {6, 0, 3}})
            throw std::logic_error("E^2 mismatch");
        RationalMatrix ef = matrix_E() * matrix_F();
        if (ef != RationalMatrix{{6, 2, 1}, {8, 2, 2}, {6, 2, 1}})
            throw std::logic_error("EF mismatch");
        RationalMatrix f3e = matrix_F().pow(3) * matrix_E();
        if (f3e != RationalMatrix{{54, 0, 36}, {54, 0, 36}, {54, 0, 35}})
            throw std::logic_error("F^3E mismatch");
        Polynomial mhat_poly({Rational(-6), Rational(-9), Rational(1)});
        if (char_poly(matrix_Mhat()) != mhat_poly)
            throw std::logic_error("char poly of Mhat mismatch");
    });
    run_item("joint-spectral-radius identities", [] { verify_jsr_identities(); });
    run_item("zeta/xi recursions equal characteristic polynomials", [] {
        for (unsigned k = 2; k <= 8; ++k) {
            ZetaXi zx = zeta_xi(k);
            if (zx.zeta != char_poly(a_k_truncated(k)))
                throw std::logic_error("zeta_" + std::to_string(k));
            if (zx.xi != char_poly(a_k_full(k)))
                throw std::logic_error("xi_" + std::to_string(k));
        }
    });
    run_item("four-case transition table", [] { four_case_table_check(4, 24, 8, 20250101); });
    run_item("grid invariants under random refinement", [] {
        for (uint64_t seed = 1; seed <= 20; ++seed) {
            SeededModel2Provider provider(seed, Rational(1, 2));
            GridFunction gf = GridFunction::root();
            for (unsigned n = 1; n <= 12; ++n) {
                gf = GridFunction::refine(gf, provider);
                if (gf.value(0) != 0 || gf.value(gf.cell_count()) != 0)
                    throw std::logic_error("boundary values");
                for (uint64_t j = 0; j < gf.cell_count(); ++j) {
                    int32_t s = gf.slope(j);
                    if (std::abs(s) > static_cast<int32_t>(n) ||
                        (s - static_cast<int32_t>(n)) % 2 != 0)
                        throw std::logic_error("slope range/parity");
                    if (n % 2 == 0 && gf.value(j) % 2 != 0)
                        throw std::logic_error("even-depth parity");
                }
            }
        }
    });
    run_item("extremal two-stage counts equal Mhat powers", [] {
        ExtremalConstruction ext = extremal_flexible(8, false);
        for (unsigned m = 0; m <= 4; ++m) {
            RationalMatrix mp = matrix_Mhat().pow(m);
            if (Rational(static_cast<long long>(ext.type_counts[2 * m][0])) != mp.at(0, 0) ||
                Rational(static_cast<long long>(ext.type_counts[2 * m][1])) != mp.at(1, 0))
                throw std::logic_error("stage " + std::to_string(2 * m));
        }
    });

    if (include_mc) {
        run_item("mc: z-shape probability (p=0.6)", [] {
            Estimate e = mc_z_shape_probability(Rational(3, 5), 20000, 2000, 11001);
            double tol = 3 * e.std_error + e.bias_bound;
            if (std::abs(e.mean - 2.0 / 3.0) > tol) throw std::logic_error("outside 3 sigma");
        });
        run_item("mc: GW survival (p=0.8)", [] {
            GwMaximum gw = mc_gw_maximum(Rational(4, 5), 4000, 40, 12001);
            double tol = 3 * gw.survival.std_error + gw.survival.bias_bound;
            if (std::abs(gw.survival.mean - 0.546875) > tol) throw std::logic_error("outside 3 sigma");
        });
        run_item("mc: hitting-time pgf (r=0.7)", [] {
            HittingTimeSamples h = hitting_time_tools(1, 40000, 10000, 13001);
            Estimate e = h.pgf_at(0.7);
            if (std::abs(e.mean - psi1(0.7)) > 3 * e.std_error + e.bias_bound)
                throw std::logic_error("outside 3 sigma");
        });
    }
    return result;
}

// ---------------------------------------------------------------------------
// Command dispatch

inline int run(const RunConfig& cfg) {
    try {
        ConfigEcho echo = detail::base_echo(cfg);
        if (cfg.command == "render") {
            ProviderPtr f = detail::load_provider(cfg.function);
            echo["depth"] = std::to_string(cfg.depth);
            GridFunction gf = GridFunction::build(*f, cfg.depth);
            if (cfg.format == "svg") detail::emit(cfg.out, grid_svg(gf, echo));
            else detail::emit(cfg.out, grid_csv(gf, echo));
            return 0;
        }
        if (cfg.command == "levelset") {
            ProviderPtr f = detail::load_provider(cfg.function);
            Rational y = Rational::parse(cfg.y);
            echo["y"] = y.to_string();
            echo["max-depth"] = std::to_string(cfg.max_depth);
            CoverReport cover = cover_level(*f, y, cfg.max_depth);
            if (cfg.format == "json") detail::emit(cfg.out, cover_json(cover, echo).dump(2) + "\n");
            else {
                detail::emit(cfg.out, cover_csv(cover, echo));
                if (cfg.out != "-")
                    detail::emit(detail::with_suffix(cfg.out, "_cells"), cover_cells_csv(cover, echo));
            }
            return 0;
        }
        if (cfg.command == "dimension") {
            ProviderPtr f = detail::load_provider(cfg.function);
            echo["target"] = cfg.target;
            echo["max-depth"] = std::to_string(cfg.max_depth);
            CoverReport cover;
            if (cfg.target == "max") {
                cover = max_set_cover(*f, cfg.max_depth);
            } else {
                Rational y = Rational::parse(cfg.y);
                echo["y"] = y.to_string();
                cover = cover_level(*f, y, cfg.max_depth);
            }
            detail::emit(cfg.out, cover_json(cover, echo).dump(2) + "\n");
            return 0;
        }
        if (cfg.command == "jsr") {
            std::vector<RationalMatrix> mats;
            std::vector<std::string> names;
            if (!cfg.matrices_file.empty()) {
                detail::parse_matrix_file(cfg.matrices_file, mats, names);
            } else {
                mats = {matrix_E(), matrix_F()};
                names = {"E", "F"};
            }
            JsrBracket br = jsr_bracket(mats, cfg.max_len, names);
            nlohmann::json j;
            echo["max-len"] = std::to_string(cfg.max_len);
            echo["norm"] = "entry-sum";
            j["config"] = echo;
            j["lower"] = br.lower;
            j["upper"] = br.upper;
            j["witness"] = br.witness;
            j["witness_length"] = br.witness_len;
            j["upper_by_length"] = br.upper_by_len;
            detail::emit(cfg.out, j.dump(2) + "\n");
            return 0;
        }
        if (cfg.command == "extremal") {
            echo["depth"] = std::to_string(cfg.depth);
            if (cfg.depth > 13) throw std::domain_error("--depth: extremal construction is capped at 13");
            ExtremalConstruction ext = extremal_flexible(cfg.depth, cfg.depth <= 8);
            std::string base = cfg.out == "-" ? "extremal" : cfg.out;
            write_file(base + ".provider", ext.provider->serialize());
            std::string csv = csv_header(echo) + "stage,y,type1,type2,type3\n";
            for (size_t n = 0; n < ext.baselines.size(); ++n) {
                csv += std::to_string(n) + "," + ext.baselines[n].y.to_decimal() + "," +
                       std::to_string(ext.type_counts[n][0]) + "," +
                       std::to_string(ext.type_counts[n][1]) + "," +
                       std::to_string(ext.type_counts[n][2]) + "\n";
            }
            write_file(base + "_baselines.csv", csv);
            if (!ext.stages.empty()) {
                std::string cells = csv_header(echo) + "stage,j,slope,type\n";
                for (const auto& st : ext.stages)
                    for (const auto& c : st.cells)
                        cells += std::to_string(st.stage) + "," + std::to_string(c.j) + "," +
                                 std::to_string(c.slope) + "," + std::to_string(c.type) + "\n";
                write_file(base + "_cells.csv", cells);
            }
            std::cout << "baseline limit 8/17; wrote " << base << ".provider\n";
            return 0;
        }
        if (cfg.command == "gray") {
            echo["depth"] = std::to_string(cfg.depth);
            nlohmann::json j;
            j["config"] = echo;
            GrayZeroPoints zp = gray_zero_points(std::max(1u, cfg.depth / 2));
            std::vector<std::string> xs;
            for (const auto& x : zp.x) xs.push_back(x.to_string());
            j["zero_points"] = xs;
            j["x_star"] = zp.x_star.to_string();
            j["zero_set_dimension"] = gray_zero_moran_dimension();
            GrayTwoFifths tf = gray_level_two_fifths(std::max(1u, cfg.depth / 2));
            nlohmann::json stages = nlohmann::json::array();
            for (const auto& st : tf.stages) {
                nlohmann::json s;
                s["stage"] = st.stage;
                s["upright"] = st.upright;
                s["baseline"] = st.baseline.to_rational().to_string();
                s["copies"] = st.left_cells.size();
                stages.push_back(s);
            }
            j["two_fifths_stages"] = stages;
            j["two_fifths_dimension"] = moran_dimension({{2, Rational(1, 4)}});
            detail::emit(cfg.out, j.dump(2) + "\n");
            return 0;
        }
        if (cfg.command == "line") {
            ProviderPtr f = detail::load_provider(cfg.function);
            Rational b = Rational::parse(cfg.intercept);
            LineReduction red = line_reduction(f, cfg.slope, b);
            echo["slope"] = std::to_string(cfg.slope);
            echo["intercept"] = b.to_string();
            std::string base = cfg.out == "-" ? "line" : cfg.out;
            write_file(base + ".provider", red.g->serialize());
            nlohmann::json j;
            j["config"] = echo;
            j["level"] = red.level.to_string();
            j["shift"] = red.shift;
            j["provider_file"] = base + ".provider";
            detail::emit(cfg.out == "-" ? "-" : base + ".json", j.dump(2) + "\n");
            return 0;
        }
        if (cfg.command == "simulate") {
            Rational p = Rational::parse(cfg.p);
            echo["model"] = std::to_string(cfg.model);
            echo["p"] = p.to_string();
            echo["trials"] = std::to_string(cfg.trials);
            echo["depth"] = std::to_string(cfg.depth);
            echo["seed-base"] = std::to_string(cfg.seed_base);
            std::string jsonl =
                detail::run_simulation(cfg.model, p, cfg.trials, cfg.depth, cfg.seed_base, cfg.jobs);
            detail::emit(cfg.out, jsonl);
            return 0;
        }
        if (cfg.command == "matrices") {
            std::string out;
            for (const char* name : {"E", "F", "A", "B", "M", "Mhat", "D"}) {
                out += "# " + std::string(name) + "\n";
                out += detail::named_matrix(name).to_string();
                out += "\n";
            }
            detail::emit(cfg.out, out);
            return 0;
        }
        if (cfg.command == "selftest") {
            SelftestResult r = selftest(cfg.mc);
            return r.all_passed() ? 0 : 2;
        }
        throw std::domain_error("unknown command: " + cfg.command);
    } catch (const std::length_error& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        // logic_error covers violated identities and contract assertions
        if (dynamic_cast<const std::domain_error*>(&e) ||
            dynamic_cast<const std::invalid_argument*>(&e)) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace takagi
