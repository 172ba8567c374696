// Command-line front end for the takagi level-set library.
//
// Subcommands: render, levelset, dimension, jsr, extremal, gray, line,
// simulate, matrices, selftest. Rationals are given as "num/den" (dyadics as
// "k/2^n"); providers inline ("all-plus", "gray", "model2 seed=7 p=1/2", ...)
// or as "@file".

#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "takagi/cli.hpp"

namespace {

// Flat `key = value` config files; command-line flags take precedence.
int apply_config_file(const std::string& path, CLI::App* sub, takagi::RunConfig& cfg) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "--config: cannot read file " << path << "\n";
        return 1;
    }
    std::map<std::string, std::function<void(const std::string&)>> setters{
        {"function", [&](const std::string& v) { cfg.function = v; }},
        {"y", [&](const std::string& v) { cfg.y = v; }},
        {"depth", [&](const std::string& v) { cfg.depth = std::stoul(v); }},
        {"max-depth", [&](const std::string& v) { cfg.max_depth = std::stoul(v); }},
        {"slope", [&](const std::string& v) { cfg.slope = std::stoi(v); }},
        {"intercept", [&](const std::string& v) { cfg.intercept = v; }},
        {"target", [&](const std::string& v) { cfg.target = v; }},
        {"model", [&](const std::string& v) { cfg.model = std::stoi(v); }},
        {"p", [&](const std::string& v) { cfg.p = v; }},
        {"trials", [&](const std::string& v) { cfg.trials = std::stoull(v); }},
        {"seed-base", [&](const std::string& v) { cfg.seed_base = std::stoull(v); }},
        {"jobs", [&](const std::string& v) { cfg.jobs = std::stoul(v); }},
        {"max-len", [&](const std::string& v) { cfg.max_len = std::stoul(v); }},
        {"matrices", [&](const std::string& v) { cfg.matrices_file = v; }},
        {"format", [&](const std::string& v) { cfg.format = v; }},
        {"out", [&](const std::string& v) { cfg.out = v; }},
    };
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--config: expected key = value, got: " << line << "\n";
            return 1;
        }
        auto trim = [](std::string s2) {
            size_t a = s2.find_first_not_of(" \t");
            size_t b = s2.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s2.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) {
            std::cerr << "--config: unknown key '" << key << "'\n";
            return 1;
        }
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr && key == "out") opt = sub->get_option_no_throw("-o");
        if (opt != nullptr && opt->count() > 0) continue;  // flag overrides file
        it->second(value);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Level sets of generalized Takagi functions"};
    app.require_subcommand(1);

    takagi::RunConfig cfg;

    auto add_function = [&](CLI::App* cmd) {
        cmd->add_option("--function", cfg.function,
                        "Sign provider: all-plus | alternating | gray | rademacher-product | "
                        "constant-levels <+-..> | model1/2 seed=S p=R | @file");
    };
    std::string config_path;
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("-o,--out", cfg.out, "Output path ('-' = stdout)");
        cmd->add_option("--format", cfg.format, "csv | json | svg");
        cmd->add_option("--config", config_path, "Flat key=value config file; flags override");
    };

    CLI::App* render = app.add_subcommand("render", "Plot a partial sum f_n");
    add_function(render);
    render->add_option("--depth", cfg.depth, "Grid depth n");
    add_out(render);

    CLI::App* levelset = app.add_subcommand("levelset", "Cover of the level set L_f(y)");
    add_function(levelset);
    levelset->add_option("--y", cfg.y, "Level, as a rational");
    levelset->add_option("--max-depth", cfg.max_depth, "Deepest refinement");
    add_out(levelset);

    CLI::App* dimension = app.add_subcommand("dimension", "Box-dimension fit of a cover");
    add_function(dimension);
    dimension->add_option("--y", cfg.y, "Level (ignored for --target max)");
    dimension->add_option("--target", cfg.target, "level | max");
    dimension->add_option("--max-depth", cfg.max_depth, "Deepest refinement");
    add_out(dimension);

    CLI::App* jsr = app.add_subcommand("jsr", "Joint-spectral-radius bracket");
    jsr->add_option("--matrices", cfg.matrices_file,
                    "Matrix file (rows of rationals, blank-line separated); default {E,F}");
    jsr->add_option("--max-len", cfg.max_len, "Longest product length");
    std::string norm = "entry-sum";
    jsr->add_option("--norm", norm, "Matrix norm (only entry-sum)")
        ->check(CLI::IsMember({"entry-sum"}));
    add_out(jsr);

    CLI::App* extremal = app.add_subcommand("extremal", "The flexible-class extremal function");
    extremal->add_option("--depth", cfg.depth, "Construction stages (<= 13)");
    add_out(extremal);

    CLI::App* gray = app.add_subcommand("gray", "Gray Takagi special sets");
    gray->add_option("--depth", cfg.depth, "Stages to report");
    add_out(gray);

    CLI::App* line = app.add_subcommand("line", "Reduce a slope-m line to a level set");
    add_function(line);
    line->add_option("--slope", cfg.slope, "Integer slope m");
    line->add_option("--intercept", cfg.intercept, "Intercept b, as a rational");
    add_out(line);

    CLI::App* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo trials");
    simulate->add_option("--model", cfg.model, "1 or 2");
    simulate->add_option("--p", cfg.p, "Success probability, as a rational");
    simulate->add_option("--trials", cfg.trials, "Number of seeds");
    simulate->add_option("--depth", cfg.depth, "Refinement depth (even)");
    simulate->add_option("--seed-base", cfg.seed_base, "First seed");
    simulate->add_option("--jobs", cfg.jobs, "Worker threads");
    add_out(simulate);

    CLI::App* matrices = app.add_subcommand("matrices", "Emit the named matrices");
    add_out(matrices);

    CLI::App* selftest = app.add_subcommand("selftest", "Exact identity suites");
    selftest->add_flag("--mc", cfg.mc, "Also run the statistical suite");

    CLI11_PARSE(app, argc, argv);

    CLI::App* active = nullptr;
    for (CLI::App* sub : app.get_subcommands()) {
        cfg.command = sub->get_name();
        active = sub;
    }
    if (!config_path.empty()) {
        int rc = apply_config_file(config_path, active, cfg);
        if (rc != 0) return rc;
    }
    return takagi::run(cfg);
}
