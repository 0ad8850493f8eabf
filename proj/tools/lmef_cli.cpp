// Command-line driver: run experiment grids, print effective configs, dump reference fronts.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "lmef/error.hpp"
#include "lmef/experiment.hpp"
#include "lmef/problems.hpp"

namespace {

// Config keys that can be overridden from the command line, with help text.
const std::vector<std::pair<std::string, std::string>> kOverrides = {
    {"problem", "problem ids, comma separated (LSMOP1..LSMOP9)"},
    {"n", "decision-space sizes, comma separated"},
    {"m", "objective counts, comma separated"},
    {"algo", "algorithms: nsga2, gan-nsga2, ip-nsga2"},
    {"seeds", "seeds, comma separated"},
    {"evals", "evaluation budget per run"},
    {"population", "population size N"},
    {"k", "number of clusters"},
    {"sigma", "selection ratio"},
    {"epsilon", "phase-1 budget fraction"},
    {"perturbation_std", "latent perturbation standard deviation"},
    {"pair_cap", "in-cluster pair cap (0: population size)"},
    {"gan_epochs", "GAN training epochs per iteration"},
    {"gan_learning_rate", "GAN learning rate"},
    {"gan_optimizer", "adam or sgd"},
    {"generator_loss", "non-saturating or minimax"},
    {"gan_hidden_layers", "hidden layers in each network"},
    {"warm_start", "reuse GAN weights across iterations (true/false)"},
    {"igd_form", "squared or plain"},
    {"reference_points", "reference front size (0: default)"},
    {"out", "output directory"},
};

struct ConfigOptions {
    std::string config_path;
    std::map<std::string, std::string> values;
    bool serial = false;
    bool parallel = false;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "key = value config file")->check(CLI::ExistingFile);
    for (const auto& [key, help] : kOverrides) cmd->add_option("--" + key, opts.values[key], help);
    auto* serial = cmd->add_flag("--serial", opts.serial, "run cells one at a time");
    cmd->add_flag("--parallel", opts.parallel, "run cells on a worker pool")->excludes(serial);
}

lmef::ExperimentConfig resolve(CLI::App* cmd, const ConfigOptions& opts) {
    lmef::ExperimentConfig config = opts.config_path.empty() ? lmef::ExperimentConfig{} : lmef::load_config(opts.config_path);
    for (const auto& [key, help] : kOverrides) {
        if (cmd->count("--" + key) > 0) lmef::apply_setting(config, key, opts.values.at(key));
    }
    if (opts.serial) config.serial = true;
    if (opts.parallel) config.serial = false;
    config.validate();
    return config;
}

int run(CLI::App* cmd, const ConfigOptions& opts) {
    const auto config = resolve(cmd, opts);
    const auto result = lmef::run_experiment(config);
    for (const auto& row : result.summary) {
        fmt::print("{:<10} {:<7} n={:<5} m={} runs={} igd={:.4e} sp={:.4e}\n", row.algorithm, row.problem, row.n, row.m,
                   row.runs, row.igd_mean, row.sp_mean);
    }
    for (const auto& cell : result.cells) {
        if (!cell.record.ok()) {
            fmt::print(stderr, "{} {} n={} m={} seed={}: {}\n", cell.record.algorithm, cell.record.problem,
                       cell.record.n, cell.record.m, cell.record.seed, cell.record.status);
        }
    }
    fmt::print("{} cells, {} failed, results in {}\n", result.cells.size(), result.failures, config.output_dir);
    return result.failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GAN-LMEF experiment driver"};
    app.require_subcommand(1);

    ConfigOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "run an experiment grid and write CSV results");
    add_config_options(run_cmd, run_opts);

    ConfigOptions show_opts;
    auto* config_cmd = app.add_subcommand("config", "print the effective configuration");
    add_config_options(config_cmd, show_opts);

    std::string front_problem = "LSMOP1";
    std::size_t front_n = 100, front_m = 2, front_count = 0;
    std::string front_out;
    auto* front_cmd = app.add_subcommand("front", "write a sampled reference Pareto front as CSV");
    front_cmd->add_option("--problem", front_problem, "problem id");
    front_cmd->add_option("--n", front_n, "decision-space size");
    front_cmd->add_option("--m", front_m, "objective count");
    front_cmd->add_option("--count", front_count, "number of points (0: default)");
    front_cmd->add_option("-o,--output", front_out, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(run_cmd, run_opts);
        if (*config_cmd) {
            std::cout << lmef::emit_config(resolve(config_cmd, show_opts));
            return 0;
        }
        if (*front_cmd) {
            lmef::Problem problem(lmef::parse_problem_id(front_problem), front_n, front_m);
            const auto front =
                lmef::sample_reference_front(problem, front_count ? front_count : lmef::default_reference_size(front_m));
            std::ofstream file;
            if (!front_out.empty()) {
                file.open(front_out);
                if (!file) throw lmef::Error("cannot write " + front_out);
            }
            std::ostream& out = front_out.empty() ? std::cout : file;
            for (std::size_t j = 0; j < front_m; ++j) out << (j ? ",f" : "f") << j + 1;
            out << '\n';
            for (const auto& p : front.points) {
                for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << fmt::format("{}", p[j]);
                out << '\n';
            }
            return 0;
        }
    } catch (const lmef::PreconditionError& e) {
        fmt::print(stderr, "invalid configuration: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
