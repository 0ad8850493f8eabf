#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lmef/gan.hpp"
#include "lmef/lmef.hpp"
#include "lmef/metrics.hpp"
#include "lmef/problems.hpp"

namespace lmef {

enum class Algorithm { Nsga2, GanNsga2, IpNsga2 };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

/// Experiment grid plus every tunable of the runs. Text form is one
/// `key = value` per line; lists are comma separated; `#` starts a comment.
struct ExperimentConfig {
    std::vector<ProblemId> problems{ProblemId::LSMOP1};
    std::vector<std::size_t> n_values{500};
    std::vector<std::size_t> m_values{2};
    std::vector<Algorithm> algorithms{Algorithm::Nsga2, Algorithm::GanNsga2};
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t evaluations = 100000;
    std::size_t population = 100;
    std::size_t k = 3;
    double sigma = 0.4;
    double epsilon = 0.1;
    double perturbation_std = 0.1;
    std::size_t pair_cap = 0;
    std::size_t gan_epochs = 200;
    double gan_learning_rate = 0.001;
    GanOptimizer gan_optimizer = GanOptimizer::Sgd;
    GeneratorLoss generator_loss = GeneratorLoss::NonSaturating;
    std::size_t gan_hidden_layers = 1;
    bool warm_start = false;
    IgdForm igd_form = IgdForm::Squared;
    std::size_t reference_points = 0;  // 0: 1000 for m = 2, 5000 otherwise
    std::string output_dir = "results";
    bool serial = true;

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws PreconditionError on empty lists, n < m, or invalid run settings.
    void validate() const;
    LmefConfig lmef_config() const;
};

/// Applies one key/value pair. Throws PreconditionError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
ExperimentConfig parse_config(std::string_view text);
std::string emit_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Everything a single (problem, n, m, algorithm, seed) cell produces.
struct CellResult {
    RunRecord record;
    std::vector<IterationLog> iterations;
};

CellResult run_cell(const ExperimentConfig& config, ProblemId problem, std::size_t n, std::size_t m,
                    Algorithm algorithm, std::uint64_t seed);

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::vector<SummaryRow> summary;
    std::size_t failures = 0;

    std::vector<RunRecord> records() const;
};

/// Runs every cell of the grid and writes runs.csv, traces.csv,
/// iterations.csv, summary.csv and config.txt under config.output_dir.
/// Throws Error when the output directory cannot be created or written.
/// Failed cells are recorded with their error in the status column.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV emitters; headers are stable and documented in docs/csv_schemas.md.
void write_runs_csv(std::ostream& out, const std::vector<CellResult>& cells, IgdForm form);
void write_traces_csv(std::ostream& out, const std::vector<CellResult>& cells);
void write_iterations_csv(std::ostream& out, const std::vector<CellResult>& cells);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, IgdForm form);

inline constexpr std::string_view kRunsHeader =
    "algorithm,problem,n,m,seed,evaluations,igd_form,igd,sp,front_size,status";
inline constexpr std::string_view kTracesHeader = "algorithm,problem,n,m,seed,evaluations,igd";
inline constexpr std::string_view kIterationsHeader =
    "algorithm,problem,n,m,seed,iteration,eval_count,nondominated,"
    "generated_between_clusters,generated_in_cluster,generated_perturbation,generated_direct_ip,"
    "accepted_between_clusters,accepted_in_cluster,accepted_perturbation,accepted_direct_ip,"
    "accepted_total,evaluated,best_norm,median_norm";
inline constexpr std::string_view kSummaryHeader =
    "algorithm,problem,n,m,runs,igd_form,igd_mean,igd_variance,sp_mean,sp_variance";

} // namespace lmef
