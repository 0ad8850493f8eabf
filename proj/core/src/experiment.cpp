#include "lmef/experiment.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "lmef/error.hpp"
#include "lmef/pareto.hpp"
#include "lmef/solver.hpp"

namespace lmef {

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Nsga2: return "nsga2";
    case Algorithm::GanNsga2: return "gan-nsga2";
    case Algorithm::IpNsga2: return "ip-nsga2";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "nsga2") return Algorithm::Nsga2;
    if (text == "gan-nsga2") return Algorithm::GanNsga2;
    if (text == "ip-nsga2") return Algorithm::IpNsga2;
    throw PreconditionError("unknown algorithm '" + std::string(text) + "' (expected nsga2|gan-nsga2|ip-nsga2)");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> items;
    while (true) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (!item.empty()) items.push_back(item);
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return items;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw PreconditionError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw PreconditionError("config key '" + std::string(key) + "': expected true/false, got '" + std::string(text) + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view key, std::string_view value, F&& parse_one) {
    std::vector<T> out;
    for (auto item : split_list(value)) out.push_back(parse_one(item));
    if (out.empty()) throw PreconditionError("config key '" + std::string(key) + "': empty list");
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& fmt_one) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt_one(xs[i]);
    }
    return out;
}

std::string_view optimizer_name(GanOptimizer o) { return o == GanOptimizer::Adam ? "adam" : "sgd"; }
std::string_view loss_name(GeneratorLoss l) { return l == GeneratorLoss::NonSaturating ? "non-saturating" : "minimax"; }

} // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "problem") {
        c.problems = parse_list<ProblemId>(key, value, parse_problem_id);
    } else if (key == "n") {
        c.n_values = parse_list<std::size_t>(key, value, [&](auto v) { return parse_number<std::size_t>(key, v); });
    } else if (key == "m") {
        c.m_values = parse_list<std::size_t>(key, value, [&](auto v) { return parse_number<std::size_t>(key, v); });
    } else if (key == "algo") {
        c.algorithms = parse_list<Algorithm>(key, value, parse_algorithm);
    } else if (key == "seeds") {
        c.seeds = parse_list<std::uint64_t>(key, value, [&](auto v) { return parse_number<std::uint64_t>(key, v); });
    } else if (key == "evals") {
        c.evaluations = parse_number<std::uint64_t>(key, value);
    } else if (key == "population") {
        c.population = parse_number<std::size_t>(key, value);
    } else if (key == "k") {
        c.k = parse_number<std::size_t>(key, value);
    } else if (key == "sigma") {
        c.sigma = parse_number<double>(key, value);
    } else if (key == "epsilon") {
        c.epsilon = parse_number<double>(key, value);
    } else if (key == "perturbation_std") {
        c.perturbation_std = parse_number<double>(key, value);
    } else if (key == "pair_cap") {
        c.pair_cap = parse_number<std::size_t>(key, value);
    } else if (key == "gan_epochs") {
        c.gan_epochs = parse_number<std::size_t>(key, value);
    } else if (key == "gan_learning_rate") {
        c.gan_learning_rate = parse_number<double>(key, value);
    } else if (key == "gan_optimizer") {
        if (value == "adam") c.gan_optimizer = GanOptimizer::Adam;
        else if (value == "sgd") c.gan_optimizer = GanOptimizer::Sgd;
        else throw PreconditionError("config key 'gan_optimizer': expected adam|sgd");
    } else if (key == "generator_loss") {
        if (value == "non-saturating") c.generator_loss = GeneratorLoss::NonSaturating;
        else if (value == "minimax") c.generator_loss = GeneratorLoss::Minimax;
        else throw PreconditionError("config key 'generator_loss': expected non-saturating|minimax");
    } else if (key == "gan_hidden_layers") {
        c.gan_hidden_layers = parse_number<std::size_t>(key, value);
    } else if (key == "warm_start") {
        c.warm_start = parse_bool(key, value);
    } else if (key == "igd_form") {
        c.igd_form = parse_igd_form(value);
    } else if (key == "reference_points") {
        c.reference_points = parse_number<std::size_t>(key, value);
    } else if (key == "out") {
        c.output_dir = std::string(value);
    } else if (key == "serial") {
        c.serial = parse_bool(key, value);
    } else {
        throw PreconditionError("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw PreconditionError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

std::string emit_config(const ExperimentConfig& c) {
    auto num = [](auto v) { return fmt::format("{}", v); };
    std::string out;
    out += "problem = " + join(c.problems, [](ProblemId id) { return to_string(id); }) + "\n";
    out += "n = " + join(c.n_values, num) + "\n";
    out += "m = " + join(c.m_values, num) + "\n";
    out += "algo = " + join(c.algorithms, [](Algorithm a) { return to_string(a); }) + "\n";
    out += "seeds = " + join(c.seeds, num) + "\n";
    out += "evals = " + num(c.evaluations) + "\n";
    out += "population = " + num(c.population) + "\n";
    out += "k = " + num(c.k) + "\n";
    out += "sigma = " + num(c.sigma) + "\n";
    out += "epsilon = " + num(c.epsilon) + "\n";
    out += "perturbation_std = " + num(c.perturbation_std) + "\n";
    out += "pair_cap = " + num(c.pair_cap) + "\n";
    out += "gan_epochs = " + num(c.gan_epochs) + "\n";
    out += "gan_learning_rate = " + num(c.gan_learning_rate) + "\n";
    out += fmt::format("gan_optimizer = {}\n", optimizer_name(c.gan_optimizer));
    out += fmt::format("generator_loss = {}\n", loss_name(c.generator_loss));
    out += "gan_hidden_layers = " + num(c.gan_hidden_layers) + "\n";
    out += fmt::format("warm_start = {}\n", c.warm_start);
    out += fmt::format("igd_form = {}\n", to_string(c.igd_form));
    out += "reference_points = " + num(c.reference_points) + "\n";
    out += "out = " + c.output_dir + "\n";
    out += fmt::format("serial = {}\n", c.serial);
    return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void ExperimentConfig::validate() const {
    require(!problems.empty(), "config: no problems");
    require(!n_values.empty() && !m_values.empty(), "config: n and m lists must be nonempty");
    require(!algorithms.empty(), "config: no algorithms");
    require(!seeds.empty(), "config: no seeds");
    for (std::size_t n : n_values) {
        for (std::size_t m : m_values) {
            require(m >= 2 && n >= m, "config: need m >= 2 and n >= m for every (n, m) pair");
        }
    }
    require(gan_hidden_layers >= 1, "config: gan_hidden_layers must be >= 1");
    lmef_config().validate();
}

LmefConfig ExperimentConfig::lmef_config() const {
    LmefConfig c;
    c.k = k;
    c.sigma = sigma;
    c.epsilon = epsilon;
    c.evaluations = evaluations;
    c.population = population;
    c.perturbation_std = perturbation_std;
    c.pair_cap = pair_cap;
    c.warm_start = warm_start;
    c.gan.epochs = gan_epochs;
    c.gan.learning_rate = gan_learning_rate;
    c.gan.optimizer = gan_optimizer;
    c.gan.generator_loss = generator_loss;
    c.shape.hidden_layers = gan_hidden_layers;
    c.execution = Execution::Serial;
    return c;
}

namespace {

std::vector<Vector> front_objectives(const Population& pop) {
    std::vector<Vector> out;
    if (pop.empty()) return out;
    for (std::size_t i : nondominated_indices(pop)) out.push_back(pop[i].f());
    return out;
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

CellResult run_cell(const ExperimentConfig& config, ProblemId id, std::size_t n, std::size_t m, Algorithm algorithm,
                    std::uint64_t seed) {
    CellResult cell;
    RunRecord& rec = cell.record;
    rec.algorithm = to_string(algorithm);
    rec.problem = to_string(id);
    rec.n = n;
    rec.m = m;
    rec.seed = seed;
    try {
        Problem problem(id, n, m);
        const std::size_t ref_count = config.reference_points ? config.reference_points : default_reference_size(m);
        const ReferenceFront reference = sample_reference_front(problem, ref_count);
        const VariationParams params = VariationParams::standard(n);
        Rng rng(seed);

        const GenerationObserver observer = [&](const Population& pop, std::uint64_t evals) {
            rec.trace.push_back({evals, igd(reference, front_objectives(pop), config.igd_form)});
        };

        Population final_pop;
        if (algorithm == Algorithm::Nsga2) {
            final_pop = nsga2_baseline(problem, config.population, config.evaluations, params, rng, observer);
        } else {
            LmefConfig lc = config.lmef_config();
            lc.mode = algorithm == Algorithm::GanNsga2 ? InterpolationMode::Gan : InterpolationMode::Direct;
            LmefResult result = gan_lmef_run(problem, lc, params, rng, observer);
            final_pop = std::move(result.population);
            cell.iterations = std::move(result.iterations);
        }

        rec.evaluations = problem.eval_count();
        const auto front = front_objectives(final_pop);
        rec.front_size = front.size();
        rec.igd = igd(reference, front, config.igd_form);
        rec.sp = front.size() >= 2 ? spacing(front) : std::numeric_limits<double>::quiet_NaN();
        if (rec.evaluations != config.evaluations) {
            rec.status = fmt::format("error: consumed {} evaluations, budget {}", rec.evaluations, config.evaluations);
        }
    } catch (const std::exception& e) {
        rec.status = sanitize(std::string("error: ") + e.what());
        rec.igd = std::numeric_limits<double>::quiet_NaN();
        rec.sp = std::numeric_limits<double>::quiet_NaN();
    }
    return cell;
}

std::vector<RunRecord> ExperimentResult::records() const {
    std::vector<RunRecord> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.record);
    return out;
}

void write_runs_csv(std::ostream& out, const std::vector<CellResult>& cells, IgdForm form) {
    out << kRunsHeader << '\n';
    for (const auto& c : cells) {
        const auto& r = c.record;
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", r.algorithm, r.problem, r.n, r.m, r.seed, r.evaluations,
                   to_string(form), r.igd, r.sp, r.front_size, r.status);
    }
}

void write_traces_csv(std::ostream& out, const std::vector<CellResult>& cells) {
    out << kTracesHeader << '\n';
    for (const auto& c : cells) {
        const auto& r = c.record;
        for (const auto& t : r.trace) {
            fmt::print(out, "{},{},{},{},{},{},{}\n", r.algorithm, r.problem, r.n, r.m, r.seed, t.evaluations, t.igd);
        }
    }
}

void write_iterations_csv(std::ostream& out, const std::vector<CellResult>& cells) {
    out << kIterationsHeader << '\n';
    for (const auto& c : cells) {
        const auto& r = c.record;
        for (const auto& it : c.iterations) {
            std::size_t accepted_total = 0;
            for (std::size_t a : it.accepted) accepted_total += a;
            fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.algorithm, r.problem, r.n,
                       r.m, r.seed, it.iteration, it.eval_count, it.nondominated, it.generated[0], it.generated[1],
                       it.generated[2], it.generated[3], it.accepted[0], it.accepted[1], it.accepted[2],
                       it.accepted[3], accepted_total, it.evaluated, it.best_norm, it.median_norm);
        }
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, IgdForm form) {
    out << kSummaryHeader << '\n';
    for (const auto& s : rows) {
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", s.algorithm, s.problem, s.n, s.m, s.runs, to_string(form),
                   s.igd_mean, s.igd_variance, s.sp_mean, s.sp_variance);
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::filesystem::path dir(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    }
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + (dir / name).string());
        return f;
    };
    // Probe writability before spending time on runs.
    { auto probe = open("config.txt"); probe << emit_config(config); }

    struct Job {
        ProblemId id;
        std::size_t n, m;
        Algorithm algorithm;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (ProblemId id : config.problems)
        for (std::size_t n : config.n_values)
            for (std::size_t m : config.m_values)
                for (Algorithm a : config.algorithms)
                    for (std::uint64_t s : config.seeds) jobs.push_back({id, n, m, a, s});

    ExperimentResult result;
    result.cells.resize(jobs.size());
    auto run_job = [&](std::size_t i) {
        const Job& j = jobs[i];
        result.cells[i] = run_cell(config, j.id, j.n, j.m, j.algorithm, j.seed);
    };
    const unsigned workers = config.serial ? 1u : std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(i);
            });
        }
    }

    for (const auto& c : result.cells) {
        if (!c.record.ok()) ++result.failures;
    }
    const auto records = result.records();
    result.summary = aggregate(records);

    { auto f = open("runs.csv"); write_runs_csv(f, result.cells, config.igd_form); }
    { auto f = open("traces.csv"); write_traces_csv(f, result.cells); }
    { auto f = open("iterations.csv"); write_iterations_csv(f, result.cells); }
    { auto f = open("summary.csv"); write_summary_csv(f, result.summary, config.igd_form); }
    return result;
}

} // namespace lmef
