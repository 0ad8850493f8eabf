#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lmef/error.hpp"
#include "lmef/experiment.hpp"

using namespace lmef;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lmef-test-" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig tiny() {
    ExperimentConfig c;
    c.problems = {ProblemId::LSMOP1};
    c.n_values = {30};
    c.m_values = {2};
    c.algorithms = {Algorithm::GanNsga2};
    c.seeds = {1, 2};
    c.evaluations = 1200;
    c.population = 20;
    c.gan_epochs = 10;
    c.reference_points = 100;
    return c;
}

} // namespace

TEST_CASE("algorithm names") {
    for (auto a : {Algorithm::Nsga2, Algorithm::GanNsga2, Algorithm::IpNsga2}) CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("moead"), PreconditionError);
}

TEST_CASE("config parse and round trip") {
    const auto defaults = ExperimentConfig{};
    CHECK(parse_config(emit_config(defaults)) == defaults);

    const auto text = R"(# grid
problem = LSMOP1, lsmop4
n = 100
m = 2,3
algo = nsga2,gan-nsga2,ip-nsga2   # all three
seeds = 1,2,3
evals = 10000
population = 50
sigma = 0.25
epsilon = 0.15
gan_learning_rate = 0.0003
gan_optimizer = adam
generator_loss = minimax
warm_start = true
igd_form = plain
out = /tmp/somewhere
serial = false
)";
    const auto c = parse_config(text);
    CHECK(c.problems == std::vector<ProblemId>{ProblemId::LSMOP1, ProblemId::LSMOP4});
    CHECK(c.m_values == std::vector<std::size_t>{2, 3});
    CHECK(c.algorithms.size() == 3);
    CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(c.sigma == 0.25);
    CHECK(c.gan_learning_rate == 0.0003);
    CHECK(c.gan_optimizer == GanOptimizer::Adam);
    CHECK(c.generator_loss == GeneratorLoss::Minimax);
    CHECK(c.warm_start);
    CHECK(c.igd_form == IgdForm::Plain);
    CHECK(c.output_dir == "/tmp/somewhere");
    CHECK_FALSE(c.serial);
    CHECK(parse_config(emit_config(c)) == c);

    ExperimentConfig odd = c;
    odd.sigma = 0.1 + 0.2;
    odd.perturbation_std = 1.0 / 3.0;
    CHECK(parse_config(emit_config(odd)) == odd);

    CHECK_THROWS_AS(parse_config("bogus = 1"), PreconditionError);
    CHECK_THROWS_AS(parse_config("n = ten"), PreconditionError);
    CHECK_THROWS_AS(parse_config("just words"), PreconditionError);
    CHECK_THROWS_AS(parse_config("seeds ="), PreconditionError);
}

TEST_CASE("config validation") {
    auto c = tiny();
    c.validate();
    c.seeds.clear();
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = tiny();
    c.n_values = {2};
    c.m_values = {3};
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = tiny();
    c.algorithms.clear();
    CHECK_THROWS_AS(c.validate(), PreconditionError);
}

TEST_CASE("run_experiment writes stable, deterministic CSVs") {
    auto config = tiny();
    config.output_dir = scratch("a").string();
    const auto first = run_experiment(config);
    REQUIRE(first.cells.size() == 2);
    CHECK(first.failures == 0);
    for (const auto& cell : first.cells) {
        CHECK(cell.record.ok());
        CHECK(cell.record.evaluations == 1200);
        for (std::size_t i = 1; i < cell.record.trace.size(); ++i)
            CHECK(cell.record.trace[i].evaluations > cell.record.trace[i - 1].evaluations);
    }
    CHECK(first.cells[0].record.seed == 1);
    CHECK(first.cells[1].record.seed == 2);

    for (const char* name : {"runs.csv", "traces.csv", "iterations.csv", "summary.csv"}) {
        const auto golden = first_line(fs::path(LMEF_TEST_DATA_DIR) / "golden" / (std::string(name) + ".header"));
        CHECK(first_line(fs::path(config.output_dir) / name) == golden);
    }

    auto again = config;
    again.output_dir = scratch("b").string();
    run_experiment(again);
    for (const char* name : {"runs.csv", "traces.csv", "iterations.csv", "summary.csv"})
        CHECK(slurp(fs::path(config.output_dir) / name) == slurp(fs::path(again.output_dir) / name));
    CHECK(parse_config(slurp(fs::path(config.output_dir) / "config.txt")).seeds == config.seeds);
}

TEST_CASE("failed cells are recorded and the rest continue") {
    auto config = tiny();
    config.n_values = {10, 30};  // n = 10 cannot host the variable groups
    config.seeds = {1};
    config.output_dir = scratch("c").string();
    const auto result = run_experiment(config);
    REQUIRE(result.cells.size() == 2);
    CHECK(result.failures == 1);
    CHECK(result.cells[0].record.status.rfind("error:", 0) == 0);
    CHECK(result.cells[1].record.ok());
    const auto runs = slurp(fs::path(config.output_dir) / "runs.csv");
    CHECK(runs.find("error:") != std::string::npos);
}

TEST_CASE("unwritable output directory fails at startup") {
    const auto blocker = scratch("d");
    { std::ofstream(blocker) << "file"; }
    auto config = tiny();
    config.output_dir = (blocker / "sub").string();
    CHECK_THROWS_AS(run_experiment(config), Error);
    fs::remove(blocker);
}

TEST_CASE("parallel cells match serial output") {
    auto config = tiny();
    config.algorithms = {Algorithm::Nsga2, Algorithm::IpNsga2};
    config.output_dir = scratch("e").string();
    const auto serial = run_experiment(config);
    config.serial = false;
    config.output_dir = scratch("f").string();
    const auto parallel = run_experiment(config);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) CHECK(serial.cells[i].record.igd == parallel.cells[i].record.igd);
}
