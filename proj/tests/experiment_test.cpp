#include "pulearn/experiment.hpp"

#include "pulearn/csv.hpp"
#include "tempdir.hpp"

#include <doctest.h>

#include <algorithm>

using namespace pu;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.source.name = "toy";
    spec.source.synthetic = true;
    spec.source.gen_n_per_class = 120;
    spec.source.gen_dim = 2;
    spec.source.gen_separation = 4.0;
    spec.r_list = {0.2};
    spec.objectives = {Objective::Cpu, Objective::Nnpu};
    spec.repetitions = 2;
    spec.base_config.mu_target_mode = MuTargetMode::WithinU;
    spec.base_config.batch_p = 8;
    spec.base_config.batch_u = 32;
    spec.base_config.epochs = 3;
    spec.base_config.seed = 50;
    return spec;
}

} // namespace

TEST_CASE("benchmark counting contract") {
    const BenchmarkResult result = run_benchmark(small_spec());
    CHECK(result.runs.size() == 4);   // 1 r x 2 objectives x 2 repetitions
    CHECK(result.cells.size() == 2);  // 1 r x 2 objectives
    for (const auto& cell : result.cells) CHECK(cell.n_runs == 2);
    CHECK_FALSE(result.any_cell_all_diverged);
}

TEST_CASE("repetition seeds are base plus index") {
    const BenchmarkResult result = run_benchmark(small_spec());
    for (const auto& run : result.runs)
        CHECK(run.seed == 50 + static_cast<uint64_t>(run.repetition));
}

TEST_CASE("parallel execution matches serial output") {
    const BenchmarkResult serial = run_benchmark(small_spec(), 1);
    const BenchmarkResult parallel = run_benchmark(small_spec(), 4);
    REQUIRE(serial.runs.size() == parallel.runs.size());
    for (size_t i = 0; i < serial.runs.size(); ++i) {
        CHECK(serial.runs[i].test_acc == parallel.runs[i].test_acc);
        CHECK(serial.runs[i].seed == parallel.runs[i].seed);
    }
    CHECK(benchmark_long_csv(serial) == benchmark_long_csv(parallel));
}

TEST_CASE("long CSV round-trips exactly") {
    testsupport::TempDir tmp;
    const BenchmarkResult result = run_benchmark(small_spec());
    const auto path = tmp.file("runs.csv");
    csv::write_lines(path, benchmark_long_csv(result));
    const BenchmarkResult back = parse_benchmark_long_csv(path);
    REQUIRE(back.runs.size() == result.runs.size());
    CHECK(back.dataset_name == result.dataset_name);
    for (size_t i = 0; i < result.runs.size(); ++i) {
        CHECK(back.runs[i].r == result.runs[i].r);
        CHECK(back.runs[i].objective == result.runs[i].objective);
        CHECK(back.runs[i].repetition == result.runs[i].repetition);
        CHECK(back.runs[i].seed == result.runs[i].seed);
        CHECK(back.runs[i].diverged == result.runs[i].diverged);
        CHECK(back.runs[i].test_acc == result.runs[i].test_acc);
        CHECK(back.runs[i].train_loss == result.runs[i].train_loss);
        CHECK(back.runs[i].mean_eta_u == result.runs[i].mean_eta_u);
        CHECK(back.runs[i].mu_target == result.runs[i].mu_target);
    }
    // emission is deterministic: writing the parsed result reproduces the bytes
    BenchmarkResult rewritten = back;
    rewritten.dataset_name = result.dataset_name;
    CHECK(benchmark_long_csv(rewritten) == benchmark_long_csv(result));
}

TEST_CASE("summary cells carry mean and sample std") {
    const BenchmarkResult result = run_benchmark(small_spec());
    for (const auto& cell : result.cells) {
        std::vector<double> accs;
        for (const auto& run : result.runs)
            if (run.objective == cell.objective && run.r == cell.r && !run.diverged)
                accs.push_back(run.test_acc);
        REQUIRE(accs.size() == 2);
        const double mean = (accs[0] + accs[1]) / 2.0;
        CHECK(cell.mean_acc == doctest::Approx(mean).epsilon(1e-15));
        const double ss = (accs[0] - mean) * (accs[0] - mean) + (accs[1] - mean) * (accs[1] - mean);
        CHECK(cell.std_acc == doctest::Approx(std::sqrt(ss)).epsilon(1e-12));
    }
}

TEST_CASE("markdown summary formats mean +- std to four decimals") {
    const BenchmarkResult result = run_benchmark(small_spec());
    const auto md = benchmark_markdown(result);
    REQUIRE(md.size() == 3); // header, rule, one r row
    CHECK(md[0] == "| dataset | r | cpu | nnpu |");
    const std::string& row = md[2];
    CHECK(row.find("| toy |") != std::string::npos);
    // four decimals on both sides of the plus-minus sign
    const auto pm = row.find("\xC2\xB1");
    REQUIRE(pm != std::string::npos);
    CHECK(row[pm - 6] == '.');
}

TEST_CASE("unreachable dataset fails before any run") {
    ExperimentSpec spec = small_spec();
    spec.source.synthetic = false;
    spec.source.train_path = "/nonexistent/file.csv";
    spec.source.test_path = "/nonexistent/file.csv";
    CHECK_THROWS_AS(run_benchmark(spec), std::runtime_error);
}

TEST_CASE("spec validation") {
    ExperimentSpec spec = small_spec();
    spec.repetitions = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.r_list = {1.2};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.objectives.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("robustness campaign produces the wide table") {
    ExperimentSpec spec = small_spec();
    spec.objectives = {Objective::Cpu};
    spec.repetitions = 1;
    const auto sweeps = run_robustness(spec, {-0.10, -0.05, 0.05, 0.10});
    REQUIRE(sweeps.size() == 1);
    REQUIRE(sweeps[0].rows.size() == 5); // four deltas plus inserted baseline

    const auto lines = sweep_csv(sweeps);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "dataset,r,-10%,-5%,0%,+5%,+10%");
    CHECK(lines[1].rfind("toy,", 0) == 0);

    CHECK_THROWS_WITH_AS(run_robustness(spec, {}), "no deltas", std::invalid_argument);
}
