#pragma once

#include "pulearn/dataset.hpp"
#include "pulearn/eval.hpp"
#include "pulearn/train.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pu {

/// Where the train/test pair comes from: either the synthetic generator or
/// a pair of files. Synthetic test sets use a fixed offset of the data
/// seed so train and test never share draws.
struct DataSourceSpec {
    std::string name = "gaussians";

    // generator route
    bool synthetic = true;
    long gen_n_per_class = 5000;
    long gen_dim = 2;
    double gen_separation = 4.0;

    // file route
    DatasetFormat format = DatasetFormat::DelimitedText;
    std::string train_path;        // delimited file, or IDX image file
    std::string train_labels_path; // IDX label file
    std::string test_path;
    std::string test_labels_path;
    std::set<long> positive_classes{1};
};

struct DataPair {
    std::shared_ptr<const LabeledDataset> train;
    std::shared_ptr<const LabeledDataset> test;
};

/// Materializes the source; `seed` only affects the synthetic route.
DataPair load_data_pair(const DataSourceSpec& source, uint64_t seed);

/// One benchmark campaign: every (r, objective) cell is trained
/// `repetitions` times with seeds base_seed + repetition index.
struct ExperimentSpec {
    DataSourceSpec source;
    std::vector<double> r_list{0.2};
    std::vector<Objective> objectives{Objective::Cpu, Objective::Nnpu};
    long repetitions = 1;
    RunConfig base_config;
    std::string out_dir = ".";

    void validate() const;
};

struct BenchmarkRun {
    double r = 0.0;
    Objective objective = Objective::Cpu;
    long repetition = 0;
    uint64_t seed = 0;
    bool diverged = false;
    double test_acc = 0.0;
    double train_loss = 0.0;
    double mean_eta_u = 0.0;
    double mu_target = 0.0;
};

struct BenchmarkCell {
    double r = 0.0;
    Objective objective = Objective::Cpu;
    long n_runs = 0;
    long n_diverged = 0;
    double mean_acc = 0.0;
    double std_acc = 0.0; // sample standard deviation over completed runs
};

struct BenchmarkResult {
    std::string dataset_name;
    std::vector<BenchmarkRun> runs;   // long form, one row per repetition
    std::vector<BenchmarkCell> cells; // aggregated, one per (r, objective)
    bool any_cell_all_diverged = false;
};

/// Runs the full campaign; cells are independent and may execute on up to
/// `jobs` threads. Output assembly is ordered, so reports do not depend on
/// scheduling.
BenchmarkResult run_benchmark(const ExperimentSpec& spec, int jobs = 1);

std::vector<std::string> benchmark_long_csv(const BenchmarkResult& result);
std::vector<std::string> benchmark_summary_csv(const BenchmarkResult& result);
/// Accuracy table shaped like the published comparison: one row per
/// (dataset, r), one column per objective, cells "mean +- std" to four
/// decimals.
std::vector<std::string> benchmark_markdown(const BenchmarkResult& result);

BenchmarkResult parse_benchmark_long_csv(const std::string& path);
std::vector<BenchmarkCell> parse_benchmark_summary_csv(const std::string& path);

struct SweepResult {
    std::string dataset_name;
    double r = 0.0;
    std::vector<RobustnessRow> rows;
};

/// Robustness campaign: one sweep per r value over the given deltas.
std::vector<SweepResult> run_robustness(const ExperimentSpec& spec,
                                        const std::vector<double>& deltas);

/// Wide CSV: dataset, r, then one accuracy column per delta.
std::vector<std::string> sweep_csv(const std::vector<SweepResult>& sweeps);
std::vector<SweepResult> parse_sweep_csv(const std::string& path);

/// Stable process exit codes shared by the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitRunFailure = 1,
    kExitVerificationFailure = 2,
    kExitUsage = 64,
};

} // namespace pu
