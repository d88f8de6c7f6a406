#include "pulearn/experiment.hpp"

#include "pulearn/csv.hpp"
#include "pulearn/log.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace pu {

DataPair load_data_pair(const DataSourceSpec& source, uint64_t seed) {
    DataPair pair;
    if (source.synthetic) {
        pair.train = std::make_shared<LabeledDataset>(gen_two_gaussians(
            source.gen_n_per_class, source.gen_dim, source.gen_separation, seed));
        pair.test = std::make_shared<LabeledDataset>(gen_two_gaussians(
            source.gen_n_per_class, source.gen_dim, source.gen_separation, seed + 900001));
        return pair;
    }
    if (source.format == DatasetFormat::DelimitedText) {
        pair.train = std::make_shared<LabeledDataset>(
            load_delimited(source.train_path, source.positive_classes));
        pair.test = std::make_shared<LabeledDataset>(
            load_delimited(source.test_path, source.positive_classes));
    } else {
        pair.train = std::make_shared<LabeledDataset>(load_idx_pair(
            source.train_path, source.train_labels_path, source.positive_classes));
        pair.test = std::make_shared<LabeledDataset>(
            load_idx_pair(source.test_path, source.test_labels_path, source.positive_classes));
    }
    return pair;
}

void ExperimentSpec::validate() const {
    if (repetitions < 1) throw std::invalid_argument("experiment: repetitions must be >= 1");
    if (r_list.empty()) throw std::invalid_argument("experiment: no r values");
    for (double r : r_list)
        if (r < 0.0 || r >= 1.0) throw std::invalid_argument("experiment: r outside [0,1)");
    if (objectives.empty()) throw std::invalid_argument("experiment: no objectives");
    base_config.validate();
}

namespace {

BenchmarkRun run_one(const ExperimentSpec& spec, const DataPair& data, double r,
                     Objective objective, long repetition) {
    BenchmarkRun run;
    run.r = r;
    run.objective = objective;
    run.repetition = repetition;
    run.seed = spec.base_config.seed + static_cast<uint64_t>(repetition);

    const PUSplit split = make_pu_split(data.train, r, run.seed);
    RunConfig cfg = spec.base_config;
    cfg.objective = objective;
    cfg.seed = run.seed;
    const TrainOutcome out = train_model(cfg, split, *data.test);

    run.diverged = out.report.diverged;
    run.test_acc = out.report.final_test_acc();
    run.train_loss = out.report.final_train_loss();
    run.mean_eta_u = out.report.final_mean_eta_u();
    run.mu_target = out.report.mu_target;
    return run;
}

BenchmarkCell aggregate(double r, Objective objective, const std::vector<BenchmarkRun>& runs) {
    BenchmarkCell cell;
    cell.r = r;
    cell.objective = objective;
    std::vector<double> accs;
    for (const auto& run : runs) {
        if (run.r != r || run.objective != objective) continue;
        ++cell.n_runs;
        if (run.diverged) {
            ++cell.n_diverged;
        } else {
            accs.push_back(run.test_acc);
        }
    }
    if (!accs.empty()) {
        double sum = 0.0;
        for (double a : accs) sum += a;
        cell.mean_acc = sum / static_cast<double>(accs.size());
        if (accs.size() > 1) {
            double ss = 0.0;
            for (double a : accs) ss += (a - cell.mean_acc) * (a - cell.mean_acc);
            cell.std_acc = std::sqrt(ss / static_cast<double>(accs.size() - 1));
        }
    }
    return cell;
}

} // namespace

BenchmarkResult run_benchmark(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    if (jobs < 1) jobs = 1;

    const DataPair data = load_data_pair(spec.source, spec.base_config.seed);

    struct Job {
        double r;
        Objective objective;
        long repetition;
    };
    std::vector<Job> todo;
    for (double r : spec.r_list)
        for (Objective o : spec.objectives)
            for (long rep = 0; rep < spec.repetitions; ++rep) todo.push_back({r, o, rep});

    std::vector<BenchmarkRun> runs(todo.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= todo.size() || failed.load()) return;
            try {
                runs[i] = run_one(spec, data, todo[i].r, todo[i].objective, todo[i].repetition);
                log_info("run r=" + csv::format_double(todo[i].r) + " " +
                         to_string(todo[i].objective) + " rep=" + std::to_string(todo[i].repetition) +
                         " acc=" + csv::format_double(runs[i].test_acc));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                return;
            }
        }
    };

    if (jobs == 1 || todo.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(jobs, static_cast<int>(todo.size()));
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("benchmark failed: " + failure);

    BenchmarkResult result;
    result.dataset_name = spec.source.name;
    result.runs = std::move(runs);
    for (double r : spec.r_list)
        for (Objective o : spec.objectives) {
            BenchmarkCell cell = aggregate(r, o, result.runs);
            if (cell.n_runs > 0 && cell.n_diverged == cell.n_runs)
                result.any_cell_all_diverged = true;
            result.cells.push_back(cell);
        }
    return result;
}

std::vector<std::string> benchmark_long_csv(const BenchmarkResult& result) {
    std::vector<std::string> lines;
    lines.push_back("dataset,r,objective,repetition,seed,status,test_acc,train_loss,mean_eta_u,mu_target");
    for (const auto& run : result.runs) {
        lines.push_back(csv::join_row({
            result.dataset_name,
            csv::format_double(run.r),
            to_string(run.objective),
            std::to_string(run.repetition),
            std::to_string(run.seed),
            run.diverged ? "diverged" : "ok",
            csv::format_double(run.test_acc),
            csv::format_double(run.train_loss),
            csv::format_double(run.mean_eta_u),
            csv::format_double(run.mu_target),
        }));
    }
    return lines;
}

std::vector<std::string> benchmark_summary_csv(const BenchmarkResult& result) {
    std::vector<std::string> lines;
    lines.push_back("dataset,r,objective,n_runs,n_diverged,mean_acc,std_acc");
    for (const auto& cell : result.cells) {
        lines.push_back(csv::join_row({
            result.dataset_name,
            csv::format_double(cell.r),
            to_string(cell.objective),
            std::to_string(cell.n_runs),
            std::to_string(cell.n_diverged),
            csv::format_double(cell.mean_acc),
            csv::format_double(cell.std_acc),
        }));
    }
    return lines;
}

std::vector<std::string> benchmark_markdown(const BenchmarkResult& result) {
    std::vector<Objective> objectives;
    std::vector<double> r_values;
    for (const auto& cell : result.cells) {
        if (std::find(objectives.begin(), objectives.end(), cell.objective) == objectives.end())
            objectives.push_back(cell.objective);
        if (std::find(r_values.begin(), r_values.end(), cell.r) == r_values.end())
            r_values.push_back(cell.r);
    }

    auto fmt4 = [](double v) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(4) << v;
        return os.str();
    };

    std::vector<std::string> lines;
    std::string head = "| dataset | r |";
    std::string rule = "|---|---|";
    for (Objective o : objectives) {
        head += " " + to_string(o) + " |";
        rule += "---|";
    }
    lines.push_back(head);
    lines.push_back(rule);
    for (double r : r_values) {
        std::string row = "| " + result.dataset_name + " | " + fmt4(r) + " |";
        for (Objective o : objectives) {
            const auto it = std::find_if(result.cells.begin(), result.cells.end(),
                                         [&](const BenchmarkCell& c) {
                                             return c.r == r && c.objective == o;
                                         });
            if (it == result.cells.end() || it->n_runs == it->n_diverged) {
                row += " diverged |";
            } else {
                row += " " + fmt4(it->mean_acc) + " \xC2\xB1 " + fmt4(it->std_acc) + " |";
            }
        }
        lines.push_back(row);
    }
    return lines;
}

BenchmarkResult parse_benchmark_long_csv(const std::string& path) {
    const csv::Table t = csv::read_table(path);
    const std::vector<std::string> expect{"dataset", "r",        "objective", "repetition",
                                          "seed",    "status",   "test_acc",  "train_loss",
                                          "mean_eta_u", "mu_target"};
    if (t.header != expect) throw std::runtime_error("benchmark csv: unexpected header");
    BenchmarkResult result;
    for (const auto& row : t.rows) {
        if (row.size() != expect.size()) throw std::runtime_error("benchmark csv: bad row");
        result.dataset_name = row[0];
        BenchmarkRun run;
        run.r = csv::parse_double(row[1]);
        run.objective = objective_from_string(row[2]);
        run.repetition = csv::parse_long(row[3]);
        run.seed = static_cast<uint64_t>(csv::parse_long(row[4]));
        run.diverged = row[5] == "diverged";
        run.test_acc = csv::parse_double(row[6]);
        run.train_loss = csv::parse_double(row[7]);
        run.mean_eta_u = csv::parse_double(row[8]);
        run.mu_target = csv::parse_double(row[9]);
        result.runs.push_back(run);
    }
    return result;
}

std::vector<SweepResult> run_robustness(const ExperimentSpec& spec,
                                        const std::vector<double>& deltas) {
    spec.validate();
    if (deltas.empty()) throw std::invalid_argument("no deltas");

    const DataPair data = load_data_pair(spec.source, spec.base_config.seed);
    std::vector<SweepResult> out;
    for (double r : spec.r_list) {
        const PUSplit split = make_pu_split(data.train, r, spec.base_config.seed);
        RunConfig cfg = spec.base_config;
        cfg.objective = Objective::Cpu;
        SweepResult sweep;
        sweep.dataset_name = spec.source.name;
        sweep.r = r;
        sweep.rows = robustness_sweep(cfg, split, *data.test, deltas);
        out.push_back(std::move(sweep));
    }
    return out;
}

namespace {

std::string delta_label(double delta) {
    std::ostringstream os;
    const double pct = delta * 100.0;
    if (delta > 0) os << '+';
    os << pct << '%';
    return os.str();
}

} // namespace

std::vector<std::string> sweep_csv(const std::vector<SweepResult>& sweeps) {
    std::vector<std::string> lines;
    if (sweeps.empty()) return lines;
    std::string head = "dataset,r";
    for (const auto& row : sweeps.front().rows) head += "," + delta_label(row.delta);
    lines.push_back(head);
    for (const auto& sweep : sweeps) {
        std::vector<std::string> fields{sweep.dataset_name, csv::format_double(sweep.r)};
        for (const auto& row : sweep.rows)
            fields.push_back(row.valid ? csv::format_double(row.accuracy) : "invalid_prior");
        lines.push_back(csv::join_row(fields));
    }
    return lines;
}

} // namespace pu
