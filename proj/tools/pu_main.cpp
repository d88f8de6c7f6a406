// Command-line front end: data generation, training, benchmark campaigns,
// robustness sweeps, and numerical verification of the reward theory.
//
// Exit codes: 0 success, 1 run failure, 2 verification failure, 64 usage.

#include <CLI11.hpp>

#include "pulearn/csv.hpp"
#include "pulearn/elicitation.hpp"
#include "pulearn/experiment.hpp"
#include "pulearn/log.hpp"

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir = ".";
};

struct SourceOpts {
    pu::DataSourceSpec spec;
    std::string format_name = "delim";
    std::vector<long> positive_classes{1};

    pu::DataSourceSpec resolve() const {
        pu::DataSourceSpec s = spec;
        s.format = format_name == "idx" ? pu::DatasetFormat::IdxImagePair
                                        : pu::DatasetFormat::DelimitedText;
        s.positive_classes = std::set<long>(positive_classes.begin(), positive_classes.end());
        s.synthetic = s.train_path.empty();
        return s;
    }
};

void add_source_options(CLI::App* cmd, SourceOpts& src) {
    cmd->add_option("--name", src.spec.name, "Dataset name used in reports");
    cmd->add_option("--gen-n", src.spec.gen_n_per_class, "Synthetic rows per class");
    cmd->add_option("--gen-dim", src.spec.gen_dim, "Synthetic feature dimension");
    cmd->add_option("--gen-separation", src.spec.gen_separation, "Synthetic class separation");
    cmd->add_option("--train", src.spec.train_path,
                    "Training file (delimited CSV, or IDX image file)");
    cmd->add_option("--train-labels", src.spec.train_labels_path, "IDX label file for --train");
    cmd->add_option("--test", src.spec.test_path, "Test file");
    cmd->add_option("--test-labels", src.spec.test_labels_path, "IDX label file for --test");
    cmd->add_option("--format", src.format_name, "File format: delim or idx")
        ->check(CLI::IsMember({"delim", "idx"}));
    cmd->add_option("--positive-classes", src.positive_classes,
                    "Class labels mapped to the positive side")
        ->delimiter(',');
}

struct ConfigOpts {
    pu::RunConfig cfg;
    std::string objective_name = "cpu";
    std::string mu_mode_name = "eq10-omega";
    std::string activation_name = "softsign";
    double mu_override = -1.0; // <0 means unset

    pu::RunConfig resolve(uint64_t seed) const {
        pu::RunConfig c = cfg;
        c.objective = pu::objective_from_string(objective_name);
        c.mu_target_mode = pu::mu_mode_from_string(mu_mode_name);
        c.activation = pu::hidden_activation_from_string(activation_name);
        if (mu_override >= 0.0) c.mu_override = mu_override;
        c.seed = seed;
        return c;
    }
};

void add_config_options(CLI::App* cmd, ConfigOpts& opts, bool with_objective) {
    if (with_objective)
        cmd->add_option("--objective", opts.objective_name,
                        "Training objective: pn-oracle|naive|upu|nnpu|cpu")
            ->check(CLI::IsMember({"pn-oracle", "naive", "upu", "nnpu", "cpu"}));
    cmd->add_option("--mu-mode", opts.mu_mode_name,
                    "Collective target source: eq10-omega (mu_p) or within-u (pi_u)")
        ->check(CLI::IsMember({"eq10-omega", "within-u"}));
    cmd->add_option("--mu-override", opts.mu_override,
                    "Fixed collective target / mixing prior (misspecification runs)");
    cmd->add_option("--lr", opts.cfg.lr, "Nadam learning rate");
    cmd->add_option("--batch-p", opts.cfg.batch_p, "Labeled positives per mini-batch");
    cmd->add_option("--batch-u", opts.cfg.batch_u, "Unlabeled samples per mini-batch");
    cmd->add_option("--epochs", opts.cfg.epochs, "Training epochs");
    cmd->add_option("--arch", opts.cfg.arch, "Layer widths, e.g. 784,300,1 (default: d,1)")
        ->delimiter(',');
    cmd->add_option("--activation", opts.activation_name, "Hidden activation: softsign|tanh")
        ->check(CLI::IsMember({"softsign", "tanh"}));
    cmd->add_option("--gamma", opts.cfg.gamma, "nnPU corrective-step scale");
}

fs::path out_path(const GlobalOpts& global, const std::string& name) {
    fs::create_directories(global.out_dir);
    return fs::path(global.out_dir) / name;
}

void write_and_report(const fs::path& path, const std::vector<std::string>& lines) {
    pu::csv::write_lines(path.string(), lines);
    std::cout << "wrote " << path.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive-unlabeled learning toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value config file");

    GlobalOpts global;
    app.add_option("--seed", global.seed, "Base random seed")->capture_default_str();
    app.add_option("--jobs", global.jobs, "Parallel benchmark cells")->capture_default_str();
    app.add_option("--out-dir", global.out_dir, "Directory for report files")
        ->capture_default_str();

    // --- gen-data -----------------------------------------------------------
    auto* gen = app.add_subcommand("gen-data", "Generate a two-Gaussian dataset as delimited text");
    long gen_n = 1000, gen_dim = 2;
    double gen_sep = 4.0;
    std::string gen_out = "dataset.csv";
    gen->add_option("--n", gen_n, "Rows per class")->capture_default_str();
    gen->add_option("--dim", gen_dim, "Feature dimension")->capture_default_str();
    gen->add_option("--separation", gen_sep, "Class separation")->capture_default_str();
    gen->add_option("--out", gen_out, "Output file")->capture_default_str();

    // --- train ----------------------------------------------------------
    auto* train = app.add_subcommand("train", "Train one model on a PU split");
    SourceOpts train_src;
    ConfigOpts train_cfg;
    double train_r = 0.2;
    std::string save_params_path, report_path;
    add_source_options(train, train_src);
    add_config_options(train, train_cfg, true);
    train->add_option("--r", train_r, "Fraction of the positive class hidden in U")
        ->capture_default_str();
    train->add_option("--save-params", save_params_path, "Write a parameter checkpoint here");
    train->add_option("--report", report_path, "Run report CSV path (default out-dir/run_report.csv)");

    // --- eval -----------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset");
    SourceOpts eval_src;
    std::string eval_params_path;
    double eval_r = -1.0;
    eval_cmd->add_option("--params", eval_params_path, "Parameter checkpoint")->required();
    add_source_options(eval_cmd, eval_src);
    eval_cmd->add_option("--r", eval_r,
                         "Rebuild the PU split at this r (enables drift diagnostics)");

    // --- benchmark --------------------------------------------------------
    auto* bench = app.add_subcommand("benchmark", "Repeated-split accuracy comparison");
    SourceOpts bench_src;
    ConfigOpts bench_cfg;
    std::vector<double> bench_r{0.2};
    std::vector<std::string> bench_objectives{"naive", "upu", "nnpu", "cpu"};
    long repetitions = 5;
    add_source_options(bench, bench_src);
    add_config_options(bench, bench_cfg, false);
    bench->add_option("--r", bench_r, "r values, e.g. 0.2,0.4")->delimiter(',');
    bench->add_option("--objectives", bench_objectives, "Objectives to compare")->delimiter(',');
    bench->add_option("--repetitions", repetitions, "Repetitions per cell")->capture_default_str();

    // --- verify-elicitation ------------------------------------------------
    auto* verify = app.add_subcommand("verify-elicitation",
                                      "Certify the reward envelope against the grid oracle");
    std::vector<double> mu_list{0.05, 0.1, 0.2, 0.4};
    double grid_step = 1e-4;
    bool negate_j = false;
    verify->add_option("--mu", mu_list, "Priors to certify")->delimiter(',');
    verify->add_option("--grid-step", grid_step, "Grid resolution in (0, 0.01]")
        ->capture_default_str();
    verify->add_flag("--negate-j", negate_j)->group(""); // failure-injection hook for tests

    // --- sweep-robustness ----------------------------------------------------
    auto* sweep = app.add_subcommand("sweep-robustness",
                                     "Accuracy under a misspecified collective target");
    SourceOpts sweep_src;
    ConfigOpts sweep_cfg;
    std::vector<double> sweep_r{0.2};
    std::vector<double> deltas;
    add_source_options(sweep, sweep_src);
    add_config_options(sweep, sweep_cfg, false);
    sweep->add_option("--r", sweep_r, "r values")->delimiter(',');
    sweep->add_option("--deltas", deltas, "Relative target perturbations, e.g. =-0.1,-0.05,0.05,0.1")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return pu::kExitOk; // --help
        std::cerr << e.what() << '\n';
        return pu::kExitUsage;
    }

    try {
        if (*gen) {
            const pu::LabeledDataset ds =
                pu::gen_two_gaussians(gen_n, gen_dim, gen_sep, global.seed);
            std::vector<std::string> lines;
            for (long i = 0; i < ds.rows(); ++i) {
                std::vector<std::string> fields;
                for (long j = 0; j < ds.dim(); ++j)
                    fields.push_back(pu::csv::format_double(ds.features(i, j)));
                fields.push_back(std::to_string(ds.labels[i]));
                lines.push_back(pu::csv::join_row(fields));
            }
            pu::csv::write_lines(gen_out, lines);
            std::cout << "wrote " << gen_out << '\n';
            return pu::kExitOk;
        }

        if (*train) {
            const pu::DataSourceSpec src = train_src.resolve();
            const pu::DataPair data = pu::load_data_pair(src, global.seed);
            const pu::PUSplit split = pu::make_pu_split(data.train, train_r, global.seed);
            const pu::RunConfig cfg = train_cfg.resolve(global.seed);
            const pu::TrainOutcome out = pu::train_model(cfg, split, *data.test);

            const fs::path report =
                report_path.empty() ? out_path(global, "run_report.csv") : fs::path(report_path);
            pu::write_run_report(out.report, report.string());
            std::cout << "wrote " << report.string() << '\n';
            if (!save_params_path.empty()) {
                pu::save_params(out.params, save_params_path);
                std::cout << "wrote " << save_params_path << '\n';
            }
            std::cout << "final_test_acc=" << pu::csv::format_double(out.report.final_test_acc())
                      << " status=" << (out.report.diverged ? "diverged" : "ok") << '\n';
            return out.report.diverged ? pu::kExitRunFailure : pu::kExitOk;
        }

        if (*eval_cmd) {
            const pu::DataSourceSpec src = eval_src.resolve();
            std::shared_ptr<const pu::LabeledDataset> ds;
            if (src.synthetic) {
                ds = std::make_shared<pu::LabeledDataset>(pu::gen_two_gaussians(
                    src.gen_n_per_class, src.gen_dim, src.gen_separation, global.seed));
            } else if (src.format == pu::DatasetFormat::DelimitedText) {
                ds = std::make_shared<pu::LabeledDataset>(
                    pu::load_delimited(src.train_path, src.positive_classes));
            } else {
                ds = std::make_shared<pu::LabeledDataset>(pu::load_idx_pair(
                    src.train_path, src.train_labels_path, src.positive_classes));
            }
            const pu::PredictorParams params = pu::load_params(eval_params_path);

            std::vector<std::string> lines{"metric,value"};
            lines.push_back("accuracy," + pu::csv::format_double(pu::accuracy(params, *ds)));
            if (eval_r >= 0.0) {
                const pu::PUSplit split = pu::make_pu_split(ds, eval_r, global.seed);
                const pu::EvalReport rep = pu::drift_report(params, split);
                lines.push_back("mean_eta_overall," + pu::csv::format_double(rep.mean_eta_overall));
                lines.push_back("mean_eta_p," + pu::csv::format_double(rep.mean_eta_p));
                lines.push_back("mean_eta_u," + pu::csv::format_double(rep.mean_eta_u));
                lines.push_back("target_eta_a," + pu::csv::format_double(rep.target_eta_a));
                lines.push_back("target_eta_e," + pu::csv::format_double(rep.target_eta_e));
                lines.push_back("dist_to_eta_a," + pu::csv::format_double(rep.dist_to_eta_a));
                lines.push_back("dist_to_eta_e," + pu::csv::format_double(rep.dist_to_eta_e));
                lines.push_back(std::string("closer_to_rectified,") +
                                (rep.closer_to_rectified ? "yes" : "no"));
                lines.push_back("error_rate_positive," +
                                pu::csv::format_double(rep.error_rate_positive));
                lines.push_back("error_rate_negative," +
                                pu::csv::format_double(rep.error_rate_negative));
            }
            write_and_report(out_path(global, "eval_report.csv"), lines);
            return pu::kExitOk;
        }

        if (*bench) {
            pu::ExperimentSpec spec;
            spec.source = bench_src.resolve();
            spec.r_list = bench_r;
            spec.objectives.clear();
            for (const auto& name : bench_objectives)
                spec.objectives.push_back(pu::objective_from_string(name));
            spec.repetitions = repetitions;
            spec.base_config = bench_cfg.resolve(global.seed);
            spec.out_dir = global.out_dir;

            const pu::BenchmarkResult result = pu::run_benchmark(spec, global.jobs);
            write_and_report(out_path(global, "benchmark_runs.csv"),
                             pu::benchmark_long_csv(result));
            write_and_report(out_path(global, "benchmark_summary.csv"),
                             pu::benchmark_summary_csv(result));
            write_and_report(out_path(global, "benchmark_summary.md"),
                             pu::benchmark_markdown(result));
            return result.any_cell_all_diverged ? pu::kExitRunFailure : pu::kExitOk;
        }

        if (*verify) {
            if (grid_step <= 0.0 || grid_step > 0.01) {
                std::cerr << "grid-step must be in (0, 0.01]\n";
                return pu::kExitUsage;
            }
            const pu::SupportReport report =
                pu::certify_support(mu_list, 0.01, grid_step, 1e-9, negate_j);
            write_and_report(out_path(global, "elicitation_report.csv"),
                             pu::support_report_lines(report));
            if (!report.all_certified_pass) {
                std::cerr << "certified-region support check failed at:\n";
                for (const auto& row : report.rows)
                    if (row.certified && !row.pass)
                        std::cerr << "  mu_p=" << pu::csv::format_double(row.mu_p)
                                  << " eta=" << pu::csv::format_double(row.eta)
                                  << " gap=" << pu::csv::format_double(row.gap) << '\n';
                return pu::kExitVerificationFailure;
            }
            return pu::kExitOk;
        }

        if (*sweep) {
            if (deltas.empty()) {
                std::cerr << "no deltas\n";
                return pu::kExitUsage;
            }
            pu::ExperimentSpec spec;
            spec.source = sweep_src.resolve();
            spec.r_list = sweep_r;
            spec.repetitions = 1;
            spec.base_config = sweep_cfg.resolve(global.seed);
            spec.base_config.objective = pu::Objective::Cpu;
            spec.out_dir = global.out_dir;

            const auto sweeps = pu::run_robustness(spec, deltas);
            write_and_report(out_path(global, "sweep_robustness.csv"), pu::sweep_csv(sweeps));
            return pu::kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pu::kExitRunFailure;
    }
    return pu::kExitUsage;
}
