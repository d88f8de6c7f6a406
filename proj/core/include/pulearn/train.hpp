#pragma once

#include "pulearn/dataset.hpp"
#include "pulearn/losses.hpp"
#include "pulearn/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pu {

enum class Objective { PnOracle, Naive, Upu, Nnpu, Cpu };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

/// Which split statistic the collective target defaults to:
/// Eq10Omega -> mu_p (hidden positives over the whole sample),
/// WithinU   -> pi_u (positive fraction inside the unlabeled pool).
enum class MuTargetMode { Eq10Omega, WithinU };

std::string to_string(MuTargetMode m);
MuTargetMode mu_mode_from_string(const std::string& s);

/// Full recipe for one training run.
struct RunConfig {
    Objective objective = Objective::Cpu;
    MuTargetMode mu_target_mode = MuTargetMode::Eq10Omega;
    std::optional<double> mu_override; // misspecified-prior experiments
    double lr = 0.0005;
    long batch_p = 64;
    long batch_u = 256;
    long epochs = 30;
    uint64_t seed = 1;
    std::vector<long> arch; // empty -> logistic [d, 1]
    HiddenActivation activation = HiddenActivation::Softsign;
    double gamma = 1.0; // nnPU corrective-step scale
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_opt = 1e-8;

    void validate() const;
};

/// First/second-moment accumulators matching the parameter layout.
struct OptimizerState {
    ParamGrads m;
    ParamGrads v;
    long t = 0;
};

OptimizerState make_optimizer_state(const PredictorParams& params);

/// One Nadam update in place. Throws "diverged" on non-finite gradients.
void nadam_step(PredictorParams& params, const ParamGrads& grads, OptimizerState& state,
                double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Index pairs for one mini-batch: rows drawn from P and from U.
struct IndexBatch {
    std::vector<int> p_rows;
    std::vector<int> u_rows;
};

/// Per-epoch schedule: P and U are shuffled independently (keyed on
/// seed and epoch), U is chopped into consecutive chunks covering every
/// unlabeled sample exactly once (final short chunk kept), and the P
/// stream cycles to keep a fixed P:U composition.
std::vector<IndexBatch> make_batches(const PUSplit& split, long batch_p, long batch_u,
                                     uint64_t seed, long epoch);

struct EpochRecord {
    long epoch = 0;       // 1-based
    double train_loss = 0.0;
    double test_acc = 0.0;
    double mean_eta_u = 0.0;
};

struct RunReport {
    std::vector<EpochRecord> epochs;
    double mu_target = 0.0; // resolved collective target / mixing prior
    bool diverged = false;
    double wall_seconds = 0.0; // not serialized: reruns must be byte-identical
    Objective objective = Objective::Cpu;
    uint64_t seed = 0;

    double final_test_acc() const { return epochs.empty() ? 0.0 : epochs.back().test_acc; }
    double final_train_loss() const { return epochs.empty() ? 0.0 : epochs.back().train_loss; }
    double final_mean_eta_u() const { return epochs.empty() ? 0.0 : epochs.back().mean_eta_u; }
};

/// Collective target for the cpu objective: override first, then the
/// mode-selected split statistic.
double resolve_mu_target(const RunConfig& config, const PUSplit& split);

/// Mixing prior for uPU/nnPU: override first, then pi_u.
double resolve_pi_weight(const RunConfig& config, const PUSplit& split);

struct TrainOutcome {
    PredictorParams params;
    RunReport report;
};

/// Mini-batch training under the configured objective. Deterministic for a
/// fixed (config, split, test) triple. A non-finite loss or gradient stops
/// the run and flags the report instead of throwing.
TrainOutcome train_model(const RunConfig& config, const PUSplit& split,
                         const LabeledDataset& test);

/// RunReport CSV: one row per epoch plus a '# summary' comment line.
std::vector<std::string> run_report_lines(const RunReport& report);
RunReport parse_run_report(const std::string& path);
void write_run_report(const RunReport& report, const std::string& path);

} // namespace pu
