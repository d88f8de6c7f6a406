#pragma once

#include "pulearn/dataset.hpp"
#include "pulearn/model.hpp"
#include "pulearn/train.hpp"

#include <string>
#include <vector>

namespace pu {

/// Accuracy plus the drift diagnostics: how the average prediction over
/// the whole training sample compares against the biased attractor
/// |P|/Omega and the rectified target (|P|+|U_p|)/Omega.
struct EvalReport {
    double accuracy = 0.0;
    double mean_eta_overall = 0.0;
    double mean_eta_p = 0.0;
    double mean_eta_u = 0.0;
    double target_eta_a = 0.0;       // |P| / Omega
    double target_eta_e = 0.0;       // (|P| + |U_p|) / Omega
    double dist_to_eta_a = 0.0;
    double dist_to_eta_e = 0.0;
    bool closer_to_rectified = false;
    double error_rate_positive = 0.0; // on true positives
    double error_rate_negative = 0.0; // on true negatives
};

/// Fraction of rows whose rounded prediction matches the true label.
double accuracy(const PredictorParams& params, const LabeledDataset& data);

/// Mean clamped prediction over a feature matrix (chunked forward).
double mean_prediction(const PredictorParams& params, const Matrix& X);

EvalReport drift_report(const PredictorParams& params, const PUSplit& split);

struct RobustnessRow {
    double delta = 0.0;
    double mu_used = 0.0;
    double accuracy = 0.0;
    bool valid = true; // false when the perturbed prior left [0,1)
};

/// One full cpu training run per delta (identical seed), with
/// mu_override = perturb_mu_p(base target, delta). A baseline delta = 0
/// row is always included. Out-of-range perturbations flag the row
/// instead of failing the sweep.
std::vector<RobustnessRow> robustness_sweep(const RunConfig& base_config, const PUSplit& split,
                                            const LabeledDataset& test,
                                            const std::vector<double>& deltas);

} // namespace pu
