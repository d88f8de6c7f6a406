#pragma once

#include "pulearn/common.hpp"

#include <optional>

namespace pu {

/// Predictions of one mini-batch, split into the labeled-positive part P_b
/// and the unlabeled part U_b. At most one side may be empty.
struct BatchView {
    Vector eta_p;
    Vector eta_u;

    long size() const { return eta_p.size() + eta_u.size(); }
};

/// Objective value plus its gradient with respect to every prediction in
/// the batch. grad is aligned with [eta_p; eta_u]. aux carries the one
/// diagnostic each estimator exposes (nnPU inner term, cPU unlabeled
/// batch mean).
struct LossResult {
    double value = 0.0;
    Vector grad;
    std::optional<double> aux;
};

/// Plain cross-entropy on a single prediction.
LossResult pn_log_loss(double eta_hat, int y);

/// 0 iff the rounded prediction matches the label; ties at 0.5 classify
/// positive.
int zero_one_loss(double eta_hat, int y);

/// Unbiased PU risk: pi_u * mean_P[-ln eta] + mean_U[-ln(1-eta)]
///                   - pi_u * mean_P[-ln(1-eta)]. May be negative.
LossResult upu_risk(const BatchView& batch, double pi_u);

/// Non-negative PU risk: the negative-class part is floored at zero, and
/// when it is negative the returned gradient is the corrective
/// -gamma * d(inner)/d(eta) step with the positive part suppressed.
LossResult nnpu_risk(const BatchView& batch, double pi_u, double gamma = 1.0);

/// Collective objective: per-sample cross-entropy on P_b plus one batch
/// term -ln(1 - |mean(eta over U_b) - mu_target|) for the unlabeled side.
/// The subgradient at mean == mu_target is zero.
LossResult cpu_collective_loss(const BatchView& batch, double mu_target);

/// Baseline that labels every unlabeled sample negative.
LossResult naive_negative_loss(const BatchView& batch);

} // namespace pu
