#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pu {

/// Closeness of a prediction to the observed label under the PU link:
/// the positive branch is the prediction itself, the negative branch
/// rewards predictions near mu_p instead of near zero.
double link_pu(double eta_hat, int y, double mu_p);

/// Rectified log reward I(eta_hat, eta) =
///   eta * ln(eta_hat) + (1-eta) * ln(1 - |eta_hat - mu_p|),
/// with log arguments floored at the clamp epsilon.
double reward_I(double eta_hat, double eta, double mu_p);

/// Envelope J(eta) touched by the reward at eta_hat = eta*(1+mu_p).
/// The stationary branch applies whenever that support point clears mu_p,
/// i.e. eta > mu_p/(1+mu_p); below it J(eta) = eta*ln(mu_p).
/// Endpoint products use the 0*ln(0) = 0 convention.
double max_reward_J(double eta, double mu_p);

/// Conditional rewards recovered from an envelope by numerical
/// differentiation (central differences, one-sided at the domain ends):
///   I1 = J(eta) + (1-eta) J'(eta),  I0 = J(eta) - eta J'(eta).
struct ConditionalRewards {
    double i1;
    double i0;
};
ConditionalRewards savage_rewards(const std::function<double(double)>& J, double eta);

/// Symmetric entropy envelope eta*ln(eta) + (1-eta)*ln(1-eta); the
/// classical case whose elicited loss is -ln(v).
double entropy_envelope(double eta);

/// Closed-form reward maximizer: min(eta*(1+mu_p), 1) when that point
/// clears mu_p, otherwise mu_p.
double argmax_reward(double eta, double mu_p);

/// Dense grid search over eta_hat in [0,1]; the independent oracle the
/// closed form is checked against.
struct GridMax {
    double arg;
    double value;
};
GridMax grid_argmax_reward(double eta, double mu_p, double grid_step = 1e-4);

/// One certification row: closed form vs. grid oracle at a single
/// (mu_p, eta) point.
struct SupportCheckRow {
    double mu_p;
    double eta;
    double closed_form;  // closed-form maximizer (clamped to [0,1])
    double grid_argmax;
    double envelope;     // J(eta)
    double grid_max;     // max of the reward over the eta_hat grid
    double gap;          // grid_max - envelope
    bool certified;      // inside (mu_p/(1+mu_p), 1/(1+mu_p)]
    bool pass;           // certified and both support assertions hold
};

struct SupportReport {
    std::vector<SupportCheckRow> rows;
    bool all_certified_pass = true;
};

/// Sweeps eta over a grid for each mu_p and checks, inside the certified
/// region, that the grid maximum never exceeds J(eta) + tol, that it also
/// reaches J(eta) up to the grid discretization error, and that the grid
/// argmax lies within one grid step of eta*(1+mu_p). Rows outside the
/// region are reported but not asserted. `negate_envelope` is a test hook
/// that corrupts J's sign so verification must fail.
SupportReport certify_support(const std::vector<double>& mu_list, double eta_step = 0.01,
                              double grid_step = 1e-4, double tol = 1e-9,
                              bool negate_envelope = false);

/// CSV emission for the verify-elicitation command.
std::vector<std::string> support_report_lines(const SupportReport& report);

} // namespace pu
