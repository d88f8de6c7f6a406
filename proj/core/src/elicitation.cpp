#include "pulearn/elicitation.hpp"

#include "pulearn/common.hpp"
#include "pulearn/csv.hpp"

#include <cmath>
#include <stdexcept>

namespace pu {

double link_pu(double eta_hat, int y, double mu_p) {
    return y == 1 ? eta_hat : 1.0 - std::abs(eta_hat - mu_p);
}

double reward_I(double eta_hat, double eta, double mu_p) {
    // 0 * ln(clamped arg) stays 0, so endpoints are exact
    double v = 0.0;
    if (eta != 0.0) v += eta * log_clamped(eta_hat);
    if (eta != 1.0) v += (1.0 - eta) * log_clamped(1.0 - std::abs(eta_hat - mu_p));
    return v;
}

double max_reward_J(double eta, double mu_p) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("max_reward_J: eta outside [0,1]");
    if (mu_p < 0.0 || mu_p >= 1.0) throw std::invalid_argument("max_reward_J: mu_p outside [0,1)");

    const double support = eta * (1.0 + mu_p);
    if (support > mu_p) {
        double v = 0.0;
        if (eta != 0.0) v += eta * std::log(support);
        if (eta != 1.0) v += (1.0 - eta) * std::log((1.0 - eta) * (1.0 + mu_p));
        return v;
    }
    // below the stationary region the reward is maximized at eta_hat = mu_p
    if (eta == 0.0) return 0.0;
    return eta * std::log(mu_p); // mu_p > 0 here: eta*(1+mu_p) <= mu_p forces mu_p > 0
}

ConditionalRewards savage_rewards(const std::function<double(double)>& J, double eta) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("savage_rewards: eta outside [0,1]");
    const double h = 1e-6;
    double deriv;
    if (eta < h) {
        deriv = (J(eta + h) - J(eta)) / h;
    } else if (eta > 1.0 - h) {
        deriv = (J(eta) - J(eta - h)) / h;
    } else {
        deriv = (J(eta + h) - J(eta - h)) / (2.0 * h);
    }
    const double j = J(eta);
    return {j + (1.0 - eta) * deriv, j - eta * deriv};
}

double entropy_envelope(double eta) {
    double v = 0.0;
    if (eta > 0.0) v += eta * std::log(eta);
    if (eta < 1.0) v += (1.0 - eta) * std::log(1.0 - eta);
    return v;
}

double argmax_reward(double eta, double mu_p) {
    const double support = eta * (1.0 + mu_p);
    if (support > mu_p) return std::min(support, 1.0);
    return mu_p;
}

GridMax grid_argmax_reward(double eta, double mu_p, double grid_step) {
    if (grid_step <= 0.0 || grid_step > 0.01)
        throw std::invalid_argument("grid_argmax_reward: grid_step outside (0, 0.01]");
    const long n = static_cast<long>(std::llround(1.0 / grid_step));
    GridMax best{0.0, reward_I(0.0, eta, mu_p)};
    for (long i = 1; i <= n; ++i) {
        const double x = static_cast<double>(i) * grid_step;
        const double v = reward_I(x, eta, mu_p);
        if (v > best.value) best = {x, v};
    }
    return best;
}

SupportReport certify_support(const std::vector<double>& mu_list, double eta_step,
                              double grid_step, double tol, bool negate_envelope) {
    if (eta_step <= 0.0) throw std::invalid_argument("certify_support: eta_step must be > 0");
    SupportReport report;
    for (double mu : mu_list) {
        if (mu < 0.0 || mu >= 1.0) throw std::invalid_argument("certify_support: mu outside [0,1)");
        const double lo = mu / (1.0 + mu);
        const double hi = 1.0 / (1.0 + mu);
        const long n_eta = static_cast<long>(std::llround(1.0 / eta_step));
        for (long k = 0; k <= n_eta; ++k) {
            const double eta = static_cast<double>(k) * eta_step;
            SupportCheckRow row{};
            row.mu_p = mu;
            row.eta = eta;
            row.closed_form = argmax_reward(eta, mu);
            const GridMax gm = grid_argmax_reward(eta, mu, grid_step);
            row.grid_argmax = gm.arg;
            row.grid_max = gm.value;
            row.envelope = max_reward_J(eta, mu);
            if (negate_envelope) row.envelope = -row.envelope;
            row.gap = row.grid_max - row.envelope;
            row.certified = eta > lo + 1e-12 && eta <= hi + 1e-12;
            if (row.certified) {
                const bool bounded = row.gap <= tol;
                // the grid maximum must also reach the envelope: discretizing
                // at `grid_step` can miss the peak by at most ~curvature*step^2
                const bool touches = row.gap >= -1e-5;
                const bool at_support =
                    std::abs(row.grid_argmax - eta * (1.0 + mu)) <= grid_step + 1e-12;
                row.pass = bounded && touches && at_support;
                if (!row.pass) report.all_certified_pass = false;
            } else {
                row.pass = false;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

std::vector<std::string> support_report_lines(const SupportReport& report) {
    std::vector<std::string> lines;
    lines.push_back("mu_p,eta,closed_form_maximizer,grid_maximizer,J,grid_max_I,gap");
    for (const auto& r : report.rows) {
        lines.push_back(csv::join_row({
            csv::format_double(r.mu_p),
            csv::format_double(r.eta),
            csv::format_double(r.closed_form),
            csv::format_double(r.grid_argmax),
            csv::format_double(r.envelope),
            csv::format_double(r.grid_max),
            csv::format_double(r.gap),
        }));
    }
    return lines;
}

} // namespace pu
