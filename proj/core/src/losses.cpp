#include "pulearn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace pu {

namespace {

void require_unlabeled(const BatchView& batch) {
    if (batch.eta_u.size() == 0) throw std::invalid_argument("unlabeled part required");
}

double mean_neg_log(const Vector& eta) {
    double s = 0.0;
    for (long i = 0; i < eta.size(); ++i) s += -log_clamped(eta[i]);
    return s / static_cast<double>(eta.size());
}

double mean_neg_log_comp(const Vector& eta) {
    double s = 0.0;
    for (long i = 0; i < eta.size(); ++i) s += -log_clamped(1.0 - eta[i]);
    return s / static_cast<double>(eta.size());
}

} // namespace

LossResult pn_log_loss(double eta_hat, int y) {
    const double e = clamp_unit(eta_hat);
    LossResult r;
    r.grad.resize(1);
    if (y == 1) {
        r.value = -std::log(e);
        r.grad[0] = -1.0 / e;
    } else {
        r.value = -std::log(1.0 - e);
        r.grad[0] = 1.0 / (1.0 - e);
    }
    return r;
}

int zero_one_loss(double eta_hat, int y) {
    const int predicted = eta_hat >= 0.5 ? 1 : 0;
    return predicted == y ? 0 : 1;
}

LossResult upu_risk(const BatchView& batch, double pi_u) {
    require_unlabeled(batch);
    if (pi_u > 0.0 && batch.eta_p.size() == 0)
        throw std::invalid_argument("upu_risk: positive part required when pi_u > 0");

    const long np = batch.eta_p.size();
    const long nu = batch.eta_u.size();
    LossResult r;
    r.grad = Vector::Zero(np + nu);

    double pos_term = 0.0, sub_term = 0.0;
    if (np > 0) {
        pos_term = mean_neg_log(batch.eta_p);
        sub_term = mean_neg_log_comp(batch.eta_p);
        for (long i = 0; i < np; ++i) {
            const double e = batch.eta_p[i];
            r.grad[i] = pi_u / np * (-1.0 / e) - pi_u / np * (1.0 / (1.0 - e));
        }
    }
    const double neg_term = mean_neg_log_comp(batch.eta_u);
    for (long j = 0; j < nu; ++j) r.grad[np + j] = 1.0 / ((1.0 - batch.eta_u[j]) * nu);

    r.value = pi_u * pos_term + neg_term - pi_u * sub_term;
    return r;
}

LossResult nnpu_risk(const BatchView& batch, double pi_u, double gamma) {
    require_unlabeled(batch);
    if (pi_u > 0.0 && batch.eta_p.size() == 0)
        throw std::invalid_argument("nnpu_risk: positive part required when pi_u > 0");

    const long np = batch.eta_p.size();
    const long nu = batch.eta_u.size();

    const double pos = np > 0 ? pi_u * mean_neg_log(batch.eta_p) : 0.0;
    const double inner =
        mean_neg_log_comp(batch.eta_u) - (np > 0 ? pi_u * mean_neg_log_comp(batch.eta_p) : 0.0);

    LossResult r;
    r.grad = Vector::Zero(np + nu);
    r.aux = inner;

    // d(inner)/d(eta): P entries -pi_u/(np*(1-e)), U entries 1/(nu*(1-e))
    auto inner_grad_p = [&](long i) { return -pi_u / (np * (1.0 - batch.eta_p[i])); };
    auto inner_grad_u = [&](long j) { return 1.0 / (nu * (1.0 - batch.eta_u[j])); };

    if (inner > 0.0) {
        r.value = pos + inner;
        for (long i = 0; i < np; ++i)
            r.grad[i] = pi_u / np * (-1.0 / batch.eta_p[i]) + inner_grad_p(i);
        for (long j = 0; j < nu; ++j) r.grad[np + j] = inner_grad_u(j);
    } else if (inner == 0.0) {
        r.value = pos;
        for (long i = 0; i < np; ++i) r.grad[i] = pi_u / np * (-1.0 / batch.eta_p[i]);
    } else {
        // defensive step: push the negative-class estimate back up
        r.value = pos;
        for (long i = 0; i < np; ++i) r.grad[i] = -gamma * inner_grad_p(i);
        for (long j = 0; j < nu; ++j) r.grad[np + j] = -gamma * inner_grad_u(j);
    }
    return r;
}

LossResult cpu_collective_loss(const BatchView& batch, double mu_target) {
    if (batch.size() == 0) throw std::invalid_argument("cpu_collective_loss: empty batch");
    if (mu_target < 0.0 || mu_target >= 1.0)
        throw std::invalid_argument("cpu_collective_loss: mu_target outside [0,1)");

    const long np = batch.eta_p.size();
    const long nu = batch.eta_u.size();
    LossResult r;
    r.grad = Vector::Zero(np + nu);

    if (np > 0) {
        r.value += mean_neg_log(batch.eta_p);
        for (long i = 0; i < np; ++i) r.grad[i] = -1.0 / (batch.eta_p[i] * np);
    }
    if (nu > 0) {
        const double mean_u = batch.eta_u.mean();
        r.aux = mean_u;
        const double dev = std::abs(mean_u - mu_target);
        const double arg = std::max(1.0 - dev, kEpsClamp);
        r.value += -std::log(arg);
        const double sign = mean_u > mu_target ? 1.0 : (mean_u < mu_target ? -1.0 : 0.0);
        const double g = sign / (arg * nu);
        for (long j = 0; j < nu; ++j) r.grad[np + j] = g;
    }
    return r;
}

LossResult naive_negative_loss(const BatchView& batch) {
    require_unlabeled(batch);
    const long np = batch.eta_p.size();
    const long nu = batch.eta_u.size();
    LossResult r;
    r.grad = Vector::Zero(np + nu);

    if (np > 0) {
        r.value += mean_neg_log(batch.eta_p);
        for (long i = 0; i < np; ++i) r.grad[i] = -1.0 / (batch.eta_p[i] * np);
    }
    r.value += mean_neg_log_comp(batch.eta_u);
    for (long j = 0; j < nu; ++j) r.grad[np + j] = 1.0 / ((1.0 - batch.eta_u[j]) * nu);
    return r;
}

} // namespace pu
