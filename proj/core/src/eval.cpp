#include "pulearn/eval.hpp"

#include "pulearn/losses.hpp"
#include "pulearn/log.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pu {

namespace {

constexpr long kChunk = 8192;

// chunked forward over a row subset; keeps big datasets off the heap twice
template <typename RowFn>
void predict_rows(const PredictorParams& params, const Matrix& X, long n, RowFn&& per_row) {
    for (long lo = 0; lo < n; lo += kChunk) {
        const long hi = std::min(lo + kChunk, n);
        const Vector eta = predict(params, X.middleRows(lo, hi - lo));
        for (long i = 0; i < eta.size(); ++i) per_row(lo + i, eta[i]);
    }
}

} // namespace

double accuracy(const PredictorParams& params, const LabeledDataset& data) {
    if (data.rows() == 0) throw std::invalid_argument("accuracy: empty dataset");
    long correct = 0;
    predict_rows(params, data.features, data.rows(), [&](long i, double eta) {
        correct += 1 - zero_one_loss(eta, data.labels[i]);
    });
    return static_cast<double>(correct) / static_cast<double>(data.rows());
}

double mean_prediction(const PredictorParams& params, const Matrix& X) {
    if (X.rows() == 0) throw std::invalid_argument("mean_prediction: empty matrix");
    double sum = 0.0;
    predict_rows(params, X, X.rows(), [&](long, double eta) { sum += eta; });
    return sum / static_cast<double>(X.rows());
}

EvalReport drift_report(const PredictorParams& params, const PUSplit& split) {
    const LabeledDataset& src = *split.source;
    EvalReport rep;

    Vector eta(src.rows());
    predict_rows(params, src.features, src.rows(), [&](long i, double e) { eta[i] = e; });

    double sum_p = 0.0;
    for (int i : split.positive_idx) sum_p += eta[i];
    double sum_u = 0.0;
    for (int i : split.unlabeled_idx) sum_u += eta[i];

    const double omega = static_cast<double>(split.omega());
    rep.mean_eta_p = split.positive_idx.empty()
                         ? 0.0
                         : sum_p / static_cast<double>(split.positive_idx.size());
    rep.mean_eta_u = split.unlabeled_idx.empty()
                         ? 0.0
                         : sum_u / static_cast<double>(split.unlabeled_idx.size());
    rep.mean_eta_overall = (sum_p + sum_u) / omega;

    rep.target_eta_a = static_cast<double>(split.positive_idx.size()) / omega;
    rep.target_eta_e =
        static_cast<double>(split.positive_idx.size() + split.hidden_positive_idx.size()) / omega;
    rep.dist_to_eta_a = std::abs(rep.mean_eta_overall - rep.target_eta_a);
    rep.dist_to_eta_e = std::abs(rep.mean_eta_overall - rep.target_eta_e);
    rep.closer_to_rectified = rep.dist_to_eta_e <= rep.dist_to_eta_a;

    long pos_n = 0, pos_err = 0, neg_n = 0, neg_err = 0;
    for (long i = 0; i < src.rows(); ++i) {
        if (src.labels[i] == 1) {
            ++pos_n;
            pos_err += zero_one_loss(eta[i], 1);
        } else {
            ++neg_n;
            neg_err += zero_one_loss(eta[i], 0);
        }
    }
    rep.error_rate_positive = pos_n ? static_cast<double>(pos_err) / pos_n : 0.0;
    rep.error_rate_negative = neg_n ? static_cast<double>(neg_err) / neg_n : 0.0;
    rep.accuracy = 1.0 - static_cast<double>(pos_err + neg_err) / omega;
    return rep;
}

std::vector<RobustnessRow> robustness_sweep(const RunConfig& base_config, const PUSplit& split,
                                            const LabeledDataset& test,
                                            const std::vector<double>& deltas) {
    if (base_config.objective != Objective::Cpu)
        throw std::invalid_argument("robustness_sweep: objective must be cpu");

    std::vector<double> all = deltas;
    if (std::find(all.begin(), all.end(), 0.0) == all.end()) all.push_back(0.0);
    std::sort(all.begin(), all.end());

    const double base_mu = resolve_mu_target(base_config, split);
    std::vector<RobustnessRow> rows;
    for (double delta : all) {
        RobustnessRow row;
        row.delta = delta;
        try {
            row.mu_used = perturb_mu_p(base_mu, delta);
        } catch (const std::invalid_argument&) {
            row.valid = false;
            log_warn("robustness_sweep: delta " + std::to_string(delta) +
                     " leaves the prior range; row flagged");
            rows.push_back(row);
            continue;
        }
        RunConfig cfg = base_config;
        cfg.mu_override = row.mu_used;
        const TrainOutcome out = train_model(cfg, split, test);
        row.accuracy = out.report.final_test_acc();
        row.valid = !out.report.diverged;
        rows.push_back(row);
    }
    return rows;
}

} // namespace pu
