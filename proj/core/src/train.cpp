#include "pulearn/train.hpp"

#include "pulearn/csv.hpp"
#include "pulearn/eval.hpp"
#include "pulearn/log.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace pu {

std::string to_string(Objective o) {
    switch (o) {
        case Objective::PnOracle: return "pn-oracle";
        case Objective::Naive: return "naive";
        case Objective::Upu: return "upu";
        case Objective::Nnpu: return "nnpu";
        case Objective::Cpu: return "cpu";
    }
    throw std::logic_error("unreachable");
}

Objective objective_from_string(const std::string& s) {
    if (s == "pn-oracle" || s == "pn") return Objective::PnOracle;
    if (s == "naive") return Objective::Naive;
    if (s == "upu") return Objective::Upu;
    if (s == "nnpu") return Objective::Nnpu;
    if (s == "cpu") return Objective::Cpu;
    throw std::invalid_argument("unknown objective: " + s);
}

std::string to_string(MuTargetMode m) {
    return m == MuTargetMode::Eq10Omega ? "eq10-omega" : "within-u";
}

MuTargetMode mu_mode_from_string(const std::string& s) {
    if (s == "eq10-omega") return MuTargetMode::Eq10Omega;
    if (s == "within-u") return MuTargetMode::WithinU;
    throw std::invalid_argument("unknown mu target mode: " + s);
}

void RunConfig::validate() const {
    if (lr <= 0.0) throw std::invalid_argument("config: lr must be > 0");
    if (batch_p < 1 || batch_u < 1) throw std::invalid_argument("config: batch sizes must be >= 1");
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (gamma < 0.0) throw std::invalid_argument("config: gamma must be >= 0");
    if (mu_override && (*mu_override < 0.0 || *mu_override >= 1.0))
        throw std::invalid_argument("invalid prior");
}

OptimizerState make_optimizer_state(const PredictorParams& params) {
    return {zeros_like(params), zeros_like(params), 0};
}

namespace {

bool all_finite(const ParamGrads& grads) {
    for (const auto& g : grads)
        if (!g.weight.allFinite() || !g.bias.allFinite()) return false;
    return true;
}

// m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;
// theta <- theta - lr * (b1*m/c1 + (1-b1)*g/c1) / (sqrt(v/c2) + eps)
template <typename TensorT>
void nadam_update(TensorT& theta, const TensorT& g, TensorT& m, TensorT& v, double lr,
                  double beta1, double beta2, double eps, long t) {
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    m = beta1 * m + (1.0 - beta1) * g;
    v.array() = beta2 * v.array() + (1.0 - beta2) * g.array().square();
    theta.array() -= lr * (beta1 * m.array() / c1 + (1.0 - beta1) * g.array() / c1) /
                     ((v.array() / c2).sqrt() + eps);
}

} // namespace

void nadam_step(PredictorParams& params, const ParamGrads& grads, OptimizerState& state,
                double lr, double beta1, double beta2, double eps) {
    if (grads.size() != params.layers.size())
        throw std::invalid_argument("nadam_step: gradient layout mismatch");
    if (!all_finite(grads)) throw std::runtime_error("diverged");

    state.t += 1;
    for (size_t i = 0; i < params.layers.size(); ++i) {
        auto& l = params.layers[i];
        nadam_update(l.weight, grads[i].weight, state.m[i].weight, state.v[i].weight, lr, beta1,
                     beta2, eps, state.t);
        nadam_update(l.bias, grads[i].bias, state.m[i].bias, state.v[i].bias, lr, beta1, beta2,
                     eps, state.t);
    }
}

std::vector<IndexBatch> make_batches(const PUSplit& split, long batch_p, long batch_u,
                                     uint64_t seed, long epoch) {
    const long np = static_cast<long>(split.positive_idx.size());
    const long nu = static_cast<long>(split.unlabeled_idx.size());
    if (np == 0 || nu == 0) throw std::invalid_argument("make_batches: empty index pool");
    if (batch_p < 1 || batch_u < 1) throw std::invalid_argument("make_batches: batch sizes must be >= 1");
    if (batch_p > np || batch_u > nu)
        throw std::invalid_argument("make_batches: batch size exceeds pool size");

    std::vector<int> p = split.positive_idx;
    std::vector<int> u = split.unlabeled_idx;
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(epoch + 1)));
    std::shuffle(p.begin(), p.end(), rng);
    std::shuffle(u.begin(), u.end(), rng);

    const long n_batches = (nu + batch_u - 1) / batch_u; // U visited exactly once
    std::vector<IndexBatch> batches(n_batches);
    for (long b = 0; b < n_batches; ++b) {
        auto& ib = batches[b];
        const long u_lo = b * batch_u;
        const long u_hi = std::min(u_lo + batch_u, nu);
        ib.u_rows.assign(u.begin() + u_lo, u.begin() + u_hi);
        ib.p_rows.resize(batch_p);
        for (long j = 0; j < batch_p; ++j) ib.p_rows[j] = p[(b * batch_p + j) % np];
    }
    return batches;
}

double resolve_mu_target(const RunConfig& config, const PUSplit& split) {
    if (config.mu_override) return *config.mu_override;
    return config.mu_target_mode == MuTargetMode::Eq10Omega ? split.mu_p : split.pi_u;
}

double resolve_pi_weight(const RunConfig& config, const PUSplit& split) {
    if (config.mu_override) return *config.mu_override;
    return split.pi_u;
}

namespace {

Matrix gather_rows(const Matrix& X, const std::vector<int>& p_rows,
                   const std::vector<int>& u_rows) {
    Matrix out(static_cast<long>(p_rows.size() + u_rows.size()), X.cols());
    long r = 0;
    for (int i : p_rows) out.row(r++) = X.row(i);
    for (int i : u_rows) out.row(r++) = X.row(i);
    return out;
}

LossResult batch_loss(const RunConfig& config, const PUSplit& split, const IndexBatch& batch,
                      const Vector& eta, double mu_target, double pi_weight) {
    const long np = static_cast<long>(batch.p_rows.size());
    const long nu = static_cast<long>(batch.u_rows.size());
    BatchView view{eta.head(np), eta.tail(nu)};

    switch (config.objective) {
        case Objective::PnOracle: {
            // supervised baseline: true labels for every batch member
            LossResult r;
            r.grad = Vector::Zero(np + nu);
            const auto& labels = split.source->labels;
            const long n = np + nu;
            for (long i = 0; i < n; ++i) {
                const int row = i < np ? batch.p_rows[i] : batch.u_rows[i - np];
                const LossResult one = pn_log_loss(eta[i], labels[row]);
                r.value += one.value / n;
                r.grad[i] = one.grad[0] / n;
            }
            return r;
        }
        case Objective::Naive: return naive_negative_loss(view);
        case Objective::Upu: return upu_risk(view, pi_weight);
        case Objective::Nnpu: return nnpu_risk(view, pi_weight, config.gamma);
        case Objective::Cpu: return cpu_collective_loss(view, mu_target);
    }
    throw std::logic_error("unreachable");
}

} // namespace

TrainOutcome train_model(const RunConfig& config, const PUSplit& split,
                         const LabeledDataset& test) {
    config.validate();
    if (test.rows() == 0) throw std::invalid_argument("train_model: empty test set");
    const auto t_start = std::chrono::steady_clock::now();

    const Matrix& X = split.source->features;
    std::vector<long> arch = config.arch;
    if (arch.empty()) arch = {X.cols(), 1};
    if (arch.front() != X.cols())
        throw std::invalid_argument("train_model: arch input dim does not match data");

    TrainOutcome out;
    out.params = init_params(arch, config.seed, config.activation);
    out.report.objective = config.objective;
    out.report.seed = config.seed;

    const double mu_target = resolve_mu_target(config, split);
    const double pi_weight = resolve_pi_weight(config, split);
    out.report.mu_target = config.objective == Objective::Cpu ? mu_target : pi_weight;

    OptimizerState opt = make_optimizer_state(out.params);

    Matrix u_features(split.unlabeled_idx.size(), X.cols());
    for (size_t i = 0; i < split.unlabeled_idx.size(); ++i)
        u_features.row(static_cast<long>(i)) = X.row(split.unlabeled_idx[i]);

    for (long epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto batches = make_batches(split, config.batch_p, config.batch_u, config.seed,
                                          epoch - 1);
        double loss_sum = 0.0;
        try {
            for (const auto& ib : batches) {
                const Matrix Xb = gather_rows(X, ib.p_rows, ib.u_rows);
                auto [eta, cache] = forward(out.params, Xb);
                const LossResult loss = batch_loss(config, split, ib, eta, mu_target, pi_weight);
                if (!std::isfinite(loss.value)) throw std::runtime_error("diverged");
                loss_sum += loss.value;
                const ParamGrads grads = backward(out.params, cache, loss.grad);
                nadam_step(out.params, grads, opt, config.lr, config.beta1, config.beta2,
                           config.eps_opt);
            }
        } catch (const std::runtime_error&) { // non-finite score, loss, or gradient
            out.report.diverged = true;
            break;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches.size());
        rec.test_acc = accuracy(out.params, test);
        rec.mean_eta_u = mean_prediction(out.params, u_features);
        out.report.epochs.push_back(rec);
        log_debug("epoch " + std::to_string(epoch) + " loss " + std::to_string(rec.train_loss) +
                  " acc " + std::to_string(rec.test_acc));
    }
    if (out.report.diverged) log_warn("training diverged; report is partial");

    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

std::vector<std::string> run_report_lines(const RunReport& report) {
    std::vector<std::string> lines;
    lines.push_back("epoch,train_loss,test_acc,mean_eta_u");
    for (const auto& e : report.epochs) {
        lines.push_back(csv::join_row({std::to_string(e.epoch), csv::format_double(e.train_loss),
                                       csv::format_double(e.test_acc),
                                       csv::format_double(e.mean_eta_u)}));
    }
    std::ostringstream summary;
    summary << "# summary objective=" << to_string(report.objective) << " seed=" << report.seed
            << " mu_target=" << csv::format_double(report.mu_target)
            << " status=" << (report.diverged ? "diverged" : "ok")
            << " final_test_acc=" << csv::format_double(report.final_test_acc());
    lines.push_back(summary.str());
    return lines;
}

void write_run_report(const RunReport& report, const std::string& path) {
    csv::write_lines(path, run_report_lines(report));
}

RunReport parse_run_report(const std::string& path) {
    const csv::Table t = csv::read_table(path);
    if (t.header != std::vector<std::string>{"epoch", "train_loss", "test_acc", "mean_eta_u"})
        throw std::runtime_error("run report: unexpected header in " + path);
    RunReport r;
    for (const auto& row : t.rows) {
        if (row.size() != 4) throw std::runtime_error("run report: bad row in " + path);
        EpochRecord e;
        e.epoch = csv::parse_long(row[0]);
        e.train_loss = csv::parse_double(row[1]);
        e.test_acc = csv::parse_double(row[2]);
        e.mean_eta_u = csv::parse_double(row[3]);
        r.epochs.push_back(e);
    }
    for (const auto& c : t.comments) {
        std::istringstream ss(c.substr(1));
        std::string tok;
        ss >> tok; // "summary"
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "objective") r.objective = objective_from_string(val);
            else if (key == "seed") r.seed = static_cast<uint64_t>(std::stoull(val));
            else if (key == "mu_target") r.mu_target = csv::parse_double(val);
            else if (key == "status") r.diverged = (val == "diverged");
        }
    }
    return r;
}

} // namespace pu
