#include "pulearn/model.hpp"

#include "pulearn/csv.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace pu {

std::string to_string(HiddenActivation a) {
    return a == HiddenActivation::Softsign ? "softsign" : "tanh";
}

HiddenActivation hidden_activation_from_string(const std::string& s) {
    if (s == "softsign") return HiddenActivation::Softsign;
    if (s == "tanh") return HiddenActivation::Tanh;
    throw std::invalid_argument("unknown activation: " + s);
}

long PredictorParams::input_dim() const {
    if (layers.empty()) throw std::logic_error("empty model");
    return layers.front().weight.cols();
}

long PredictorParams::num_params() const {
    long n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

std::vector<long> PredictorParams::shape() const {
    std::vector<long> s;
    if (layers.empty()) return s;
    s.push_back(layers.front().weight.cols());
    for (const auto& l : layers) s.push_back(l.weight.rows());
    return s;
}

void PredictorParams::validate_shapes() const {
    if (layers.empty()) throw std::invalid_argument("model: no layers");
    for (size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.weight.rows() != l.bias.size())
            throw std::invalid_argument("model: bias/weight row mismatch");
        if (i + 1 < layers.size() && layers[i + 1].weight.cols() != l.weight.rows())
            throw std::invalid_argument("model: adjacent layer dimensions disagree");
    }
    if (layers.back().weight.rows() != 1)
        throw std::invalid_argument("model: final layer must output a single score");
}

void PredictorParams::validate() const {
    validate_shapes();
    for (const auto& l : layers)
        if (!l.weight.allFinite() || !l.bias.allFinite())
            throw std::invalid_argument("model: non-finite parameter");
}

ParamGrads zeros_like(const PredictorParams& params) {
    ParamGrads g;
    g.reserve(params.layers.size());
    for (const auto& l : params.layers)
        g.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
    return g;
}

PredictorParams init_params(const std::vector<long>& shape, uint64_t seed,
                            HiddenActivation activation) {
    if (shape.size() < 2) throw std::invalid_argument("init_params: shape needs >= 2 dims");
    if (shape.back() != 1) throw std::invalid_argument("init_params: output dimension must be 1");
    for (long s : shape)
        if (s < 1) throw std::invalid_argument("init_params: non-positive layer width");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    PredictorParams p;
    p.activation = activation;
    for (size_t i = 0; i + 1 < shape.size(); ++i) {
        Layer l;
        const double scale = 1.0 / std::sqrt(static_cast<double>(shape[i]));
        l.weight.resize(shape[i + 1], shape[i]);
        for (long r = 0; r < l.weight.rows(); ++r)
            for (long c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = normal(rng) * scale;
        l.bias = Vector::Zero(shape[i + 1]);
        p.layers.push_back(std::move(l));
    }
    return p;
}

static Matrix apply_hidden(const Matrix& z, HiddenActivation a) {
    if (a == HiddenActivation::Softsign)
        return z.unaryExpr([](double t) { return t / (1.0 + std::abs(t)); });
    return z.array().tanh().matrix();
}

// derivative of the hidden activation expressed via the pre-activation
static Matrix hidden_derivative(const Matrix& z, HiddenActivation a) {
    if (a == HiddenActivation::Softsign)
        return z.unaryExpr([](double t) {
            const double d = 1.0 + std::abs(t);
            return 1.0 / (d * d);
        });
    return z.unaryExpr([](double t) {
        const double th = std::tanh(t);
        return 1.0 - th * th;
    });
}

std::pair<Vector, ForwardCache> forward(const PredictorParams& params, const Matrix& X) {
    params.validate_shapes();
    if (X.cols() != params.input_dim())
        throw std::invalid_argument("forward: input has " + std::to_string(X.cols()) +
                                    " columns, model expects " +
                                    std::to_string(params.input_dim()));

    ForwardCache cache;
    cache.shape = params.shape();
    cache.activations.push_back(X);
    Matrix a = X;
    for (size_t i = 0; i < params.layers.size(); ++i) {
        const auto& l = params.layers[i];
        Matrix z = (a * l.weight.transpose()).rowwise() + l.bias.transpose();
        cache.pre_activations.push_back(z);
        a = (i + 1 < params.layers.size()) ? apply_hidden(z, params.activation) : z;
        cache.activations.push_back(a);
    }

    if (!a.allFinite()) throw std::runtime_error("forward: non-finite score");

    Vector eta(X.rows());
    for (long i = 0; i < X.rows(); ++i) eta[i] = clamp_unit(sigmoid(a(i, 0)));
    cache.eta_hat = eta;
    return {eta, std::move(cache)};
}

Vector predict(const PredictorParams& params, const Matrix& X) {
    return forward(params, X).first;
}

ParamGrads backward(const PredictorParams& params, const ForwardCache& cache,
                    const Vector& dL_deta) {
    if (cache.shape != params.shape())
        throw std::invalid_argument("backward: cache does not match model shape");
    if (cache.eta_hat.size() != dL_deta.size())
        throw std::invalid_argument("backward: gradient length does not match cached batch");

    const long b = dL_deta.size();
    // dL/df = dL/deta * eta * (1 - eta)
    Matrix delta(b, 1);
    for (long i = 0; i < b; ++i) {
        const double e = cache.eta_hat[i];
        delta(i, 0) = dL_deta[i] * e * (1.0 - e);
    }

    ParamGrads grads = zeros_like(params);
    for (long li = static_cast<long>(params.layers.size()) - 1; li >= 0; --li) {
        grads[li].weight = delta.transpose() * cache.activations[li];
        grads[li].bias = delta.colwise().sum().transpose();
        if (li > 0) {
            Matrix da = delta * params.layers[li].weight;
            delta = da.cwiseProduct(hidden_derivative(cache.pre_activations[li - 1],
                                                      params.activation));
        }
    }
    return grads;
}

void save_params(const PredictorParams& params, const std::string& path) {
    params.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_params: cannot write " + path);
    out << "pulearn-params v1\n";
    out << to_string(params.activation) << '\n';
    const auto shape = params.shape();
    out << shape.size();
    for (long s : shape) out << ' ' << s;
    out << '\n';
    for (const auto& l : params.layers) {
        for (long r = 0; r < l.weight.rows(); ++r)
            for (long c = 0; c < l.weight.cols(); ++c)
                out << csv::format_double(l.weight(r, c)) << '\n';
        for (long r = 0; r < l.bias.size(); ++r) out << csv::format_double(l.bias[r]) << '\n';
    }
}

PredictorParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_params: cannot open " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != "pulearn-params v1")
        throw std::runtime_error("load_params: unrecognized checkpoint header in " + path);
    std::string act_name;
    std::getline(in, act_name);

    size_t ndims = 0;
    in >> ndims;
    std::vector<long> shape(ndims);
    for (auto& s : shape) in >> s;
    if (!in || ndims < 2) throw std::runtime_error("load_params: bad shape line in " + path);

    PredictorParams p;
    p.activation = hidden_activation_from_string(act_name);
    for (size_t i = 0; i + 1 < shape.size(); ++i) {
        Layer l;
        l.weight.resize(shape[i + 1], shape[i]);
        l.bias.resize(shape[i + 1]);
        for (long r = 0; r < l.weight.rows(); ++r)
            for (long c = 0; c < l.weight.cols(); ++c) in >> l.weight(r, c);
        for (long r = 0; r < l.bias.size(); ++r) in >> l.bias[r];
        p.layers.push_back(std::move(l));
    }
    if (!in) throw std::runtime_error("load_params: truncated checkpoint " + path);
    p.validate();
    return p;
}

} // namespace pu
