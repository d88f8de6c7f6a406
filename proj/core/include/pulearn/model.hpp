#pragma once

#include "pulearn/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pu {

enum class HiddenActivation { Softsign, Tanh };

std::string to_string(HiddenActivation a);
HiddenActivation hidden_activation_from_string(const std::string& s);

struct Layer {
    Matrix weight; // out x in
    Vector bias;   // out
};

/// Layered affine predictor producing a single raw score f(x); the
/// posterior estimate is the clamped logistic sigma(f(x)). Hidden layers
/// use a smooth sigmoidal activation, the output layer is linear.
struct PredictorParams {
    std::vector<Layer> layers;
    HiddenActivation activation = HiddenActivation::Softsign;

    long input_dim() const;
    long num_params() const;
    std::vector<long> shape() const;
    /// Dimension consistency only; cheap enough for hot paths.
    void validate_shapes() const;
    /// Shape checks plus a finiteness scan of every parameter.
    void validate() const;
};

/// Same tensor layout as PredictorParams; used for gradients and
/// optimizer moments.
using ParamGrads = std::vector<Layer>;

ParamGrads zeros_like(const PredictorParams& params);

/// Per-layer intermediate values for one batch, kept for backpropagation.
struct ForwardCache {
    std::vector<Matrix> activations;     // [0] = input, per layer output
    std::vector<Matrix> pre_activations; // affine outputs before the nonlinearity
    Vector eta_hat;                      // clamped sigmoid of the final score
    std::vector<long> shape;             // of the params that produced it
};

/// Weights ~ N(0, 1/fan_in), biases zero. `shape` must end with 1.
PredictorParams init_params(const std::vector<long>& shape, uint64_t seed,
                            HiddenActivation activation = HiddenActivation::Softsign);

/// Batched forward pass: X is b x d, returns eta_hat in (0,1)^b plus the
/// cache needed for backward().
std::pair<Vector, ForwardCache> forward(const PredictorParams& params, const Matrix& X);

/// Convenience wrapper that drops the cache.
Vector predict(const PredictorParams& params, const Matrix& X);

/// Chain-rule pass from dL/d(eta_hat) to every parameter, using
/// d(eta)/df = eta*(1-eta). The cache must come from a forward() call on
/// the same parameter shapes.
ParamGrads backward(const PredictorParams& params, const ForwardCache& cache,
                    const Vector& dL_deta);

/// Text checkpoint: shapes, activation, then row-major weights with full
/// round-trip precision. Stable within a major release.
void save_params(const PredictorParams& params, const std::string& path);
PredictorParams load_params(const std::string& path);

} // namespace pu
