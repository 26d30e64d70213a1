#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengen/matrix.hpp"
#include "scengen/rng.hpp"

namespace scengen {

enum class Activation { linear, relu, leaky_relu, tanh, sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::linear;
    double leaky_slope = 0.2;  // used only by leaky_relu; must be in (0, 1)
};

enum class NetRole { generator, discriminator };

// Fully connected net. Layer k maps width in_k -> out_k as act(x W^T + b),
// with W stored (out x in) row-major.
struct MlpNetwork {
    NetRole role = NetRole::generator;
    std::vector<LayerSpec> layers;

    // Validates width chaining and role conventions: a generator ends in
    // sigmoid, a discriminator ends linear with a single output.
    static MlpNetwork make(NetRole role, std::vector<LayerSpec> layers);

    std::size_t input_width() const { return layers.front().in; }
    std::size_t output_width() const { return layers.back().out; }
};

// Flat parameter layout: for each layer, weights row-major then bias.
using ParameterVector = std::vector<double>;

std::size_t param_count(const MlpNetwork& net);

// Per layer: weights uniform on +-sqrt(6 / (fan_in + fan_out)), biases zero.
ParameterVector init_weights(const MlpNetwork& net, std::uint64_t seed);
ParameterVector init_weights(const MlpNetwork& net, RngStream& rng);

// Per-layer inputs and pre-activations cached by forward for backprop.
struct ForwardTrace {
    Matrix input;                       // the batch fed to layer 0
    std::vector<Matrix> pre;            // pre-activations z_k, one per layer
    std::vector<Matrix> activations;    // act(z_k), one per layer
    const Matrix& output() const { return activations.back(); }
};

ForwardTrace forward(const MlpNetwork& net, const ParameterVector& theta, const Matrix& batch);

struct BackwardResult {
    ParameterVector param_grad;  // same layout/length as theta
    Matrix input_grad;           // d(objective)/d(batch), batch-shaped
};

// Gradient of sum_ij(output_grad .* output) with respect to theta and the
// input batch. output_grad must match the forward output shape.
BackwardResult backward(const MlpNetwork& net, const ParameterVector& theta,
                        const ForwardTrace& trace, const Matrix& output_grad);

// Elementwise parameter arithmetic; operands must have equal length.
ParameterVector param_add(const ParameterVector& a, const ParameterVector& b);
ParameterVector param_sub(const ParameterVector& a, const ParameterVector& b);
ParameterVector param_scale(const ParameterVector& a, double s);
ParameterVector param_mul(const ParameterVector& a, const ParameterVector& b);

bool all_finite(const ParameterVector& v);

}  // namespace scengen
