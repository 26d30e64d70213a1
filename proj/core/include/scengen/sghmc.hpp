#pragma once

#include <functional>

#include "scengen/nn.hpp"
#include "scengen/rng.hpp"

namespace scengen {

struct SghmcConfig {
    double alpha = 1e-4;  // step size, > 0
    double eta = 0.01;    // noise temperature, >= 0
    int m_inner = 2;      // gradient steps per update, >= 1

    void validate() const;
};

struct RmsPropState {
    ParameterVector accumulator;  // running mean of squared gradients, >= 0
    double decay = 0.9;           // in (0, 1)
    double epsilon = 1e-8;        // > 0

    static RmsPropState zeros(std::size_t n, double decay = 0.9, double epsilon = 1e-8);
    void validate(std::size_t n) const;
};

// grad + n with n ~ N(0, 2*eta*alpha*I). eta = 0 returns grad unchanged and
// leaves the rng untouched.
ParameterVector inject_noise(const ParameterVector& grad, const SghmcConfig& cfg, RngStream& rng);

struct PreconditionResult {
    ParameterVector direction;
    RmsPropState state;
};

// acc' = decay*acc + (1-decay)*g^2; direction = g / (sqrt(acc') + epsilon).
PreconditionResult rmsprop_precondition(const RmsPropState& state, const ParameterVector& grad);

using GradFn = std::function<ParameterVector(const ParameterVector&)>;

// m_inner iterations of: g = grad_fn(theta) + noise; theta -= alpha * RMSProp(g).
// Throws NumericError on a non-finite gradient.
void sghmc_step(ParameterVector& theta, const GradFn& grad_fn, const SghmcConfig& cfg,
                RmsPropState& rms, RngStream& rng);

// Clamp every parameter to [-c, c]. c = 0 zeroes the vector; c < 0 is rejected.
void clip_weights(ParameterVector& theta, double c);

}  // namespace scengen
