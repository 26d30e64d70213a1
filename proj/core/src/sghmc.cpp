#include "scengen/sghmc.hpp"

#include <cmath>
#include <string>

#include "scengen/errors.hpp"

namespace scengen {

void SghmcConfig::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("SghmcConfig: alpha must be > 0");
    if (!(eta >= 0.0)) throw ValidationError("SghmcConfig: eta must be >= 0");
    if (m_inner < 1) throw ValidationError("SghmcConfig: m_inner must be >= 1");
}

RmsPropState RmsPropState::zeros(std::size_t n, double decay, double epsilon) {
    RmsPropState s;
    s.accumulator.assign(n, 0.0);
    s.decay = decay;
    s.epsilon = epsilon;
    s.validate(n);
    return s;
}

void RmsPropState::validate(std::size_t n) const {
    if (accumulator.size() != n) {
        throw ValidationError("RmsPropState: accumulator length " +
                              std::to_string(accumulator.size()) + " does not match " +
                              std::to_string(n));
    }
    if (!(decay > 0.0 && decay < 1.0)) throw ValidationError("RmsPropState: decay not in (0, 1)");
    if (!(epsilon > 0.0)) throw ValidationError("RmsPropState: epsilon must be > 0");
    for (double a : accumulator) {
        if (!(a >= 0.0)) throw ValidationError("RmsPropState: negative accumulator entry");
    }
}

ParameterVector inject_noise(const ParameterVector& grad, const SghmcConfig& cfg,
                             RngStream& rng) {
    cfg.validate();
    if (cfg.eta == 0.0) return grad;
    const double sigma = std::sqrt(2.0 * cfg.eta * cfg.alpha);
    ParameterVector out(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) out[i] = grad[i] + sigma * rng.normal();
    return out;
}

PreconditionResult rmsprop_precondition(const RmsPropState& state, const ParameterVector& grad) {
    state.validate(grad.size());
    PreconditionResult r;
    r.state = state;
    r.direction.resize(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        const double acc = state.decay * state.accumulator[i] + (1.0 - state.decay) * g * g;
        r.state.accumulator[i] = acc;
        r.direction[i] = g / (std::sqrt(acc) + state.epsilon);
    }
    return r;
}

void sghmc_step(ParameterVector& theta, const GradFn& grad_fn, const SghmcConfig& cfg,
                RmsPropState& rms, RngStream& rng) {
    cfg.validate();
    rms.validate(theta.size());
    for (int it = 0; it < cfg.m_inner; ++it) {
        ParameterVector g = grad_fn(theta);
        if (g.size() != theta.size()) {
            throw ValidationError("sghmc_step: grad_fn returned wrong length");
        }
        if (!all_finite(g)) {
            throw NumericError("sghmc_step: non-finite gradient at inner iteration " +
                               std::to_string(it));
        }
        g = inject_noise(g, cfg, rng);
        PreconditionResult pre = rmsprop_precondition(rms, g);
        rms = std::move(pre.state);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.alpha * pre.direction[i];
    }
}

void clip_weights(ParameterVector& theta, double c) {
    if (!(c >= 0.0)) throw ValidationError("clip_weights: c must be >= 0");
    for (double& x : theta) {
        if (x > c) x = c;
        else if (x < -c) x = -c;
    }
}

}  // namespace scengen
