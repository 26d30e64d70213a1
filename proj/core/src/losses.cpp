#include "scengen/losses.hpp"

#include <cmath>

#include "scengen/errors.hpp"

namespace scengen {

PriorSpec PriorSpec::gaussian(double gamma) {
    if (!(gamma > 0.0)) throw ValidationError("PriorSpec: gamma must be > 0");
    return PriorSpec{gamma};
}

namespace {

double mean(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ValidationError(std::string(what) + ": empty score vector");
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

void check_running_n(std::uint64_t n) {
    if (n == 0) throw ValidationError("running_n must be >= 1");
}

}  // namespace

double generator_loss(const std::vector<double>& fake_scores) {
    return -mean(fake_scores, "generator_loss");
}

double discriminator_loss(const std::vector<double>& real_scores,
                          const std::vector<double>& fake_scores) {
    return -mean(real_scores, "discriminator_loss") + mean(fake_scores, "discriminator_loss");
}

double value_function(const std::vector<double>& real_scores,
                      const std::vector<double>& fake_scores) {
    return -discriminator_loss(real_scores, fake_scores);
}

LossReport make_loss_report(double l_g, const std::vector<double>& real_scores,
                            const std::vector<double>& fake_scores) {
    LossReport r;
    r.l_g = l_g;
    r.l_d = discriminator_loss(real_scores, fake_scores);
    r.value_v = -r.l_d;
    r.wasserstein_estimate = r.value_v;
    return r;
}

double log_prior(const ParameterVector& theta, const PriorSpec& prior) {
    if (prior.is_flat()) return 0.0;
    double ss = 0.0;
    for (double x : theta) ss += x * x;
    return -ss / (2.0 * prior.gamma * prior.gamma);
}

ParameterVector log_prior_grad(const ParameterVector& theta, const PriorSpec& prior) {
    if (prior.is_flat()) return ParameterVector(theta.size(), 0.0);
    const double inv_var = 1.0 / (prior.gamma * prior.gamma);
    ParameterVector g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) g[i] = -theta[i] * inv_var;
    return g;
}

namespace {

// Subtracts (1/N) * d(log p)/d(theta) from the loss gradient. Skipped for flat
// priors rather than adding zeros, to keep the flat path bit-exact.
ParameterVector apply_prior(ParameterVector grad, const ParameterVector& theta,
                            const PriorSpec& prior, std::uint64_t running_n) {
    if (prior.is_flat()) return grad;
    return param_sub(grad,
                     param_scale(log_prior_grad(theta, prior),
                                 1.0 / static_cast<double>(running_n)));
}

}  // namespace

ParameterVector posterior_grad_discriminator(const MlpNetwork& d_net, const MlpNetwork& g_net,
                                             const ParameterVector& theta_d,
                                             const std::vector<ParameterVector>& g_particles,
                                             const Matrix& real_batch, const Matrix& noise_batch,
                                             const PriorSpec& prior_d, std::uint64_t running_n) {
    if (g_particles.empty()) throw ValidationError("posterior_grad_discriminator: no generators");
    if (real_batch.rows != noise_batch.rows) {
        throw ValidationError("posterior_grad_discriminator: real and noise batch sizes differ");
    }
    std::vector<Matrix> fakes;
    fakes.reserve(g_particles.size());
    for (const ParameterVector& theta_g : g_particles) {
        fakes.push_back(forward(g_net, theta_g, noise_batch).output());
    }
    return posterior_grad_discriminator_fakes(d_net, theta_d, fakes, real_batch, prior_d,
                                              running_n);
}

ParameterVector posterior_grad_discriminator_fakes(const MlpNetwork& d_net,
                                                   const ParameterVector& theta_d,
                                                   const std::vector<Matrix>& fake_batches,
                                                   const Matrix& real_batch,
                                                   const PriorSpec& prior_d,
                                                   std::uint64_t running_n) {
    check_running_n(running_n);
    if (fake_batches.empty()) {
        throw ValidationError("posterior_grad_discriminator: no fake batches");
    }
    const std::size_t m = real_batch.rows;
    for (const Matrix& f : fake_batches) {
        if (f.rows != m) {
            throw ValidationError("posterior_grad_discriminator: fake batch size mismatch");
        }
    }

    ForwardTrace real_trace = forward(d_net, theta_d, real_batch);
    Matrix up_real(m, 1, -1.0 / static_cast<double>(m));
    ParameterVector grad = backward(d_net, theta_d, real_trace, up_real).param_grad;

    Matrix up_fake(m, 1, 1.0 / static_cast<double>(m * fake_batches.size()));
    for (const Matrix& fake : fake_batches) {
        ForwardTrace fake_trace = forward(d_net, theta_d, fake);
        grad = param_add(grad, backward(d_net, theta_d, fake_trace, up_fake).param_grad);
    }
    return apply_prior(std::move(grad), theta_d, prior_d, running_n);
}

ParameterVector posterior_grad_generator(const MlpNetwork& g_net, const MlpNetwork& d_net,
                                         const ParameterVector& theta_g,
                                         const std::vector<ParameterVector>& d_particles,
                                         const Matrix& noise_batch, const PriorSpec& prior_g,
                                         std::uint64_t running_n) {
    check_running_n(running_n);
    if (d_particles.empty()) throw ValidationError("posterior_grad_generator: no discriminators");
    const std::size_t m = noise_batch.rows;

    ForwardTrace g_trace = forward(g_net, theta_g, noise_batch);
    Matrix up(m, 1, -1.0 / static_cast<double>(m * d_particles.size()));

    Matrix dfake;
    for (std::size_t k = 0; k < d_particles.size(); ++k) {
        ForwardTrace d_trace = forward(d_net, d_particles[k], g_trace.output());
        BackwardResult r = backward(d_net, d_particles[k], d_trace, up);
        if (k == 0) {
            dfake = std::move(r.input_grad);
        } else {
            for (std::size_t i = 0; i < dfake.size(); ++i) dfake.data[i] += r.input_grad.data[i];
        }
    }
    ParameterVector grad = backward(g_net, theta_g, g_trace, dfake).param_grad;
    return apply_prior(std::move(grad), theta_g, prior_g, running_n);
}

}  // namespace scengen
