#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "scengen/matrix.hpp"
#include "scengen/nn.hpp"

namespace scengen {

// Zero-mean Gaussian prior over a parameter vector, described by its scale.
// gamma = +inf means flat (no prior pull).
struct PriorSpec {
    double gamma = 10.0;

    static PriorSpec gaussian(double gamma);
    static PriorSpec flat() {
        return PriorSpec{std::numeric_limits<double>::infinity()};
    }
    bool is_flat() const { return std::isinf(gamma); }
};

struct LossReport {
    double l_g = 0.0;
    double l_d = 0.0;
    double value_v = 0.0;               // always exactly -l_d
    double wasserstein_estimate = 0.0;  // the same dual estimate, == value_v
};

// Critic-score losses. Scores are one value per sample.
double generator_loss(const std::vector<double>& fake_scores);
double discriminator_loss(const std::vector<double>& real_scores,
                          const std::vector<double>& fake_scores);
// Empirical dual value; computed as the exact negation of discriminator_loss
// so the two are bitwise-consistent.
double value_function(const std::vector<double>& real_scores,
                      const std::vector<double>& fake_scores);

LossReport make_loss_report(double l_g, const std::vector<double>& real_scores,
                            const std::vector<double>& fake_scores);

// log p(theta) up to an additive constant, and its gradient -theta / gamma^2.
// Flat prior: 0 and zeros.
double log_prior(const ParameterVector& theta, const PriorSpec& prior);
ParameterVector log_prior_grad(const ParameterVector& theta, const PriorSpec& prior);

// Gradient of the minimized discriminator objective
//   -(1/m) sum_i D(x_i) + (1/(m J)) sum_{i,j} D(G_j(z_i)) - (1/N) log p(theta_d)
// with respect to theta_d. Flat prior skips the prior term entirely.
ParameterVector posterior_grad_discriminator(const MlpNetwork& d_net, const MlpNetwork& g_net,
                                             const ParameterVector& theta_d,
                                             const std::vector<ParameterVector>& g_particles,
                                             const Matrix& real_batch, const Matrix& noise_batch,
                                             const PriorSpec& prior_d, std::uint64_t running_n);

// Same gradient with the generator outputs precomputed, one fake batch per
// generator particle. Lets a caller reuse fakes across repeated evaluations.
ParameterVector posterior_grad_discriminator_fakes(const MlpNetwork& d_net,
                                                   const ParameterVector& theta_d,
                                                   const std::vector<Matrix>& fake_batches,
                                                   const Matrix& real_batch,
                                                   const PriorSpec& prior_d,
                                                   std::uint64_t running_n);

// Gradient of the minimized generator objective
//   -(1/(m K)) sum_{i,k} D_k(G(z_i; theta_g)) - (1/N) log p(theta_g)
// with respect to theta_g.
ParameterVector posterior_grad_generator(const MlpNetwork& g_net, const MlpNetwork& d_net,
                                         const ParameterVector& theta_g,
                                         const std::vector<ParameterVector>& d_particles,
                                         const Matrix& noise_batch, const PriorSpec& prior_g,
                                         std::uint64_t running_n);

}  // namespace scengen
