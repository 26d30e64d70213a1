#include "scengen/trainer.hpp"

#include <cmath>
#include <string>

#include "scengen/errors.hpp"

namespace scengen {

void TrainingConfig::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("TrainingConfig: alpha must be > 0");
    if (!(eta >= 0.0)) throw ValidationError("TrainingConfig: eta must be >= 0");
    if (!(clip_c > 0.0)) throw ValidationError("TrainingConfig: clip_c must be > 0");
    if (batch_size < 1) throw ValidationError("TrainingConfig: batch_size must be >= 1");
    if (n_discri < 1) throw ValidationError("TrainingConfig: n_discri must be >= 1");
    if (n_d_mc < 1) throw ValidationError("TrainingConfig: n_d_mc must be >= 1");
    if (n_g_mc < 1) throw ValidationError("TrainingConfig: n_g_mc must be >= 1");
    if (m_inner < 1) throw ValidationError("TrainingConfig: m_inner must be >= 1");
    if (j_particles < 1) throw ValidationError("TrainingConfig: j_particles must be >= 1");
    if (d_particles < 1) throw ValidationError("TrainingConfig: d_particles must be >= 1");
    if (latent_dim < 1) throw ValidationError("TrainingConfig: latent_dim must be >= 1");
    if (max_epochs < 1) throw ValidationError("TrainingConfig: max_epochs must be >= 1");
    if (convergence.window < 2) throw ValidationError("TrainingConfig: window must be >= 2");
    if (!(convergence.tol > 0.0)) throw ValidationError("TrainingConfig: tol must be > 0");
}

bool has_converged(const TrainerState& state, const ConvergencePolicy& policy,
                   std::size_t max_epochs) {
    if (policy.window < 2) throw ValidationError("has_converged: window must be >= 2");
    if (!(policy.tol > 0.0)) throw ValidationError("has_converged: tol must be > 0");
    if (state.epoch >= max_epochs) return true;
    const std::vector<LossReport>& h = state.loss_history;
    const std::size_t w = policy.window;
    if (h.size() < 2 * w) return false;
    double recent = 0.0, previous = 0.0;
    for (std::size_t i = h.size() - w; i < h.size(); ++i) recent += std::abs(h[i].value_v);
    for (std::size_t i = h.size() - 2 * w; i < h.size() - w; ++i) {
        previous += std::abs(h[i].value_v);
    }
    recent /= static_cast<double>(w);
    previous /= static_cast<double>(w);
    return std::abs(recent - previous) < policy.tol;
}

BayesTrainer::BayesTrainer(TrainingConfig config, ScenarioBatch data, MlpNetwork g_net,
                           MlpNetwork d_net)
    : config_(std::move(config)), data_(std::move(data)) {
    config_.validate();
    ensemble_.g_net = std::move(g_net);
    ensemble_.d_net = std::move(d_net);
    ensemble_.n_sites = data_.n_sites;
    ensemble_.timesteps = data_.timesteps;
    ensemble_.latent_dim = config_.latent_dim;
    validate_shapes();

    const std::uint64_t seed = config_.seed;
    for (std::size_t j = 0; j < config_.j_particles; ++j) {
        Particle p;
        RngStream init = RngStream::child(seed, k_g_init, static_cast<std::uint32_t>(j));
        p.theta = init_weights(ensemble_.g_net, init);
        p.rms = RmsPropState::zeros(p.theta.size());
        p.noise_rng = RngStream::child(seed, k_g_noise, static_cast<std::uint32_t>(j));
        ensemble_.generators.push_back(std::move(p));
    }
    for (std::size_t k = 0; k < config_.d_particles; ++k) {
        Particle p;
        RngStream init = RngStream::child(seed, k_d_init, static_cast<std::uint32_t>(k));
        p.theta = init_weights(ensemble_.d_net, init);
        p.rms = RmsPropState::zeros(p.theta.size());
        p.noise_rng = RngStream::child(seed, k_d_noise, static_cast<std::uint32_t>(k));
        ensemble_.discriminators.push_back(std::move(p));
    }
    shuffle_rng_ = RngStream::child(seed, k_shuffle);
    noise_rng_ = RngStream::child(seed, k_noise);
    eval_rng_ = RngStream::child(seed, k_eval);
    flat_data_ = flatten_batch(data_);
}

BayesTrainer::BayesTrainer(CheckpointData checkpoint, ScenarioBatch data)
    : config_(std::move(checkpoint.config)),
      data_(std::move(data)),
      ensemble_(std::move(checkpoint.ensemble)),
      state_(std::move(checkpoint.state)),
      perm_(std::move(checkpoint.permutation)),
      cursor_(checkpoint.cursor) {
    config_.validate();
    if (ensemble_.n_sites != data_.n_sites || ensemble_.timesteps != data_.timesteps) {
        throw ValidationError("resume: data shape " + std::to_string(data_.n_sites) + "x" +
                              std::to_string(data_.timesteps) + " does not match checkpoint " +
                              std::to_string(ensemble_.n_sites) + "x" +
                              std::to_string(ensemble_.timesteps));
    }
    validate_shapes();
    if (ensemble_.generators.size() != config_.j_particles ||
        ensemble_.discriminators.size() != config_.d_particles) {
        throw ValidationError("resume: particle counts do not match config");
    }
    for (std::uint64_t idx : perm_) {
        if (idx >= data_.count()) {
            throw ValidationError("resume: permutation index out of range");
        }
    }
    if (cursor_ > perm_.size()) throw ValidationError("resume: cursor out of range");
    shuffle_rng_ = RngStream::deserialize(checkpoint.shuffle_rng);
    noise_rng_ = RngStream::deserialize(checkpoint.noise_rng);
    eval_rng_ = RngStream::deserialize(checkpoint.eval_rng);
    flat_data_ = flatten_batch(data_);
}

void BayesTrainer::validate_shapes() const {
    const std::size_t width = data_.n_sites * data_.timesteps;
    if (ensemble_.g_net.role != NetRole::generator) {
        throw ValidationError("trainer: g_net must have generator role");
    }
    if (ensemble_.d_net.role != NetRole::discriminator) {
        throw ValidationError("trainer: d_net must have discriminator role");
    }
    if (ensemble_.g_net.input_width() != config_.latent_dim) {
        throw ValidationError("trainer: generator input width " +
                              std::to_string(ensemble_.g_net.input_width()) +
                              " != latent_dim " + std::to_string(config_.latent_dim));
    }
    if (ensemble_.g_net.output_width() != width) {
        throw ValidationError("trainer: generator output width " +
                              std::to_string(ensemble_.g_net.output_width()) +
                              " != n_sites * timesteps = " + std::to_string(width));
    }
    if (ensemble_.d_net.input_width() != width) {
        throw ValidationError("trainer: discriminator input width " +
                              std::to_string(ensemble_.d_net.input_width()) +
                              " != n_sites * timesteps = " + std::to_string(width));
    }
    if (config_.batch_size > data_.count()) {
        throw ValidationError("trainer: batch_size " + std::to_string(config_.batch_size) +
                              " exceeds dataset size " + std::to_string(data_.count()));
    }
}

void BayesTrainer::reshuffle() {
    std::vector<std::size_t> perm = shuffled_indices(data_.count(), shuffle_rng_);
    perm_.assign(perm.begin(), perm.end());
    cursor_ = 0;
}

Matrix BayesTrainer::next_data_batch() {
    const std::size_t m = config_.batch_size;
    // A tail shorter than m is skipped; those samples return in later passes.
    if (cursor_ + m > perm_.size()) reshuffle();
    Matrix rows(m, flat_data_.cols);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t src = static_cast<std::size_t>(perm_[cursor_ + r]);
        std::copy_n(flat_data_.data.begin() + src * flat_data_.cols, flat_data_.cols,
                    rows.data.begin() + r * flat_data_.cols);
    }
    cursor_ += m;
    return rows;
}

void BayesTrainer::run_round() {
    const std::size_t m = config_.batch_size;
    SghmcConfig scfg;
    scfg.alpha = config_.alpha;
    scfg.eta = config_.eta;
    scfg.m_inner = static_cast<int>(config_.m_inner);

    for (std::size_t dmc = 0; dmc < config_.n_d_mc; ++dmc) {
        for (std::size_t t = 0; t < config_.n_discri; ++t) {
            Matrix x = next_data_batch();
            Matrix z = gaussian_matrix(m, config_.latent_dim, noise_rng_);
            state_.running_n += m;

            // Generator thetas are fixed for the whole phase, so the fake
            // batches can be computed once per mini-batch.
            std::vector<Matrix> fakes;
            fakes.reserve(ensemble_.generators.size());
            for (const Particle& g : ensemble_.generators) {
                fakes.push_back(forward(ensemble_.g_net, g.theta, z).output());
            }
            for (Particle& d : ensemble_.discriminators) {
                GradFn fn = [&](const ParameterVector& th) {
                    return posterior_grad_discriminator_fakes(ensemble_.d_net, th, fakes, x,
                                                              config_.prior_d, state_.running_n);
                };
                sghmc_step(d.theta, fn, scfg, d.rms, d.noise_rng);
                clip_weights(d.theta, config_.clip_c);
            }
        }
    }

    // Discriminator ensemble snapshot for the generator phase.
    std::vector<ParameterVector> d_snapshot;
    d_snapshot.reserve(ensemble_.discriminators.size());
    for (const Particle& d : ensemble_.discriminators) d_snapshot.push_back(d.theta);

    for (std::size_t gmc = 0; gmc < config_.n_g_mc; ++gmc) {
        Matrix z = gaussian_matrix(m, config_.latent_dim, noise_rng_);
        state_.running_n += m;
        for (Particle& g : ensemble_.generators) {
            GradFn fn = [&](const ParameterVector& th) {
                return posterior_grad_generator(ensemble_.g_net, ensemble_.d_net, th, d_snapshot,
                                                z, config_.prior_g, state_.running_n);
            };
            sghmc_step(g.theta, fn, scfg, g.rms, g.noise_rng);
        }
    }

    state_.epoch += 1;
    evaluate_round();
}

void BayesTrainer::evaluate_round() {
    const std::size_t m = config_.batch_size;
    const std::size_t n = data_.count();
    Matrix x(m, flat_data_.cols);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t src = static_cast<std::size_t>(eval_rng_.below(n));
        std::copy_n(flat_data_.data.begin() + src * flat_data_.cols, flat_data_.cols,
                    x.data.begin() + r * flat_data_.cols);
    }
    Matrix z = gaussian_matrix(m, config_.latent_dim, eval_rng_);

    const double k_count = static_cast<double>(ensemble_.discriminators.size());
    std::vector<double> real(m, 0.0);
    for (const Particle& d : ensemble_.discriminators) {
        const Matrix scores = forward(ensemble_.d_net, d.theta, x).output();
        for (std::size_t i = 0; i < m; ++i) real[i] += scores.data[i];
    }
    for (double& v : real) v /= k_count;

    last_lg_.assign(ensemble_.generators.size(), 0.0);
    std::vector<double> fake(m, 0.0);
    std::vector<double> score_j(m);
    for (std::size_t j = 0; j < ensemble_.generators.size(); ++j) {
        const Matrix fake_j =
            forward(ensemble_.g_net, ensemble_.generators[j].theta, z).output();
        std::fill(score_j.begin(), score_j.end(), 0.0);
        for (const Particle& d : ensemble_.discriminators) {
            const Matrix scores = forward(ensemble_.d_net, d.theta, fake_j).output();
            for (std::size_t i = 0; i < m; ++i) score_j[i] += scores.data[i];
        }
        for (double& v : score_j) v /= k_count;
        last_lg_[j] = generator_loss(score_j);
        for (std::size_t i = 0; i < m; ++i) fake[i] += score_j[i];
    }
    const double j_count = static_cast<double>(ensemble_.generators.size());
    for (double& v : fake) v /= j_count;

    double lg_mean = 0.0;
    for (double v : last_lg_) lg_mean += v;
    lg_mean /= j_count;

    LossReport report = make_loss_report(lg_mean, real, fake);
    if (!std::isfinite(report.l_g) || !std::isfinite(report.l_d)) {
        throw NumericError("trainer: non-finite loss at epoch " + std::to_string(state_.epoch));
    }
    state_.loss_history.push_back(report);
}

bool BayesTrainer::converged() const {
    return has_converged(state_, config_.convergence, config_.max_epochs);
}

void BayesTrainer::run(const std::function<void(const BayesTrainer&)>& on_round) {
    while (!converged()) {
        run_round();
        if (on_round) on_round(*this);
    }
}

CheckpointData BayesTrainer::checkpoint() const {
    CheckpointData c;
    c.config = config_;
    c.ensemble = ensemble_;
    c.state = state_;
    c.shuffle_rng = shuffle_rng_.serialize();
    c.noise_rng = noise_rng_.serialize();
    c.eval_rng = eval_rng_.serialize();
    c.permutation = perm_;
    c.cursor = cursor_;
    return c;
}

std::pair<ParticleEnsemble, TrainerState> train(
    const TrainingConfig& config, const ScenarioBatch& data, const MlpNetwork& g_net,
    const MlpNetwork& d_net, const std::function<void(const BayesTrainer&)>& on_round) {
    BayesTrainer trainer(config, data, g_net, d_net);
    trainer.run(on_round);
    return {trainer.ensemble(), trainer.state()};
}

ScenarioBatch generate(const ParticleEnsemble& ensemble, std::size_t generator_index,
                       std::size_t count, RngStream& rng) {
    if (generator_index >= ensemble.generators.size()) {
        throw ValidationError("generate: generator index " + std::to_string(generator_index) +
                              " out of range (have " +
                              std::to_string(ensemble.generators.size()) + ")");
    }
    if (count < 1) throw ValidationError("generate: count must be >= 1");
    Matrix z = gaussian_matrix(count, ensemble.latent_dim, rng);
    Matrix out = forward(ensemble.g_net, ensemble.generators[generator_index].theta, z).output();
    return unflatten_rows(out, ensemble.n_sites, ensemble.timesteps,
                          Provenance{Provenance::Kind::generated,
                                     static_cast<int>(generator_index)});
}

}  // namespace scengen
