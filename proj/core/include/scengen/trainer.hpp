#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "scengen/data.hpp"
#include "scengen/losses.hpp"
#include "scengen/nn.hpp"
#include "scengen/sghmc.hpp"

namespace scengen {

struct ConvergencePolicy {
    std::size_t window = 10;  // >= 2
    double tol = 1e-3;        // > 0
};

struct TrainingConfig {
    double alpha = 1e-4;   // step size
    double eta = 0.01;     // gradient-noise temperature
    double clip_c = 0.01;  // discriminator weight clip
    std::size_t batch_size = 32;
    std::size_t n_discri = 5;     // discriminator steps per round
    std::size_t n_d_mc = 1;       // discriminator MC iterations per round
    std::size_t n_g_mc = 1;       // generator MC iterations per round
    std::size_t m_inner = 2;      // gradient steps per particle update
    std::size_t j_particles = 2;  // generator particles
    std::size_t d_particles = 1;  // discriminator particles
    PriorSpec prior_g = PriorSpec::gaussian(10.0);
    PriorSpec prior_d = PriorSpec::gaussian(10.0);
    std::size_t latent_dim = 32;
    std::size_t max_epochs = 1000;
    std::uint64_t seed = 0;
    ConvergencePolicy convergence;

    void validate() const;
};

struct Particle {
    ParameterVector theta;
    RmsPropState rms;
    RngStream noise_rng;  // private stream for gradient-noise injection
};

struct ParticleEnsemble {
    MlpNetwork g_net;
    MlpNetwork d_net;
    std::size_t n_sites = 0;
    std::size_t timesteps = 0;
    std::size_t latent_dim = 0;
    std::vector<Particle> generators;
    std::vector<Particle> discriminators;
};

struct TrainerState {
    std::uint64_t running_n = 0;  // m per consumed mini-batch, both phases
    std::uint64_t epoch = 0;      // completed outer rounds
    std::vector<LossReport> loss_history;  // one report per round
};

// True once epoch >= max_epochs, or once the mean of |value_v| over the last
// `window` reports differs from the previous window's mean by less than tol.
bool has_converged(const TrainerState& state, const ConvergencePolicy& policy,
                   std::size_t max_epochs);

// Complete trainer snapshot; enough to resume bit-exactly.
struct CheckpointData {
    TrainingConfig config;
    ParticleEnsemble ensemble;
    TrainerState state;
    std::string shuffle_rng;
    std::string noise_rng;
    std::string eval_rng;
    std::vector<std::uint64_t> permutation;
    std::uint64_t cursor = 0;
};

class BayesTrainer {
  public:
    // Stream derivation tags. Fixed constants so an independent loop (or a
    // resumed run) can reconstruct the exact same streams from the run seed.
    enum StreamKind : std::uint32_t {
        k_shuffle = 1,
        k_noise = 2,
        k_eval = 3,
        k_g_init = 4,
        k_d_init = 5,
        k_g_noise = 6,
        k_d_noise = 7,
    };

    BayesTrainer(TrainingConfig config, ScenarioBatch data, MlpNetwork g_net, MlpNetwork d_net);
    BayesTrainer(CheckpointData checkpoint, ScenarioBatch data);

    // One outer round: n_d_mc x n_discri discriminator updates (clipped after
    // every update), then n_g_mc generator updates, then a loss evaluation on
    // the dedicated eval stream.
    void run_round();

    // Rounds until has_converged; on_round fires after each one.
    void run(const std::function<void(const BayesTrainer&)>& on_round = {});

    bool converged() const;

    const ParticleEnsemble& ensemble() const { return ensemble_; }
    const TrainerState& state() const { return state_; }
    const TrainingConfig& config() const { return config_; }

    // Generator losses from the latest evaluation, one per particle.
    const std::vector<double>& per_particle_generator_loss() const { return last_lg_; }

    // Raises the round budget so a resumed run can continue past the
    // checkpointed max_epochs.
    void set_max_epochs(std::size_t n) { config_.max_epochs = n; }

    CheckpointData checkpoint() const;

  private:
    void validate_shapes() const;
    void reshuffle();
    Matrix next_data_batch();
    void evaluate_round();

    TrainingConfig config_;
    ScenarioBatch data_;
    Matrix flat_data_;
    ParticleEnsemble ensemble_;
    TrainerState state_;
    RngStream shuffle_rng_;
    RngStream noise_rng_;
    RngStream eval_rng_;
    std::vector<std::uint64_t> perm_;
    std::uint64_t cursor_ = 0;
    std::vector<double> last_lg_;
};

std::pair<ParticleEnsemble, TrainerState> train(
    const TrainingConfig& config, const ScenarioBatch& data, const MlpNetwork& g_net,
    const MlpNetwork& d_net, const std::function<void(const BayesTrainer&)>& on_round = {});

// Draws `count` latent vectors from rng and decodes them with one generator
// particle into day samples.
ScenarioBatch generate(const ParticleEnsemble& ensemble, std::size_t generator_index,
                       std::size_t count, RngStream& rng);

}  // namespace scengen
