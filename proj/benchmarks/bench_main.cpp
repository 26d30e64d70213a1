// Microbenchmarks for the hot paths: network passes, posterior gradients,
// full training rounds, and dataset synthesis.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "scengen/data.hpp"
#include "scengen/losses.hpp"
#include "scengen/nn.hpp"
#include "scengen/trainer.hpp"

namespace {

using namespace scengen;

MlpNetwork bench_generator(std::size_t latent, std::size_t out) {
    return MlpNetwork::make(NetRole::generator, {{latent, 64, Activation::relu},
                                                 {64, 128, Activation::relu},
                                                 {128, out, Activation::sigmoid}});
}

MlpNetwork bench_discriminator(std::size_t in) {
    return MlpNetwork::make(NetRole::discriminator, {{in, 128, Activation::leaky_relu},
                                                     {128, 64, Activation::leaky_relu},
                                                     {64, 1, Activation::linear}});
}

void bm_forward(benchmark::State& state) {
    const std::size_t batch = static_cast<std::size_t>(state.range(0));
    auto net = bench_discriminator(24);
    auto theta = init_weights(net, 1);
    auto rng = RngStream::child(7, 1);
    auto x = gaussian_matrix(batch, 24, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(net, theta, x));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(batch));
}
BENCHMARK(bm_forward)->Arg(1)->Arg(32)->Arg(256);

void bm_backward(benchmark::State& state) {
    const std::size_t batch = static_cast<std::size_t>(state.range(0));
    auto net = bench_discriminator(24);
    auto theta = init_weights(net, 1);
    auto rng = RngStream::child(7, 1);
    auto x = gaussian_matrix(batch, 24, rng);
    auto trace = forward(net, theta, x);
    Matrix up(batch, 1, 1.0 / static_cast<double>(batch));
    for (auto _ : state) {
        benchmark::DoNotOptimize(backward(net, theta, trace, up));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(batch));
}
BENCHMARK(bm_backward)->Arg(1)->Arg(32)->Arg(256);

void bm_posterior_grad_discriminator(benchmark::State& state) {
    const std::size_t batch = 32;
    auto g_net = bench_generator(16, 24);
    auto d_net = bench_discriminator(24);
    auto theta_d = init_weights(d_net, 2);
    std::vector<ParameterVector> gs = {init_weights(g_net, 3), init_weights(g_net, 4)};
    auto rng = RngStream::child(9, 1);
    auto real = gaussian_matrix(batch, 24, rng);
    auto noise = gaussian_matrix(batch, 16, rng);
    const auto prior = PriorSpec::gaussian(10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            posterior_grad_discriminator(d_net, g_net, theta_d, gs, real, noise, prior, 320));
    }
}
BENCHMARK(bm_posterior_grad_discriminator);

void bm_posterior_grad_generator(benchmark::State& state) {
    const std::size_t batch = 32;
    auto g_net = bench_generator(16, 24);
    auto d_net = bench_discriminator(24);
    auto theta_g = init_weights(g_net, 2);
    std::vector<ParameterVector> ds = {init_weights(d_net, 5)};
    auto rng = RngStream::child(9, 2);
    auto noise = gaussian_matrix(batch, 16, rng);
    const auto prior = PriorSpec::gaussian(10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            posterior_grad_generator(g_net, d_net, theta_g, ds, noise, prior, 320));
    }
}
BENCHMARK(bm_posterior_grad_generator);

void bm_training_round(benchmark::State& state) {
    auto rng = RngStream::child(11, 1);
    auto data = synth_wind(256, 24, WindRegime::gusty, rng);
    TrainingConfig cfg;
    cfg.latent_dim = 16;
    cfg.batch_size = 32;
    cfg.seed = 5;
    auto g_net = bench_generator(cfg.latent_dim, 24);
    auto d_net = bench_discriminator(24);
    BayesTrainer trainer(cfg, data, g_net, d_net);
    for (auto _ : state) {
        trainer.run_round();
    }
}
BENCHMARK(bm_training_round)->Unit(benchmark::kMillisecond);

void bm_synth_wind(benchmark::State& state) {
    auto rng = RngStream::child(13, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(synth_wind(100, 24, WindRegime::gusty, rng));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 100);
}
BENCHMARK(bm_synth_wind);

}  // namespace

BENCHMARK_MAIN();
