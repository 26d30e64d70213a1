// Command-line front end: synthesize datasets, train the posterior sampler,
// decode scenarios from checkpoints, and evaluate scenario files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scengen/checkpoint.hpp"
#include "scengen/data.hpp"
#include "scengen/errors.hpp"
#include "scengen/eval.hpp"
#include "scengen/nn.hpp"
#include "scengen/scenario_io.hpp"
#include "scengen/trainer.hpp"

namespace {

using nlohmann::json;
using namespace scengen;

// Stream tags for CLI-owned randomness, disjoint from the trainer's tags.
constexpr std::uint32_t kTagSynthSolar = 101;
constexpr std::uint32_t kTagSynthWind = 102;
constexpr std::uint32_t kTagSynthOrder = 103;
constexpr std::uint32_t kTagSynthSpatial = 104;
constexpr std::uint32_t kTagGenerate = 110;

constexpr double kSynthCapacityMw = 16.0;

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + path);
    }
    out << text;
}

// Run configuration file: dataset paths plus training and network settings.
// Unknown keys are rejected so typos cannot silently fall back to defaults.
struct RunConfig {
    std::string dataset_csv;
    std::string dataset_manifest;
    std::string out_dir = "run";
    std::size_t eval_interval = 50;
    TrainingConfig training;
    std::vector<std::size_t> generator_hidden{64, 128};
    std::vector<std::size_t> discriminator_hidden{128, 64};
    double leaky_slope = 0.2;
};

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

std::vector<std::size_t> hidden_sizes(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError(name + " must be a non-empty array of layer widths");
    }
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
            throw ValidationError(name + " entries must be positive integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

RunConfig run_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ValidationError("config root must be a JSON object");
    }
    reject_unknown_keys(j, {"dataset", "out_dir", "eval_interval", "training", "networks"},
                        "config");
    RunConfig cfg;
    if (j.contains("dataset")) {
        const json& d = j["dataset"];
        reject_unknown_keys(d, {"csv", "manifest"}, "config.dataset");
        if (!d.contains("csv") || !d.contains("manifest")) {
            throw ValidationError("config.dataset needs both \"csv\" and \"manifest\"");
        }
        cfg.dataset_csv = d["csv"].get<std::string>();
        cfg.dataset_manifest = d["manifest"].get<std::string>();
    }
    if (j.contains("out_dir")) {
        cfg.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("eval_interval")) {
        if (!j["eval_interval"].is_number_unsigned() || j["eval_interval"].get<std::uint64_t>() == 0) {
            throw ValidationError("eval_interval must be a positive integer");
        }
        cfg.eval_interval = j["eval_interval"].get<std::size_t>();
    }
    if (j.contains("training")) {
        cfg.training = training_config_from_json_text(j["training"].dump());
    }
    if (j.contains("networks")) {
        const json& n = j["networks"];
        reject_unknown_keys(n, {"generator_hidden", "discriminator_hidden", "leaky_slope"},
                            "config.networks");
        if (n.contains("generator_hidden")) {
            cfg.generator_hidden = hidden_sizes(n["generator_hidden"], "generator_hidden");
        }
        if (n.contains("discriminator_hidden")) {
            cfg.discriminator_hidden = hidden_sizes(n["discriminator_hidden"], "discriminator_hidden");
        }
        if (n.contains("leaky_slope")) {
            cfg.leaky_slope = n["leaky_slope"].get<double>();
            if (!(cfg.leaky_slope > 0.0 && cfg.leaky_slope < 1.0)) {
                throw ValidationError("leaky_slope must be in (0, 1)");
            }
        }
    }
    cfg.training.validate();
    return cfg;
}

std::string run_config_to_json_text(const RunConfig& cfg) {
    json j;
    j["dataset"]["csv"] = cfg.dataset_csv;
    j["dataset"]["manifest"] = cfg.dataset_manifest;
    j["out_dir"] = cfg.out_dir;
    j["eval_interval"] = cfg.eval_interval;
    j["training"] = json::parse(training_config_to_json_text(cfg.training));
    j["networks"]["generator_hidden"] = cfg.generator_hidden;
    j["networks"]["discriminator_hidden"] = cfg.discriminator_hidden;
    j["networks"]["leaky_slope"] = cfg.leaky_slope;
    return j.dump(1) + "\n";
}

std::pair<MlpNetwork, MlpNetwork> make_networks(std::size_t n_sites, std::size_t timesteps,
                                                const RunConfig& cfg) {
    const std::size_t flat = n_sites * timesteps;
    std::vector<LayerSpec> g_layers;
    std::size_t in = cfg.training.latent_dim;
    for (std::size_t h : cfg.generator_hidden) {
        g_layers.push_back({in, h, Activation::relu});
        in = h;
    }
    g_layers.push_back({in, flat, Activation::sigmoid});
    std::vector<LayerSpec> d_layers;
    in = flat;
    for (std::size_t h : cfg.discriminator_hidden) {
        d_layers.push_back({in, h, Activation::leaky_relu, cfg.leaky_slope});
        in = h;
    }
    d_layers.push_back({in, 1, Activation::linear});
    return {MlpNetwork::make(NetRole::generator, std::move(g_layers)),
            MlpNetwork::make(NetRole::discriminator, std::move(d_layers))};
}

std::vector<std::string> default_site_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t s = 0; s < n; ++s) {
        ids.push_back("site" + std::to_string(s + 1));
    }
    return ids;
}

// Interleaves several labeled batches into one dataset using a seeded
// permutation, so regimes alternate through the series instead of forming
// contiguous blocks.
std::pair<ScenarioBatch, std::vector<std::string>> interleave(
    const std::vector<std::pair<ScenarioBatch, std::string>>& parts, RngStream& rng) {
    std::vector<Matrix> pool;
    std::vector<std::string> pool_labels;
    for (const auto& [batch, label] : parts) {
        for (const auto& sample : batch.samples) {
            pool.push_back(sample);
            pool_labels.push_back(label);
        }
    }
    const auto perm = shuffled_indices(pool.size(), rng);
    std::vector<Matrix> samples;
    std::vector<std::string> labels;
    for (std::size_t idx : perm) {
        samples.push_back(pool[idx]);
        labels.push_back(pool_labels[idx]);
    }
    auto combined = ScenarioBatch::make(parts.front().first.n_sites,
                                        parts.front().first.timesteps, std::move(samples),
                                        Provenance{Provenance::Kind::synthetic, -1});
    return {std::move(combined), std::move(labels)};
}

Matrix uniform_correlation(std::size_t n, double rho) {
    Matrix c(n, n, rho);
    for (std::size_t i = 0; i < n; ++i) {
        c(i, i) = 1.0;
    }
    return c;
}

struct SynthArgs {
    std::string family;
    std::size_t samples = 2000;
    std::size_t timesteps = 24;
    std::size_t sites = 4;
    std::string out_dir;
    std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
    if (a.samples < 4) {
        throw ValidationError("--samples must be at least 4");
    }
    std::pair<ScenarioBatch, std::vector<std::string>> data;
    auto order_rng = RngStream::child(a.seed, kTagSynthOrder);
    const std::size_t half = a.samples / 2;
    if (a.family == "mixed_wind_solar") {
        auto solar_rng = RngStream::child(a.seed, kTagSynthSolar);
        auto wind_rng = RngStream::child(a.seed, kTagSynthWind);
        auto solar = synth_solar(a.samples - half, a.timesteps, solar_rng);
        auto wind = synth_wind(half, a.timesteps, WindRegime::gusty, wind_rng);
        data = interleave({{solar, "solar"}, {wind, "wind"}}, order_rng);
    } else if (a.family == "two_regime_wind") {
        auto calm_rng = RngStream::child(a.seed, kTagSynthWind, 0);
        auto gusty_rng = RngStream::child(a.seed, kTagSynthWind, 1);
        auto calm = synth_wind(a.samples - half, a.timesteps, WindRegime::calm, calm_rng);
        auto gusty = synth_wind(half, a.timesteps, WindRegime::gusty, gusty_rng);
        data = interleave({{calm, "calm"}, {gusty, "gusty"}}, order_rng);
    } else if (a.family == "spatiotemporal") {
        if (a.sites < 2) {
            throw ValidationError("--sites must be at least 2 for spatiotemporal synthesis");
        }
        auto a_rng = RngStream::child(a.seed, kTagSynthSpatial, 0);
        auto b_rng = RngStream::child(a.seed, kTagSynthSpatial, 1);
        auto group_a =
            synth_spatiotemporal(a.samples - half, a.timesteps, uniform_correlation(a.sites, 0.8), a_rng);
        auto group_b =
            synth_spatiotemporal(half, a.timesteps, uniform_correlation(a.sites, 0.1), b_rng);
        data = interleave({{group_a, "group_a"}, {group_b, "group_b"}}, order_rng);
    } else {
        throw ValidationError("unknown --family \"" + a.family +
                              "\" (expected mixed_wind_solar, two_regime_wind, or spatiotemporal)");
    }

    const auto& batch = data.first;
    std::filesystem::create_directories(a.out_dir);
    const auto site_ids = default_site_ids(batch.n_sites);
    write_timeseries_csv(a.out_dir + "/dataset.csv", batch, site_ids, kSynthCapacityMw);
    DatasetManifest manifest;
    for (const auto& id : site_ids) {
        manifest.sites[id] =
            SiteMeta{kSynthCapacityMw, static_cast<int>(1440 / batch.timesteps)};
    }
    manifest.save(a.out_dir + "/manifest.json");
    write_labels_csv(a.out_dir + "/labels.csv", data.second);
    std::cout << "synth: wrote " << batch.count() << " " << a.family << " days ("
              << batch.n_sites << " site" << (batch.n_sites == 1 ? "" : "s") << ", "
              << batch.timesteps << " steps) to " << a.out_dir << "\n";
    return 0;
}

struct TrainArgs {
    std::string config_path;
    std::string resume_path;
    std::string out_dir;  // overrides config when set
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t max_epochs = 0;  // overrides config when nonzero
};

void write_log_row(std::ofstream& log, const BayesTrainer& t) {
    const auto& report = t.state().loss_history.back();
    log << t.state().epoch;
    for (double lg : t.per_particle_generator_loss()) {
        log << "," << format_g9(lg);
    }
    log << "," << format_g9(report.l_d) << "," << format_g9(report.value_v) << "\n";
    log.flush();
}

int cmd_train(const TrainArgs& a) {
    if (a.config_path.empty()) {
        throw ValidationError("train needs --config <file>");
    }
    RunConfig cfg = run_config_from_json_text(read_text_file(a.config_path));
    if (!a.out_dir.empty()) {
        cfg.out_dir = a.out_dir;
    }
    if (a.seed_given) {
        if (!a.resume_path.empty()) {
            throw ValidationError("--seed cannot be combined with --resume; the resumed "
                                  "run keeps its original streams");
        }
        cfg.training.seed = a.seed;
    }
    if (a.max_epochs != 0) {
        cfg.training.max_epochs = a.max_epochs;
    }
    if (cfg.dataset_csv.empty()) {
        throw ValidationError("config has no dataset section; train needs dataset.csv and "
                              "dataset.manifest");
    }

    const auto manifest = DatasetManifest::load(cfg.dataset_manifest);
    const auto series = load_csv(cfg.dataset_csv, manifest);
    auto windowed = window_into_days(series);
    if (windowed.overage_count > 0) {
        std::cout << "train: clamped " << windowed.overage_count
                  << " above-capacity values while normalizing\n";
    }
    if (windowed.dropped_tail_points > 0) {
        std::cout << "train: dropped " << windowed.dropped_tail_points
                  << " trailing points short of a full day\n";
    }

    std::optional<BayesTrainer> trainer;
    if (!a.resume_path.empty()) {
        CheckpointData ck = load_checkpoint(a.resume_path);
        if (a.max_epochs != 0) {
            ck.config.max_epochs = a.max_epochs;
        }
        cfg.training = ck.config;
        trainer.emplace(std::move(ck), std::move(windowed.batch));
    } else {
        auto [g_net, d_net] = make_networks(windowed.batch.n_sites, windowed.batch.timesteps, cfg);
        trainer.emplace(cfg.training, std::move(windowed.batch), std::move(g_net),
                        std::move(d_net));
    }

    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/effective_config.json", run_config_to_json_text(cfg));

    std::ofstream log(cfg.out_dir + "/training_log.csv", std::ios::binary);
    if (!log) {
        throw ValidationError("cannot write " + cfg.out_dir + "/training_log.csv");
    }
    log << "epoch";
    for (std::size_t j = 0; j < cfg.training.j_particles; ++j) {
        log << ",l_g_" << j;
    }
    log << ",l_d,value_v\n";

    const std::string ck_path = cfg.out_dir + "/checkpoint.json";
    std::uint64_t last_logged = 0;
    trainer->run([&](const BayesTrainer& t) {
        const auto epoch = t.state().epoch;
        if (epoch % cfg.eval_interval == 0 || t.converged()) {
            write_log_row(log, t);
            save_checkpoint(ck_path, t.checkpoint());
            last_logged = epoch;
            std::cout << "epoch " << epoch << ": l_d " << format_g9(t.state().loss_history.back().l_d)
                      << ", value " << format_g9(t.state().loss_history.back().value_v) << "\n";
        }
    });
    if (trainer->state().epoch != last_logged && !trainer->per_particle_generator_loss().empty()) {
        write_log_row(log, *trainer);
    }
    save_checkpoint(ck_path, trainer->checkpoint());
    std::cout << "train: stopped after " << trainer->state().epoch << " rounds, checkpoint at "
              << ck_path << "\n";
    return 0;
}

struct GenerateArgs {
    std::string checkpoint_path;
    std::string generator = "all";
    std::size_t count = 100;
    std::string out_dir;
    std::string manifest_path;
    bool mw = false;
    std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a) {
    if (a.checkpoint_path.empty()) {
        throw ValidationError("generate needs --checkpoint <file>");
    }
    if (a.count == 0) {
        throw ValidationError("--count must be positive");
    }
    const CheckpointData ck = load_checkpoint(a.checkpoint_path);
    const std::size_t n_gen = ck.ensemble.generators.size();
    std::vector<std::size_t> selected;
    if (a.generator == "all") {
        for (std::size_t j = 0; j < n_gen; ++j) {
            selected.push_back(j);
        }
    } else {
        std::size_t j = 0;
        try {
            j = std::stoul(a.generator);
        } catch (const std::exception&) {
            throw ValidationError("--generator must be \"all\" or a particle index");
        }
        if (j >= n_gen) {
            throw ValidationError("--generator " + std::to_string(j) + " out of range; checkpoint has " +
                                  std::to_string(n_gen) + " generator particles");
        }
        selected.push_back(j);
    }

    std::vector<double> capacities;
    const std::vector<double>* capacities_ptr = nullptr;
    if (a.mw) {
        if (a.manifest_path.empty()) {
            throw ValidationError("--mw needs --manifest to supply per-site capacities");
        }
        const auto manifest = DatasetManifest::load(a.manifest_path);
        for (const auto& [id, meta] : manifest.sites) {
            capacities.push_back(meta.capacity_mw);
        }
        if (capacities.size() != ck.ensemble.n_sites) {
            throw ValidationError("manifest has " + std::to_string(capacities.size()) +
                                  " sites but the checkpoint was trained on " +
                                  std::to_string(ck.ensemble.n_sites));
        }
        capacities_ptr = &capacities;
    }

    std::vector<std::pair<int, ScenarioBatch>> batches;
    for (std::size_t j : selected) {
        auto rng = RngStream::child(a.seed, kTagGenerate, static_cast<std::uint32_t>(j));
        batches.emplace_back(static_cast<int>(j), generate(ck.ensemble, j, a.count, rng));
    }
    std::filesystem::create_directories(a.out_dir);
    const std::string path = a.out_dir + "/scenarios.csv";
    write_scenario_csv(path, batches, capacities_ptr);
    std::cout << "generate: wrote " << selected.size() << " x " << a.count << " scenarios to "
              << path << (a.mw ? " (MW units)" : "") << "\n";
    return 0;
}

struct EvalArgs {
    std::string mode;
    std::string scenarios_path;
    std::string reference_csv;
    std::string manifest_path;
    std::string labels_path;
    std::string family;
    std::string out_dir;
};

json correlation_to_json(const CorrelationMatrix& c) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < c.n; ++j) {
            row.push_back(c.at(i, j));  // NaN serializes as null
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json box_to_json(const BoxStats& b) {
    return json{{"q1", b.q1},
                {"median", b.median},
                {"q3", b.q3},
                {"whisker_lo", b.whisker_lo},
                {"whisker_hi", b.whisker_hi}};
}

json purity_to_json(const ModePurityReport& rep) {
    json counts;
    json fractions;
    for (std::size_t m = 0; m < rep.modes.size(); ++m) {
        counts[rep.modes[m]] = rep.counts[m];
        fractions[rep.modes[m]] = rep.fraction(m);
    }
    return json{{"counts", counts},
                {"fractions", fractions},
                {"total", rep.total},
                {"dominant_mode", rep.dominant_mode},
                {"purity", rep.purity()}};
}

void append_corr_rows(std::ofstream& out, const std::string& name, const CorrelationMatrix& c) {
    for (std::size_t i = 0; i < c.n; ++i) {
        for (std::size_t j = 0; j < c.n; ++j) {
            out << name << "," << i << "," << j << "," << format_g9(c.at(i, j)) << "\n";
        }
    }
}

int cmd_eval(const EvalArgs& a) {
    if (a.scenarios_path.empty()) {
        throw ValidationError("eval needs --scenarios <file>");
    }
    const auto generated = read_scenario_csv(a.scenarios_path);
    if (generated.empty()) {
        throw ValidationError("scenario file " + a.scenarios_path + " holds no scenarios");
    }
    std::optional<ScenarioBatch> reference;
    if (!a.reference_csv.empty()) {
        if (a.manifest_path.empty()) {
            throw ValidationError("--reference needs --manifest to interpret the series");
        }
        const auto manifest = DatasetManifest::load(a.manifest_path);
        reference = window_into_days(load_csv(a.reference_csv, manifest)).batch;
    }
    std::vector<std::string> labels;
    if (!a.labels_path.empty()) {
        if (!reference) {
            throw ValidationError("--labels describes the reference series; pass --reference too");
        }
        labels = read_labels_csv(a.labels_path);
        if (labels.size() != reference->count()) {
            throw ValidationError("label count " + std::to_string(labels.size()) +
                                  " does not match " + std::to_string(reference->count()) +
                                  " reference days");
        }
    }

    std::filesystem::create_directories(a.out_dir);
    json report;
    report["mode"] = a.mode;
    std::string summary;

    if (a.mode == "purity") {
        if (a.family.empty()) {
            throw ValidationError("eval --mode purity needs --family wind_solar or calm_gusty");
        }
        const std::size_t T = generated.front().second.timesteps;
        ModeClassifier classifier;
        if (a.family == "wind_solar") {
            classifier = ModeClassifier::wind_solar(T);
        } else if (a.family == "calm_gusty") {
            classifier = ModeClassifier::calm_gusty(T);
        } else {
            throw ValidationError("unknown --family \"" + a.family + "\"");
        }
        json gens = json::array();
        for (const auto& [gidx, batch] : generated) {
            auto rep = mode_purity(batch, classifier);
            json entry = purity_to_json(rep);
            entry["generator"] = gidx;
            gens.push_back(std::move(entry));
            summary += "generator " + std::to_string(gidx) + ": " + rep.dominant_mode + " " +
                       format_g9(rep.purity()) + "\n";
        }
        report["generators"] = std::move(gens);
        if (reference) {
            auto rep = mode_purity(*reference, classifier);
            report["reference"] = purity_to_json(rep);
            if (!labels.empty()) {
                std::size_t agree = 0;
                for (std::size_t i = 0; i < reference->count(); ++i) {
                    if (classifier.classify(reference->samples[i]) == labels[i]) {
                        ++agree;
                    }
                }
                report["reference"]["label_agreement"] =
                    static_cast<double>(agree) / static_cast<double>(reference->count());
            }
        }
        // Profile sheet: a handful of example days per source for plotting.
        std::vector<std::pair<int, ScenarioBatch>> profiles;
        auto take_head = [](const ScenarioBatch& b, std::size_t k) {
            std::vector<Matrix> head(b.samples.begin(),
                                     b.samples.begin() + std::min(k, b.count()));
            return ScenarioBatch::make(b.n_sites, b.timesteps, std::move(head), b.provenance);
        };
        if (reference) {
            profiles.emplace_back(-1, take_head(*reference, 8));
        }
        for (const auto& [gidx, batch] : generated) {
            profiles.emplace_back(gidx, take_head(batch, 8));
        }
        write_scenario_csv(a.out_dir + "/Fig3_profiles.csv", profiles);
    } else if (a.mode == "corr") {
        if (!reference) {
            throw ValidationError("eval --mode corr needs --reference and --manifest");
        }
        std::ofstream fig(a.out_dir + "/Fig4_corr.csv", std::ios::binary);
        fig << "matrix,site_i,site_j,rho\n";
        const auto ref_corr = pearson_matrix(*reference);
        report["reference"]["correlation"] = correlation_to_json(ref_corr);
        append_corr_rows(fig, "reference", ref_corr);

        // Group the reference days by label to expose per-regime structure.
        std::map<std::string, std::vector<Matrix>> groups;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            groups[labels[i]].push_back(reference->samples[i]);
        }
        std::map<std::string, CorrelationMatrix> group_corr;
        for (const auto& [label, samples] : groups) {
            auto batch = ScenarioBatch::make(reference->n_sites, reference->timesteps,
                                             samples, reference->provenance);
            group_corr[label] = pearson_matrix(batch);
            report["reference_groups"][label]["correlation"] =
                correlation_to_json(group_corr[label]);
            append_corr_rows(fig, "reference_" + label, group_corr[label]);
        }

        json gens = json::array();
        for (const auto& [gidx, batch] : generated) {
            const auto c = pearson_matrix(batch);
            json entry;
            entry["generator"] = gidx;
            entry["correlation"] = correlation_to_json(c);
            entry["distance_to_reference"] = correlation_distance(c, ref_corr);
            std::string nearest;
            double best = 0.0;
            for (const auto& [label, gc] : group_corr) {
                const double d = correlation_distance(c, gc);
                entry["distance_to_group"][label] = d;
                if (nearest.empty() || d < best) {
                    nearest = label;
                    best = d;
                }
            }
            if (!nearest.empty()) {
                entry["nearest_group"] = nearest;
                summary += "generator " + std::to_string(gidx) + ": nearest group " + nearest +
                           " (distance " + format_g9(best) + ")\n";
            } else {
                summary += "generator " + std::to_string(gidx) + ": distance to reference " +
                           format_g9(entry["distance_to_reference"].get<double>()) + "\n";
            }
            append_corr_rows(fig, "generator_" + std::to_string(gidx), c);
            gens.push_back(std::move(entry));
        }
        report["generators"] = std::move(gens);
    } else if (a.mode == "stats") {
        std::ofstream fig(a.out_dir + "/Fig5_stats.csv", std::ios::binary);
        fig << "source,metric,q1,median,q3,whisker_lo,whisker_hi\n";
        auto box_row = [&fig](const std::string& source, const std::string& metric,
                              const BoxStats& b) {
            fig << source << "," << metric << "," << format_g9(b.q1) << "," << format_g9(b.median)
                << "," << format_g9(b.q3) << "," << format_g9(b.whisker_lo) << ","
                << format_g9(b.whisker_hi) << "\n";
        };
        if (reference) {
            const auto st = generator_stats(*reference);
            report["reference"]["mean_box"] = box_to_json(st.mean_box);
            report["reference"]["variance_box"] = box_to_json(st.variance_box);
            box_row("reference", "mean", st.mean_box);
            box_row("reference", "variance", st.variance_box);
        }
        json gens = json::array();
        for (const auto& [gidx, batch] : generated) {
            const auto st = generator_stats(batch);
            json entry;
            entry["generator"] = gidx;
            entry["count"] = batch.count();
            entry["mean_box"] = box_to_json(st.mean_box);
            entry["variance_box"] = box_to_json(st.variance_box);
            gens.push_back(std::move(entry));
            const std::string name = "generator_" + std::to_string(gidx);
            box_row(name, "mean", st.mean_box);
            box_row(name, "variance", st.variance_box);
            summary += name + ": median mean " + format_g9(st.mean_box.median) +
                       ", median variance " + format_g9(st.variance_box.median) + "\n";
        }
        report["generators"] = std::move(gens);
    } else {
        throw ValidationError("unknown --mode \"" + a.mode +
                              "\" (expected purity, corr, or stats)");
    }

    write_text_file(a.out_dir + "/eval_report.json", report.dump(1) + "\n");
    std::cout << summary;
    std::cout << "eval: report at " << a.out_dir << "/eval_report.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian scenario generation for renewable power"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string config_path;
    std::string out_dir = "run";
    bool mw = false;
    auto* seed_opt = app.add_option("--seed", seed, "Run seed (default 0)");
    app.add_option("--config", config_path, "Run configuration JSON file");
    app.add_option("--out", out_dir, "Output directory (default \"run\")");
    app.add_flag("--mw", mw, "Write generated scenarios in MW instead of normalized units");

    auto* synth = app.add_subcommand("synth", "Synthesize a labeled benchmark dataset");
    synth->fallthrough();
    SynthArgs sa;
    synth->add_option("--family", sa.family,
                      "mixed_wind_solar, two_regime_wind, or spatiotemporal")
        ->required();
    synth->add_option("--samples", sa.samples, "Number of day samples (default 2000)");
    synth->add_option("--timesteps", sa.timesteps, "Steps per day (default 24)");
    synth->add_option("--sites", sa.sites, "Sites for spatiotemporal synthesis (default 4)");

    auto* train = app.add_subcommand("train", "Train the posterior sampler on a dataset");
    train->fallthrough();
    TrainArgs ta;
    train->add_option("--resume", ta.resume_path, "Checkpoint to resume from");
    train->add_option("--max-epochs", ta.max_epochs, "Override the round budget");

    auto* gen = app.add_subcommand("generate", "Decode scenarios from a checkpoint");
    gen->fallthrough();
    GenerateArgs ga;
    gen->add_option("--checkpoint", ga.checkpoint_path, "Trained checkpoint JSON")->required();
    gen->add_option("--count", ga.count, "Scenarios per generator (default 100)");
    gen->add_option("--generator", ga.generator, "\"all\" or one particle index (default all)");
    gen->add_option("--manifest", ga.manifest_path, "Dataset manifest (needed with --mw)");

    auto* ev = app.add_subcommand("eval", "Evaluate a scenario file");
    ev->fallthrough();
    EvalArgs ea;
    ev->add_option("--mode", ea.mode, "purity, corr, or stats")->required();
    ev->add_option("--scenarios", ea.scenarios_path, "Scenario CSV to evaluate")->required();
    ev->add_option("--reference", ea.reference_csv, "Reference dataset CSV");
    ev->add_option("--manifest", ea.manifest_path, "Manifest for the reference CSV");
    ev->add_option("--labels", ea.labels_path, "Labels CSV for the reference days");
    ev->add_option("--family", ea.family, "Classifier family for purity mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            sa.out_dir = out_dir;
            sa.seed = seed;
            return cmd_synth(sa);
        }
        if (train->parsed()) {
            ta.config_path = config_path;
            ta.out_dir = app.count("--out") > 0 ? out_dir : "";
            ta.seed = seed;
            ta.seed_given = seed_opt->count() > 0;
            return cmd_train(ta);
        }
        if (gen->parsed()) {
            ga.out_dir = out_dir;
            ga.seed = seed;
            ga.mw = mw;
            return cmd_generate(ga);
        }
        if (ev->parsed()) {
            ea.out_dir = out_dir;
            return cmd_eval(ea);
        }
    } catch (const scengen::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
