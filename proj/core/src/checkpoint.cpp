#include "scengen/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "scengen/errors.hpp"

namespace scengen {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

json prior_to_json(const PriorSpec& prior) {
    if (prior.is_flat()) return "flat";
    return prior.gamma;
}

PriorSpec prior_from_json(const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() != "flat") {
            throw ValidationError(where + ": prior must be a positive number or \"flat\"");
        }
        return PriorSpec::flat();
    }
    if (!j.is_number()) {
        throw ValidationError(where + ": prior must be a positive number or \"flat\"");
    }
    return PriorSpec::gaussian(j.get<double>());
}

json config_to_json(const TrainingConfig& c) {
    json j;
    j["alpha"] = c.alpha;
    j["eta"] = c.eta;
    j["clip_c"] = c.clip_c;
    j["batch_size"] = c.batch_size;
    j["n_discri"] = c.n_discri;
    j["n_d_mc"] = c.n_d_mc;
    j["n_g_mc"] = c.n_g_mc;
    j["m_inner"] = c.m_inner;
    j["j_particles"] = c.j_particles;
    j["d_particles"] = c.d_particles;
    j["prior_gamma_g"] = prior_to_json(c.prior_g);
    j["prior_gamma_d"] = prior_to_json(c.prior_d);
    j["latent_dim"] = c.latent_dim;
    j["max_epochs"] = c.max_epochs;
    j["seed"] = c.seed;
    j["convergence"] = {{"window", c.convergence.window}, {"tol", c.convergence.tol}};
    return j;
}

TrainingConfig config_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": must be an object");
    reject_unknown(j,
                   {"alpha", "eta", "clip_c", "batch_size", "n_discri", "n_d_mc", "n_g_mc",
                    "m_inner", "j_particles", "d_particles", "prior_gamma_g", "prior_gamma_d",
                    "latent_dim", "max_epochs", "seed", "convergence"},
                   where);
    TrainingConfig c;
    try {
        if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
        if (j.contains("eta")) c.eta = j["eta"].get<double>();
        if (j.contains("clip_c")) c.clip_c = j["clip_c"].get<double>();
        if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
        if (j.contains("n_discri")) c.n_discri = j["n_discri"].get<std::size_t>();
        if (j.contains("n_d_mc")) c.n_d_mc = j["n_d_mc"].get<std::size_t>();
        if (j.contains("n_g_mc")) c.n_g_mc = j["n_g_mc"].get<std::size_t>();
        if (j.contains("m_inner")) c.m_inner = j["m_inner"].get<std::size_t>();
        if (j.contains("j_particles")) c.j_particles = j["j_particles"].get<std::size_t>();
        if (j.contains("d_particles")) c.d_particles = j["d_particles"].get<std::size_t>();
        if (j.contains("prior_gamma_g")) {
            c.prior_g = prior_from_json(j["prior_gamma_g"], where + ".prior_gamma_g");
        }
        if (j.contains("prior_gamma_d")) {
            c.prior_d = prior_from_json(j["prior_gamma_d"], where + ".prior_gamma_d");
        }
        if (j.contains("latent_dim")) c.latent_dim = j["latent_dim"].get<std::size_t>();
        if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<std::size_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("convergence")) {
            const json& conv = j["convergence"];
            reject_unknown(conv, {"window", "tol"}, where + ".convergence");
            if (conv.contains("window")) {
                c.convergence.window = conv["window"].get<std::size_t>();
            }
            if (conv.contains("tol")) c.convergence.tol = conv["tol"].get<double>();
        }
    } catch (const json::exception& e) {
        throw ValidationError(where + ": " + e.what());
    }
    c.validate();
    return c;
}

json network_to_json(const MlpNetwork& net) {
    json j;
    j["role"] = net.role == NetRole::generator ? "generator" : "discriminator";
    j["layers"] = json::array();
    for (const LayerSpec& l : net.layers) {
        j["layers"].push_back({{"in", l.in},
                               {"out", l.out},
                               {"activation", activation_name(l.activation)},
                               {"leaky_slope", l.leaky_slope}});
    }
    return j;
}

MlpNetwork network_from_json(const json& j, const std::string& where) {
    reject_unknown(j, {"role", "layers"}, where);
    const std::string role_name = j.at("role").get<std::string>();
    NetRole role;
    if (role_name == "generator") role = NetRole::generator;
    else if (role_name == "discriminator") role = NetRole::discriminator;
    else throw ValidationError(where + ": unknown role '" + role_name + "'");
    std::vector<LayerSpec> layers;
    for (const json& lj : j.at("layers")) {
        reject_unknown(lj, {"in", "out", "activation", "leaky_slope"}, where + ".layers");
        LayerSpec l;
        l.in = lj.at("in").get<std::size_t>();
        l.out = lj.at("out").get<std::size_t>();
        l.activation = activation_from_name(lj.at("activation").get<std::string>());
        if (lj.contains("leaky_slope")) l.leaky_slope = lj.at("leaky_slope").get<double>();
        layers.push_back(l);
    }
    return MlpNetwork::make(role, std::move(layers));
}

json particle_to_json(const Particle& p) {
    json j;
    j["theta"] = p.theta;
    j["rms"] = {{"accumulator", p.rms.accumulator},
                {"decay", p.rms.decay},
                {"epsilon", p.rms.epsilon}};
    j["rng"] = p.noise_rng.serialize();
    return j;
}

Particle particle_from_json(const json& j, std::size_t want, const std::string& where) {
    reject_unknown(j, {"theta", "rms", "rng"}, where);
    Particle p;
    p.theta = j.at("theta").get<ParameterVector>();
    if (p.theta.size() != want) {
        throw ValidationError(where + ": theta length " + std::to_string(p.theta.size()) +
                              " does not match net (" + std::to_string(want) + ")");
    }
    if (!all_finite(p.theta)) throw ValidationError(where + ": non-finite theta entry");
    const json& rj = j.at("rms");
    reject_unknown(rj, {"accumulator", "decay", "epsilon"}, where + ".rms");
    p.rms.accumulator = rj.at("accumulator").get<ParameterVector>();
    p.rms.decay = rj.at("decay").get<double>();
    p.rms.epsilon = rj.at("epsilon").get<double>();
    p.rms.validate(want);
    p.noise_rng = RngStream::deserialize(j.at("rng").get<std::string>());
    return p;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
    json j;
    j["format_version"] = 1;
    j["config"] = config_to_json(data.config);
    j["data_shape"] = {{"n_sites", data.ensemble.n_sites},
                       {"timesteps", data.ensemble.timesteps}};
    j["networks"] = {{"generator", network_to_json(data.ensemble.g_net)},
                     {"discriminator", network_to_json(data.ensemble.d_net)}};
    json gens = json::array(), discs = json::array();
    for (const Particle& p : data.ensemble.generators) gens.push_back(particle_to_json(p));
    for (const Particle& p : data.ensemble.discriminators) discs.push_back(particle_to_json(p));
    j["ensemble"] = {{"generators", std::move(gens)}, {"discriminators", std::move(discs)}};
    json history = json::array();
    for (const LossReport& r : data.state.loss_history) {
        history.push_back({r.l_g, r.l_d, r.value_v, r.wasserstein_estimate});
    }
    j["state"] = {{"running_n", data.state.running_n},
                  {"epoch", data.state.epoch},
                  {"loss_history", std::move(history)}};
    j["streams"] = {{"shuffle", data.shuffle_rng},
                    {"noise", data.noise_rng},
                    {"eval", data.eval_rng},
                    {"permutation", data.permutation},
                    {"cursor", data.cursor}};

    std::ofstream out(path);
    if (!out) throw ValidationError("save_checkpoint: cannot write " + path);
    out << j.dump(1) << "\n";
    if (!out) throw ValidationError("save_checkpoint: write failed for " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("load_checkpoint: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("load_checkpoint: " + path + ": " + e.what());
    }
    try {
        reject_unknown(
            j, {"format_version", "config", "data_shape", "networks", "ensemble", "state",
                "streams"},
            "checkpoint");
        if (j.at("format_version").get<int>() != 1) {
            throw ValidationError("load_checkpoint: unsupported format version");
        }
        CheckpointData c;
        c.config = config_from_json(j.at("config"), "checkpoint.config");
        c.ensemble.g_net = network_from_json(j.at("networks").at("generator"),
                                             "checkpoint.networks.generator");
        c.ensemble.d_net = network_from_json(j.at("networks").at("discriminator"),
                                             "checkpoint.networks.discriminator");
        c.ensemble.n_sites = j.at("data_shape").at("n_sites").get<std::size_t>();
        c.ensemble.timesteps = j.at("data_shape").at("timesteps").get<std::size_t>();
        c.ensemble.latent_dim = c.config.latent_dim;
        const std::size_t g_params = param_count(c.ensemble.g_net);
        const std::size_t d_params = param_count(c.ensemble.d_net);
        std::size_t idx = 0;
        for (const json& pj : j.at("ensemble").at("generators")) {
            c.ensemble.generators.push_back(particle_from_json(
                pj, g_params, "checkpoint generator " + std::to_string(idx++)));
        }
        idx = 0;
        for (const json& pj : j.at("ensemble").at("discriminators")) {
            c.ensemble.discriminators.push_back(particle_from_json(
                pj, d_params, "checkpoint discriminator " + std::to_string(idx++)));
        }
        c.state.running_n = j.at("state").at("running_n").get<std::uint64_t>();
        c.state.epoch = j.at("state").at("epoch").get<std::uint64_t>();
        for (const json& rj : j.at("state").at("loss_history")) {
            if (!rj.is_array() || rj.size() != 4) {
                throw ValidationError("load_checkpoint: malformed loss history entry");
            }
            LossReport r;
            r.l_g = rj[0].get<double>();
            r.l_d = rj[1].get<double>();
            r.value_v = rj[2].get<double>();
            r.wasserstein_estimate = rj[3].get<double>();
            c.state.loss_history.push_back(r);
        }
        const json& streams = j.at("streams");
        c.shuffle_rng = streams.at("shuffle").get<std::string>();
        c.noise_rng = streams.at("noise").get<std::string>();
        c.eval_rng = streams.at("eval").get<std::string>();
        c.permutation = streams.at("permutation").get<std::vector<std::uint64_t>>();
        c.cursor = streams.at("cursor").get<std::uint64_t>();
        return c;
    } catch (const json::exception& e) {
        throw ValidationError("load_checkpoint: " + path + ": " + e.what());
    }
}

std::string training_config_to_json_text(const TrainingConfig& config) {
    return config_to_json(config).dump(2);
}

TrainingConfig training_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("training config: ") + e.what());
    }
    return config_from_json(j, "training config");
}

}  // namespace scengen
