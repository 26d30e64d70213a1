#include "scengen/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "scengen/errors.hpp"

namespace scengen {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::leaky_relu: return "leaky_relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::linear;
    if (name == "relu") return Activation::relu;
    if (name == "leaky_relu") return Activation::leaky_relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ValidationError("unknown activation name: " + name);
}

MlpNetwork MlpNetwork::make(NetRole role, std::vector<LayerSpec> layers) {
    if (layers.empty()) throw ValidationError("MlpNetwork: needs at least one layer");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const LayerSpec& l = layers[k];
        if (l.in == 0 || l.out == 0) {
            throw ValidationError("MlpNetwork: layer " + std::to_string(k) + " has zero width");
        }
        if (l.activation == Activation::leaky_relu &&
            !(l.leaky_slope > 0.0 && l.leaky_slope < 1.0)) {
            throw ValidationError("MlpNetwork: layer " + std::to_string(k) +
                                  " leaky slope must be in (0, 1)");
        }
        if (k > 0 && layers[k - 1].out != l.in) {
            throw ValidationError("MlpNetwork: layer " + std::to_string(k) + " input width " +
                                  std::to_string(l.in) + " does not chain from previous output " +
                                  std::to_string(layers[k - 1].out));
        }
    }
    const LayerSpec& last = layers.back();
    if (role == NetRole::generator && last.activation != Activation::sigmoid) {
        throw ValidationError("MlpNetwork: generator output layer must be sigmoid");
    }
    if (role == NetRole::discriminator) {
        if (last.activation != Activation::linear) {
            throw ValidationError("MlpNetwork: discriminator output layer must be linear");
        }
        if (last.out != 1) {
            throw ValidationError("MlpNetwork: discriminator must emit a single score");
        }
    }
    MlpNetwork net;
    net.role = role;
    net.layers = std::move(layers);
    return net;
}

std::size_t param_count(const MlpNetwork& net) {
    std::size_t n = 0;
    for (const LayerSpec& l : net.layers) n += l.in * l.out + l.out;
    return n;
}

ParameterVector init_weights(const MlpNetwork& net, std::uint64_t seed) {
    RngStream rng(seed);
    return init_weights(net, rng);
}

ParameterVector init_weights(const MlpNetwork& net, RngStream& rng) {
    ParameterVector theta(param_count(net), 0.0);
    std::size_t offset = 0;
    for (const LayerSpec& l : net.layers) {
        const double bound = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
        for (std::size_t i = 0; i < l.in * l.out; ++i) {
            theta[offset + i] = rng.uniform(-bound, bound);
        }
        offset += l.in * l.out + l.out;  // biases stay zero
    }
    return theta;
}

namespace {

double activate(Activation a, double z, double slope) {
    switch (a) {
        case Activation::linear: return z;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::leaky_relu: return z > 0.0 ? z : slope * z;
        case Activation::tanh: return std::tanh(z);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    throw std::logic_error("unknown activation");
}

// Derivative at z, reusing the already-computed activation a where cheaper.
double activate_grad(Activation act, double z, double a, double slope) {
    switch (act) {
        case Activation::linear: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::leaky_relu: return z > 0.0 ? 1.0 : slope;
        case Activation::tanh: return 1.0 - a * a;
        case Activation::sigmoid: return a * (1.0 - a);
    }
    throw std::logic_error("unknown activation");
}

void check_theta(const MlpNetwork& net, const ParameterVector& theta) {
    const std::size_t want = param_count(net);
    if (theta.size() != want) {
        throw ValidationError("parameter vector has " + std::to_string(theta.size()) +
                              " entries, net needs " + std::to_string(want));
    }
}

}  // namespace

ForwardTrace forward(const MlpNetwork& net, const ParameterVector& theta, const Matrix& batch) {
    check_theta(net, theta);
    if (batch.rows == 0) throw ValidationError("forward: empty batch");
    if (batch.cols != net.input_width()) {
        throw ValidationError("forward: layer 0 expects input width " +
                              std::to_string(net.input_width()) + ", batch has " +
                              std::to_string(batch.cols));
    }

    ForwardTrace trace;
    trace.input = batch;
    trace.pre.reserve(net.layers.size());
    trace.activations.reserve(net.layers.size());

    const Matrix* in = &trace.input;
    std::size_t offset = 0;
    const std::size_t m = batch.rows;
    for (const LayerSpec& l : net.layers) {
        const double* w = theta.data() + offset;           // out x in, row-major
        const double* b = theta.data() + offset + l.in * l.out;
        Matrix z(m, l.out);
        for (std::size_t i = 0; i < m; ++i) {
            const double* x = in->data.data() + i * l.in;
            double* zi = z.data.data() + i * l.out;
            for (std::size_t o = 0; o < l.out; ++o) {
                const double* wo = w + o * l.in;
                double acc = b[o];
                for (std::size_t j = 0; j < l.in; ++j) acc += wo[j] * x[j];
                zi[o] = acc;
            }
        }
        Matrix a(m, l.out);
        for (std::size_t i = 0; i < z.size(); ++i) {
            a.data[i] = activate(l.activation, z.data[i], l.leaky_slope);
        }
        trace.pre.push_back(std::move(z));
        trace.activations.push_back(std::move(a));
        in = &trace.activations.back();
        offset += l.in * l.out + l.out;
    }
    return trace;
}

BackwardResult backward(const MlpNetwork& net, const ParameterVector& theta,
                        const ForwardTrace& trace, const Matrix& output_grad) {
    check_theta(net, theta);
    if (trace.activations.size() != net.layers.size()) {
        throw ValidationError("backward: trace does not match net depth");
    }
    const std::size_t m = trace.input.rows;
    if (output_grad.rows != m || output_grad.cols != net.output_width()) {
        throw ValidationError("backward: output_grad must be " + std::to_string(m) + "x" +
                              std::to_string(net.output_width()));
    }

    BackwardResult result;
    result.param_grad.assign(theta.size(), 0.0);

    // Flat offsets of each layer's weight block.
    std::vector<std::size_t> offsets(net.layers.size());
    std::size_t offset = 0;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        offsets[k] = offset;
        offset += net.layers[k].in * net.layers[k].out + net.layers[k].out;
    }

    Matrix grad = output_grad;
    for (std::size_t kk = net.layers.size(); kk-- > 0;) {
        const LayerSpec& l = net.layers[kk];
        const Matrix& z = trace.pre[kk];
        const Matrix& a = trace.activations[kk];
        const Matrix& in = kk == 0 ? trace.input : trace.activations[kk - 1];

        Matrix dz(m, l.out);
        for (std::size_t i = 0; i < dz.size(); ++i) {
            dz.data[i] =
                grad.data[i] * activate_grad(l.activation, z.data[i], a.data[i], l.leaky_slope);
        }

        double* dw = result.param_grad.data() + offsets[kk];
        double* db = dw + l.in * l.out;
        for (std::size_t i = 0; i < m; ++i) {
            const double* dzi = dz.data.data() + i * l.out;
            const double* xi = in.data.data() + i * l.in;
            for (std::size_t o = 0; o < l.out; ++o) {
                const double g = dzi[o];
                double* dwo = dw + o * l.in;
                for (std::size_t j = 0; j < l.in; ++j) dwo[j] += g * xi[j];
                db[o] += g;
            }
        }

        const double* w = theta.data() + offsets[kk];
        Matrix prev(m, l.in);
        for (std::size_t i = 0; i < m; ++i) {
            const double* dzi = dz.data.data() + i * l.out;
            double* pi = prev.data.data() + i * l.in;
            for (std::size_t o = 0; o < l.out; ++o) {
                const double g = dzi[o];
                const double* wo = w + o * l.in;
                for (std::size_t j = 0; j < l.in; ++j) pi[j] += g * wo[j];
            }
        }
        grad = std::move(prev);
    }
    result.input_grad = std::move(grad);
    return result;
}

namespace {

void check_same_size(const ParameterVector& a, const ParameterVector& b, const char* op) {
    if (a.size() != b.size()) {
        throw ValidationError(std::string(op) + ": length mismatch " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
    }
}

}  // namespace

ParameterVector param_add(const ParameterVector& a, const ParameterVector& b) {
    check_same_size(a, b, "param_add");
    ParameterVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

ParameterVector param_sub(const ParameterVector& a, const ParameterVector& b) {
    check_same_size(a, b, "param_sub");
    ParameterVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

ParameterVector param_scale(const ParameterVector& a, double s) {
    ParameterVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
    return out;
}

ParameterVector param_mul(const ParameterVector& a, const ParameterVector& b) {
    check_same_size(a, b, "param_mul");
    ParameterVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

bool all_finite(const ParameterVector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace scengen
