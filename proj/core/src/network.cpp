#include "mirate/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "mirate/errors.hpp"
#include "mirate/rng.hpp"
#include "mirate/serialize.hpp"

namespace mirate {

void NetworkSpec::validate() const {
    if (layer_sizes.size() < 2) {
        throw ContractError("network spec needs an input size and a class count");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ContractError("network spec: layer sizes must be positive");
    }
    if (class_count() < 2) throw ContractError("network spec: need at least two classes");
}

void OptimizerConfig::validate() const {
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ParameterError("momentum must lie in [0, 1)");
    }
    if (batch_size == 0) throw ParameterError("batch size must be positive");
}

Network init_network(const NetworkSpec& spec) {
    spec.validate();
    Network net;
    net.spec = spec;
    CounterRng rng(derive_seed(spec.seed, "init"));
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t fan_in = spec.layer_sizes[l];
        const std::size_t fan_out = spec.layer_sizes[l + 1];
        const double gain = spec.activation == Activation::relu ? 2.0 : 1.0;
        const double scale = std::sqrt(gain / static_cast<double>(fan_in));
        DenseLayer layer;
        layer.weights = SampleMatrix(fan_in, fan_out);
        for (double& w : layer.weights.values()) w = scale * rng.normal();
        layer.bias.assign(fan_out, 0.0);
        layer.weight_velocity = SampleMatrix(fan_in, fan_out);
        layer.bias_velocity.assign(fan_out, 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

// out = in * W + b
SampleMatrix affine(const SampleMatrix& in, const DenseLayer& layer) {
    const std::size_t n = in.rows();
    const std::size_t fan_in = layer.weights.rows();
    const std::size_t fan_out = layer.weights.cols();
    SampleMatrix out(n, fan_out);
    for (std::size_t r = 0; r < n; ++r) {
        auto o = out.row(r);
        std::copy(layer.bias.begin(), layer.bias.end(), o.begin());
        const auto x = in.row(r);
        for (std::size_t p = 0; p < fan_in; ++p) {
            const double a = x[p];
            if (a == 0.0) continue;
            const auto w = layer.weights.row(p);
            for (std::size_t c = 0; c < fan_out; ++c) o[c] += a * w[c];
        }
    }
    return out;
}

void activate(SampleMatrix& m, Activation act) {
    for (double& v : m.values()) {
        v = act == Activation::relu ? std::max(v, 0.0) : std::tanh(v);
    }
}

// Derivative of the activation expressed through its output.
double activation_slope(double out, Activation act) {
    return act == Activation::relu ? (out > 0.0 ? 1.0 : 0.0) : 1.0 - out * out;
}

void check_input(const Network& net, const SampleMatrix& x) {
    if (x.cols() != net.spec.input_dim()) {
        throw ContractError("forward: input width does not match the network");
    }
}

void check_labels(const Network& net, const SampleMatrix& x, std::span<const int> labels) {
    if (labels.size() != x.rows()) {
        throw ContractError("labels and samples differ in length");
    }
    const int classes = static_cast<int>(net.spec.class_count());
    for (int y : labels) {
        if (y < 0 || y >= classes) throw ContractError("label outside [0, class count)");
    }
}

double log_sum_exp(std::span<const double> row) {
    const double m = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double v : row) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace

SampleMatrix softmax(const SampleMatrix& logits) {
    SampleMatrix p(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto z = logits.row(r);
        const double lse = log_sum_exp(z);
        auto out = p.row(r);
        for (std::size_t c = 0; c < z.size(); ++c) out[c] = std::exp(z[c] - lse);
    }
    return p;
}

ForwardResult forward(const Network& net, const SampleMatrix& batch, bool capture) {
    check_input(net, batch);
    ForwardResult res;
    SampleMatrix h = batch;
    const std::size_t last = net.layers.size() - 1;
    for (std::size_t l = 0; l <= last; ++l) {
        h = affine(h, net.layers[l]);
        if (l < last) {
            activate(h, net.spec.activation);
            if (capture) res.activations.push_back(h);
        }
    }
    if (capture) res.activations.push_back(softmax(h));
    res.logits = std::move(h);
    return res;
}

LossAndGrad loss_and_grad(const Network& net, const SampleMatrix& x,
                          std::span<const int> labels) {
    check_input(net, x);
    check_labels(net, x, labels);
    if (x.rows() == 0) throw ParameterError("loss_and_grad: empty batch");

    const std::size_t n = x.rows();
    const std::size_t layers = net.layers.size();

    // inputs[l] is the input to layer l.
    std::vector<SampleMatrix> inputs;
    inputs.reserve(layers);
    inputs.push_back(x);
    SampleMatrix z;
    for (std::size_t l = 0; l < layers; ++l) {
        z = affine(inputs.back(), net.layers[l]);
        if (l + 1 < layers) {
            activate(z, net.spec.activation);
            inputs.push_back(std::move(z));
        }
    }

    // dL/dlogits = (softmax - onehot) / n
    LossAndGrad out;
    SampleMatrix delta(n, z.cols());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto zr = z.row(r);
        const double lse = log_sum_exp(zr);
        const auto y = static_cast<std::size_t>(labels[r]);
        out.loss += lse - zr[y];
        auto dr = delta.row(r);
        for (std::size_t c = 0; c < zr.size(); ++c) {
            dr[c] = (std::exp(zr[c] - lse) - (c == y ? 1.0 : 0.0)) * inv_n;
        }
    }
    out.loss *= inv_n;

    out.grad.weights.resize(layers);
    out.grad.biases.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        const DenseLayer& layer = net.layers[l];
        const SampleMatrix& in = inputs[l];
        const std::size_t fan_in = layer.weights.rows();
        const std::size_t fan_out = layer.weights.cols();

        SampleMatrix gw(fan_in, fan_out);
        std::vector<double> gb(fan_out, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto dr = delta.row(r);
            const auto xr = in.row(r);
            for (std::size_t c = 0; c < fan_out; ++c) gb[c] += dr[c];
            for (std::size_t p = 0; p < fan_in; ++p) {
                const double a = xr[p];
                if (a == 0.0) continue;
                auto g = gw.row(p);
                for (std::size_t c = 0; c < fan_out; ++c) g[c] += a * dr[c];
            }
        }

        if (l > 0) {
            SampleMatrix prev(n, fan_in);
            for (std::size_t r = 0; r < n; ++r) {
                const auto dr = delta.row(r);
                const auto hr = in.row(r);
                auto pr = prev.row(r);
                for (std::size_t p = 0; p < fan_in; ++p) {
                    const auto w = layer.weights.row(p);
                    double s = 0.0;
                    for (std::size_t c = 0; c < fan_out; ++c) s += dr[c] * w[c];
                    pr[p] = s * activation_slope(hr[p], net.spec.activation);
                }
            }
            delta = std::move(prev);
        }
        out.grad.weights[l] = std::move(gw);
        out.grad.biases[l] = std::move(gb);
    }
    return out;
}

void sgd_step(Network& net, const Gradients& grad, std::span<const double> lr_per_layer,
              const OptimizerConfig& cfg) {
    const std::size_t layers = net.layers.size();
    if (lr_per_layer.size() != 1 && lr_per_layer.size() != layers) {
        throw ContractError("sgd_step: expected one learning rate or one per layer");
    }
    if (grad.weights.size() != layers || grad.biases.size() != layers) {
        throw ContractError("sgd_step: gradient does not match the network");
    }
    const double mu = cfg.momentum;
    auto update = [&](std::span<double> theta, std::span<double> v, std::span<const double> g,
                      double lr) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            v[i] = mu * v[i] - lr * g[i];
            theta[i] += cfg.nesterov ? mu * v[i] - lr * g[i] : v[i];
        }
    };
    for (std::size_t l = 0; l < layers; ++l) {
        DenseLayer& layer = net.layers[l];
        const double lr = lr_per_layer.size() == 1 ? lr_per_layer[0] : lr_per_layer[l];
        update(layer.weights.values(), layer.weight_velocity.values(), grad.weights[l].values(),
               lr);
        update(layer.bias, layer.bias_velocity, grad.biases[l], lr);
    }
}

Evaluation evaluate(const Network& net, const SampleMatrix& x, std::span<const int> labels) {
    if (x.rows() == 0) throw ParameterError("evaluate: empty evaluation set");
    check_input(net, x);
    check_labels(net, x, labels);

    constexpr std::size_t kChunk = 1024;
    std::size_t correct = 0;
    double loss = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < x.rows(); start += kChunk) {
        const std::size_t stop = std::min(x.rows(), start + kChunk);
        idx.resize(stop - start);
        for (std::size_t i = start; i < stop; ++i) idx[i - start] = i;
        const SampleMatrix logits = forward(net, x.select_rows(idx)).logits;
        for (std::size_t r = 0; r < logits.rows(); ++r) {
            const auto z = logits.row(r);
            const auto y = static_cast<std::size_t>(labels[start + r]);
            const auto best = static_cast<std::size_t>(
                std::max_element(z.begin(), z.end()) - z.begin());
            correct += best == y;
            loss += log_sum_exp(z) - z[y];
        }
    }
    const double n = static_cast<double>(x.rows());
    return {static_cast<double>(correct) / n, loss / n};
}

void save_network(std::ostream& os, const Network& net) {
    BinaryWriter w(os);
    w.put_u64(net.spec.layer_sizes.size());
    for (std::size_t s : net.spec.layer_sizes) w.put_u64(s);
    w.put_u64(static_cast<std::uint64_t>(net.spec.activation));
    w.put_u64(net.spec.seed);
    for (const DenseLayer& layer : net.layers) {
        w.put_doubles(layer.weights.values());
        w.put_doubles(layer.bias);
        w.put_doubles(layer.weight_velocity.values());
        w.put_doubles(layer.bias_velocity);
    }
}

Network load_network(std::istream& is) {
    BinaryReader r(is);
    NetworkSpec spec;
    const std::uint64_t count = r.get_u64();
    if (count < 2 || count > 64) throw ParseError(ParseErrorKind::corrupt, "network: bad layer count");
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t s = r.get_u64();
        if (s == 0 || s > (1u << 24)) throw ParseError(ParseErrorKind::corrupt, "network: bad layer size");
        spec.layer_sizes.push_back(static_cast<std::size_t>(s));
    }
    const std::uint64_t act = r.get_u64();
    if (act > 1) throw ParseError(ParseErrorKind::corrupt, "network: bad activation");
    spec.activation = static_cast<Activation>(act);
    spec.seed = r.get_u64();
    spec.validate();

    Network net;
    net.spec = spec;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        DenseLayer layer;
        layer.weights = SampleMatrix(spec.layer_sizes[l], spec.layer_sizes[l + 1]);
        layer.bias.resize(spec.layer_sizes[l + 1]);
        layer.weight_velocity = SampleMatrix(spec.layer_sizes[l], spec.layer_sizes[l + 1]);
        layer.bias_velocity.resize(spec.layer_sizes[l + 1]);
        r.get_doubles(layer.weights.values());
        r.get_doubles(layer.bias);
        r.get_doubles(layer.weight_velocity.values());
        r.get_doubles(layer.bias_velocity);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace mirate
