#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mirate/sample_matrix.hpp"

namespace mirate {

enum class Activation { relu, tanh };

struct NetworkSpec {
    /// input dim, hidden dims..., class count
    std::vector<std::size_t> layer_sizes;
    Activation activation = Activation::relu;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t class_count() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return layer_sizes.size() - 1; }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// One affine layer: y = x W + b, with W of shape (fan_in x fan_out).
struct DenseLayer {
    SampleMatrix weights;
    std::vector<double> bias;
    SampleMatrix weight_velocity;
    std::vector<double> bias_velocity;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct Network {
    NetworkSpec spec;
    std::vector<DenseLayer> layers;

    friend bool operator==(const Network&, const Network&) = default;
};

struct OptimizerConfig {
    double momentum = 0.9;
    bool nesterov = true;
    std::size_t batch_size = 32;

    void validate() const;

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct Gradients {
    std::vector<SampleMatrix> weights;
    std::vector<std::vector<double>> biases;
};

struct ForwardResult {
    SampleMatrix logits;
    /// Post-activation output of every layer when captured; the last entry holds
    /// softmax probabilities.
    std::vector<SampleMatrix> activations;
};

struct LossAndGrad {
    double loss = 0.0;
    Gradients grad;
};

struct Evaluation {
    double accuracy = 0.0;
    double loss = 0.0;
};

/// He-style (relu) or LeCun-style (tanh) normal initialisation, zero biases,
/// deterministic in spec.seed.
Network init_network(const NetworkSpec& spec);

ForwardResult forward(const Network& net, const SampleMatrix& batch, bool capture = false);

/// Row-wise softmax, computed in log-sum-exp form.
SampleMatrix softmax(const SampleMatrix& logits);

/// Mean softmax cross-entropy and its full gradient.
LossAndGrad loss_and_grad(const Network& net, const SampleMatrix& batch_x,
                          std::span<const int> batch_labels);

/// Momentum SGD. v <- mu v - lr g; theta <- theta + v, or with Nesterov
/// theta <- theta + mu v - lr g. A single learning rate is broadcast to all
/// layers; otherwise one rate per layer is required.
void sgd_step(Network& net, const Gradients& grad, std::span<const double> lr_per_layer,
              const OptimizerConfig& cfg);

/// Argmax accuracy and mean cross-entropy, evaluated in chunks.
Evaluation evaluate(const Network& net, const SampleMatrix& x, std::span<const int> labels);

/// Binary serialisation of spec, parameters and momentum buffers.
void save_network(std::ostream& os, const Network& net);
Network load_network(std::istream& is);

}  // namespace mirate
