#pragma once

// Dense-network numerics for the NAF controller: a ReLU trunk feeding three
// parallel output heads (value, action mean, lower-triangular entries).
//
// All trainable parameters live in one flat vector. Each layer owns a
// contiguous block: the weight matrix in row-major (out x in) order followed
// by the bias vector. Batched routines take one sample per column.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ncsnaf::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

enum class ActivationKind : std::uint8_t { ReLU = 0, Linear = 1, ScaledTanh = 2 };

struct Activation {
    ActivationKind kind = ActivationKind::Linear;
    double weight = 1.0; // output scale of ScaledTanh, ignored otherwise

    static Activation relu() { return {ActivationKind::ReLU, 1.0}; }
    static Activation linear() { return {ActivationKind::Linear, 1.0}; }
    static Activation scaled_tanh(double weight);

    bool operator==(const Activation&) const = default;
};

struct LayerShape {
    Index in = 0;
    Index out = 0;
    Activation activation;
    std::size_t offset = 0; // start of this layer's block in the flat vector

    std::size_t weight_count() const { return static_cast<std::size_t>(in * out); }
    std::size_t size() const { return weight_count() + static_cast<std::size_t>(out); }
    bool operator==(const LayerShape&) const = default;
};

// Layer table for a network: trunk layers first, then the V, mu and l heads.
struct ParameterLayout {
    std::vector<LayerShape> layers;
    std::size_t total = 0;

    bool operator==(const ParameterLayout&) const = default;
};

struct ParameterVector {
    ParameterLayout layout;
    Vector values;
};

// Entries of a lower-triangular m x m matrix.
inline Index triangle_size(Index m) { return m * (m + 1) / 2; }

class MlpNetwork {
public:
    // Validates the layout (trunk chaining, head widths 1, m, m(m+1)/2) and
    // that params has layout.total finite entries.
    MlpNetwork(ParameterLayout layout, Index action_dim, Vector params);

    Index input_dim() const { return layout_.layers.front().in; }
    Index action_dim() const { return action_dim_; }
    Index trunk_width() const { return layout_.layers[trunk_depth_ - 1].out; }
    std::size_t trunk_depth() const { return trunk_depth_; }
    std::size_t value_head() const { return trunk_depth_; }
    std::size_t mu_head() const { return trunk_depth_ + 1; }
    std::size_t l_head() const { return trunk_depth_ + 2; }
    double tanh_weight() const { return layout_.layers[mu_head()].activation.weight; }

    const ParameterLayout& layout() const { return layout_; }
    const Vector& parameters() const { return params_; }
    std::size_t parameter_count() const { return layout_.total; }

    Eigen::Map<const RowMatrix> weights(std::size_t layer) const;
    Eigen::Map<RowMatrix> weights(std::size_t layer);
    Eigen::Map<const Vector> biases(std::size_t layer) const;
    Eigen::Map<Vector> biases(std::size_t layer);

    // Replaces every parameter; rejects non-finite values.
    void set_parameters(const Vector& params);

private:
    ParameterLayout layout_;
    Index action_dim_;
    std::size_t trunk_depth_;
    Vector params_;
};

// layer_widths = [input, hidden_1, ..., hidden_n]. Trunk weights are
// He-uniform, head weights uniform(-1e-3, 1e-3), all biases zero.
MlpNetwork init_network(const std::vector<Index>& layer_widths, Index action_dim,
                        double tanh_weight, std::uint64_t seed);

// Builds the layout init_network would produce, without allocating values.
ParameterLayout make_layout(const std::vector<Index>& layer_widths, Index action_dim,
                            double tanh_weight);

struct HeadOutputs {
    Matrix value; // 1 x B
    Matrix mu;    // m x B
    Matrix l;     // m(m+1)/2 x B
};

using HeadGrads = HeadOutputs;

struct ForwardTrace {
    Matrix input;
    std::vector<Matrix> pre;  // trunk pre-activations
    std::vector<Matrix> post; // trunk post-activations
    HeadOutputs heads;

    Index batch() const { return input.cols(); }
};

ForwardTrace forward(const MlpNetwork& net, const Matrix& inputs);
ForwardTrace forward(const MlpNetwork& net, const Vector& input);

// Heads only, without retaining the trunk activations.
HeadOutputs evaluate_heads(const MlpNetwork& net, const Matrix& inputs);

struct Gradients {
    ParameterVector params;
    Matrix input;
};

// Reverse-mode gradient of sum_b <head_grads[:, b], heads[:, b]>.
Gradients backward(const MlpNetwork& net, const ForwardTrace& trace, const HeadGrads& head_grads);

ParameterVector flatten(const MlpNetwork& net);
void unflatten(MlpNetwork& net, const ParameterVector& params);

struct AdamState {
    Vector first_moment;
    Vector second_moment;
    std::uint64_t step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState fresh(std::size_t size, double learning_rate, double beta1 = 0.9,
                           double beta2 = 0.999, double epsilon = 1e-8);
};

// Bias-corrected Adam step in place. Throws NumericsError on non-finite
// gradients (before touching any state) or non-finite results.
void adam_step(ParameterVector& params, const ParameterVector& grads, AdamState& state);

// target <- beta * main + (1 - beta) * target
void soft_update(ParameterVector& target, const ParameterVector& main, double beta);
void soft_update(MlpNetwork& target, const MlpNetwork& main, double beta);

} // namespace ncsnaf::nn
