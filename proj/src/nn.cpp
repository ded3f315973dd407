#include "ncsnaf/nn.hpp"

#include "ncsnaf/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace ncsnaf::nn {

namespace {

void apply_activation(Matrix& z, const Activation& act, Matrix& out) {
    switch (act.kind) {
    case ActivationKind::ReLU:
        out = z.cwiseMax(0.0);
        break;
    case ActivationKind::Linear:
        out = z;
        break;
    case ActivationKind::ScaledTanh:
        out = act.weight * z.array().tanh();
        break;
    }
}

// grad <- grad * act'(pre), with post = act(pre)
void activation_backward(Matrix& grad, const Matrix& pre, const Matrix& post, const Activation& act) {
    switch (act.kind) {
    case ActivationKind::ReLU:
        grad.array() *= (pre.array() > 0.0).cast<double>();
        break;
    case ActivationKind::Linear:
        break;
    case ActivationKind::ScaledTanh: {
        // d/dz w*tanh(z) = w * (1 - tanh^2) = w - post^2 / w
        const double w = act.weight;
        grad.array() *= (w - post.array().square() / w);
        break;
    }
    }
}

void check_finite(const Vector& v, const char* what) {
    if (!v.allFinite())
        throw NumericsError(std::string(what) + ": non-finite entry");
}

} // namespace

Activation Activation::scaled_tanh(double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw DimensionError("scaled tanh weight must be positive and finite");
    return {ActivationKind::ScaledTanh, weight};
}

MlpNetwork::MlpNetwork(ParameterLayout layout, Index action_dim, Vector params)
    : layout_(std::move(layout)), action_dim_(action_dim), params_(std::move(params)) {
    const auto& layers = layout_.layers;
    require_dims(action_dim_ >= 1, "action dimension must be >= 1");
    require_dims(layers.size() >= 4, "network needs at least one trunk layer and three heads");
    trunk_depth_ = layers.size() - 3;

    std::size_t offset = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        require_dims(l.in > 0 && l.out > 0, "layer " + std::to_string(i) + " has a zero dimension");
        require_dims(l.offset == offset, "layer " + std::to_string(i) + " offset is not contiguous");
        offset += l.size();
        if (i > 0 && i < trunk_depth_)
            require_dims(l.in == layers[i - 1].out, "trunk layer " + std::to_string(i) + " input width mismatch");
        if (i < trunk_depth_ && l.activation.kind != ActivationKind::ReLU)
            throw DimensionError("trunk layers must use ReLU");
    }
    require_dims(offset == layout_.total, "layout total does not match layer blocks");

    const Index width = layers[trunk_depth_ - 1].out;
    const auto& v = layers[value_head()];
    const auto& mu = layers[mu_head()];
    const auto& lh = layers[l_head()];
    require_dims(v.in == width && mu.in == width && lh.in == width, "head input width must equal trunk output width");
    require_dims(v.out == 1, "value head must have width 1");
    require_dims(mu.out == action_dim_, "mu head width must equal action dimension");
    require_dims(lh.out == triangle_size(action_dim_), "l head width must be m(m+1)/2");
    if (v.activation.kind != ActivationKind::Linear || lh.activation.kind != ActivationKind::Linear)
        throw DimensionError("value and l heads must be linear");
    if (mu.activation.kind != ActivationKind::ScaledTanh || !(mu.activation.weight > 0.0))
        throw DimensionError("mu head must be a scaled tanh with positive weight");

    require_dims(static_cast<std::size_t>(params_.size()) == layout_.total,
                 "parameter count does not match layout");
    check_finite(params_, "network parameters");
}

Eigen::Map<const RowMatrix> MlpNetwork::weights(std::size_t layer) const {
    const auto& l = layout_.layers.at(layer);
    return {params_.data() + l.offset, l.out, l.in};
}

Eigen::Map<RowMatrix> MlpNetwork::weights(std::size_t layer) {
    const auto& l = layout_.layers.at(layer);
    return {params_.data() + l.offset, l.out, l.in};
}

Eigen::Map<const Vector> MlpNetwork::biases(std::size_t layer) const {
    const auto& l = layout_.layers.at(layer);
    return {params_.data() + l.offset + l.weight_count(), l.out};
}

Eigen::Map<Vector> MlpNetwork::biases(std::size_t layer) {
    const auto& l = layout_.layers.at(layer);
    return {params_.data() + l.offset + l.weight_count(), l.out};
}

void MlpNetwork::set_parameters(const Vector& params) {
    require_dims(static_cast<std::size_t>(params.size()) == layout_.total, "parameter count does not match layout");
    check_finite(params, "network parameters");
    params_ = params;
}

ParameterLayout make_layout(const std::vector<Index>& layer_widths, Index action_dim, double tanh_weight) {
    if (layer_widths.size() < 2)
        throw DimensionError("need an input width and at least one hidden layer");
    for (Index w : layer_widths)
        require_dims(w > 0, "layer widths must be positive");
    require_dims(action_dim >= 1, "action dimension must be >= 1");

    ParameterLayout layout;
    std::size_t offset = 0;
    auto push = [&](Index in, Index out, Activation act) {
        LayerShape shape{in, out, act, offset};
        offset += shape.size();
        layout.layers.push_back(shape);
    };
    for (std::size_t i = 1; i < layer_widths.size(); ++i)
        push(layer_widths[i - 1], layer_widths[i], Activation::relu());
    const Index width = layer_widths.back();
    push(width, 1, Activation::linear());
    push(width, action_dim, Activation::scaled_tanh(tanh_weight));
    push(width, triangle_size(action_dim), Activation::linear());
    layout.total = offset;
    return layout;
}

MlpNetwork init_network(const std::vector<Index>& layer_widths, Index action_dim, double tanh_weight,
                        std::uint64_t seed) {
    ParameterLayout layout = make_layout(layer_widths, action_dim, tanh_weight);
    Vector params = Vector::Zero(static_cast<Index>(layout.total));
    std::mt19937_64 rng(seed);
    const std::size_t trunk = layer_widths.size() - 1;
    for (std::size_t i = 0; i < layout.layers.size(); ++i) {
        const auto& l = layout.layers[i];
        const double limit = i < trunk ? std::sqrt(6.0 / static_cast<double>(l.in)) : 1e-3;
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t j = 0; j < l.weight_count(); ++j)
            params[static_cast<Index>(l.offset + j)] = dist(rng);
    }
    return MlpNetwork(std::move(layout), action_dim, std::move(params));
}

namespace {

void layer_forward(const MlpNetwork& net, std::size_t layer, const Matrix& in, Matrix& pre, Matrix& post) {
    pre.noalias() = net.weights(layer) * in;
    pre.colwise() += net.biases(layer);
    apply_activation(pre, net.layout().layers[layer].activation, post);
}

} // namespace

ForwardTrace forward(const MlpNetwork& net, const Matrix& inputs) {
    require_dims(inputs.rows() == net.input_dim(),
                 "input length " + std::to_string(inputs.rows()) + " != network input width " +
                     std::to_string(net.input_dim()));
    if (!inputs.allFinite())
        throw NumericsError("forward: non-finite input");

    ForwardTrace trace;
    trace.input = inputs;
    const std::size_t depth = net.trunk_depth();
    trace.pre.resize(depth);
    trace.post.resize(depth);
    for (std::size_t i = 0; i < depth; ++i)
        layer_forward(net, i, i == 0 ? trace.input : trace.post[i - 1], trace.pre[i], trace.post[i]);

    const Matrix& h = trace.post.back();
    Matrix pre;
    layer_forward(net, net.value_head(), h, pre, trace.heads.value);
    layer_forward(net, net.mu_head(), h, pre, trace.heads.mu);
    layer_forward(net, net.l_head(), h, pre, trace.heads.l);
    return trace;
}

ForwardTrace forward(const MlpNetwork& net, const Vector& input) {
    return forward(net, Matrix(input));
}

HeadOutputs evaluate_heads(const MlpNetwork& net, const Matrix& inputs) {
    return forward(net, inputs).heads;
}

Gradients backward(const MlpNetwork& net, const ForwardTrace& trace, const HeadGrads& head_grads) {
    const std::size_t depth = net.trunk_depth();
    const Index batch = trace.batch();
    require_dims(trace.pre.size() == depth && trace.post.size() == depth, "trace depth does not match network");
    require_dims(trace.input.rows() == net.input_dim(), "trace input width does not match network");
    for (std::size_t i = 0; i < depth; ++i)
        require_dims(trace.post[i].rows() == net.layout().layers[i].out && trace.post[i].cols() == batch,
                     "trace layer " + std::to_string(i) + " shape does not match network");
    require_dims(head_grads.value.rows() == 1 && head_grads.value.cols() == batch, "value gradient shape mismatch");
    require_dims(head_grads.mu.rows() == net.action_dim() && head_grads.mu.cols() == batch, "mu gradient shape mismatch");
    require_dims(head_grads.l.rows() == triangle_size(net.action_dim()) && head_grads.l.cols() == batch,
                 "l gradient shape mismatch");

    Gradients out;
    out.params.layout = net.layout();
    out.params.values = Vector::Zero(static_cast<Index>(net.parameter_count()));
    double* g = out.params.values.data();
    const auto& layers = net.layout().layers;

    auto accumulate = [&](std::size_t layer, const Matrix& dz, const Matrix& in) {
        const auto& l = layers[layer];
        Eigen::Map<RowMatrix> dw(g + l.offset, l.out, l.in);
        Eigen::Map<Vector> db(g + l.offset + l.weight_count(), l.out);
        dw.noalias() = dz * in.transpose();
        db = dz.rowwise().sum();
    };

    const Matrix& h = trace.post.back();
    Matrix dh = Matrix::Zero(h.rows(), batch);

    // value and l heads are linear, so dz equals the incoming gradient
    accumulate(net.value_head(), head_grads.value, h);
    dh.noalias() += net.weights(net.value_head()).transpose() * head_grads.value;

    Matrix dz_mu = head_grads.mu;
    activation_backward(dz_mu, Matrix(), trace.heads.mu, layers[net.mu_head()].activation);
    accumulate(net.mu_head(), dz_mu, h);
    dh.noalias() += net.weights(net.mu_head()).transpose() * dz_mu;

    accumulate(net.l_head(), head_grads.l, h);
    dh.noalias() += net.weights(net.l_head()).transpose() * head_grads.l;

    Matrix grad = std::move(dh);
    for (std::size_t i = depth; i-- > 0;) {
        activation_backward(grad, trace.pre[i], trace.post[i], layers[i].activation);
        const Matrix& in = i == 0 ? trace.input : trace.post[i - 1];
        accumulate(i, grad, in);
        Matrix next = net.weights(i).transpose() * grad;
        grad = std::move(next);
    }
    out.input = std::move(grad);
    return out;
}

ParameterVector flatten(const MlpNetwork& net) {
    return {net.layout(), net.parameters()};
}

void unflatten(MlpNetwork& net, const ParameterVector& params) {
    if (!(params.layout == net.layout()))
        throw DimensionError("parameter layout does not match network");
    net.set_parameters(params.values);
}

AdamState AdamState::fresh(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon) {
    AdamState s;
    s.first_moment = Vector::Zero(static_cast<Index>(size));
    s.second_moment = Vector::Zero(static_cast<Index>(size));
    s.learning_rate = learning_rate;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

void adam_step(ParameterVector& params, const ParameterVector& grads, AdamState& state) {
    const Index n = params.values.size();
    require_dims(grads.values.size() == n, "gradient size does not match parameters");
    require_dims(state.first_moment.size() == n && state.second_moment.size() == n,
                 "optimizer state size does not match parameters");
    if (!(grads.layout == params.layout))
        throw DimensionError("gradient layout does not match parameters");
    if (!grads.values.allFinite())
        throw NumericsError("adam_step: non-finite gradient");

    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const std::uint64_t step = state.step + 1;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));

    Vector m = b1 * state.first_moment + (1.0 - b1) * grads.values;
    Vector v = b2 * state.second_moment + (1.0 - b2) * grads.values.cwiseAbs2();
    Vector updated = params.values.array() -
                     state.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
    if (!updated.allFinite())
        throw NumericsError("adam_step: update produced non-finite parameters");

    params.values = std::move(updated);
    state.first_moment = std::move(m);
    state.second_moment = std::move(v);
    state.step = step;
}

void soft_update(ParameterVector& target, const ParameterVector& main, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw DimensionError("soft update rate must lie in [0, 1]");
    if (!(target.layout == main.layout) || target.values.size() != main.values.size())
        throw DimensionError("soft update layout mismatch");
    target.values = beta * main.values + (1.0 - beta) * target.values;
}

void soft_update(MlpNetwork& target, const MlpNetwork& main, double beta) {
    ParameterVector t = flatten(target);
    soft_update(t, flatten(main), beta);
    unflatten(target, t);
}

} // namespace ncsnaf::nn
