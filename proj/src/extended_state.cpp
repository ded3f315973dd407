#include "ncsnaf/extended_state.hpp"

#include "ncsnaf/errors.hpp"

#include <string>
#include <vector>

namespace ncsnaf::agent {

void StateDims::validate() const {
    if (p < 1)
        throw ConfigError("state.p: output dimension must be >= 1");
    if (m < 1)
        throw ConfigError("state.m: input dimension must be >= 1");
    if (tau < 0)
        throw ConfigError("state.tau: must be >= 0");
    if (tau_o < 1)
        throw ConfigError("state.tau_o: must be >= 1");
}

ExtendedState::ExtendedState(StateDims dims, Vector values) : dims_(dims), values_(std::move(values)) {
    require_dims(values_.size() == dims_.size(), "extended state length " + std::to_string(values_.size()) +
                                                      " != " + std::to_string(dims_.size()));
}

Eigen::VectorBlock<const Vector> ExtendedState::output(Index age) const {
    require_dims(age >= 0 && age <= dims_.tau_o, "output age out of range");
    return values_.segment(age * dims_.p, dims_.p);
}

Eigen::VectorBlock<const Vector> ExtendedState::input(Index age) const {
    require_dims(age >= 1 && age <= dims_.input_slots(), "input age out of range");
    return values_.segment(dims_.p * dims_.output_slots() + (age - 1) * dims_.m, dims_.m);
}

HistoryBuffer::HistoryBuffer(StateDims dims) : dims_(dims) {
    dims_.validate();
    inputs_.assign(static_cast<std::size_t>(dims_.input_slots()), Vector::Zero(dims_.m));
}

void HistoryBuffer::push_output(const Vector& y) {
    require_dims(y.size() == dims_.p, "output dimension mismatch");
    if (outputs_.empty()) {
        outputs_.assign(static_cast<std::size_t>(dims_.output_slots()), y);
    } else {
        outputs_.push_front(y);
        outputs_.pop_back();
    }
    ++outputs_pushed_;
}

void HistoryBuffer::push_input(const Vector& u) {
    require_dims(u.size() == dims_.m, "input dimension mismatch");
    if (inputs_.empty())
        return;
    inputs_.push_front(u);
    inputs_.pop_back();
}

ExtendedState HistoryBuffer::build() const {
    if (outputs_.empty())
        throw DimensionError("extended state needs at least the first output");
    Vector values(dims_.size());
    Index pos = 0;
    for (const auto& y : outputs_) {
        values.segment(pos, dims_.p) = y;
        pos += dims_.p;
    }
    for (const auto& u : inputs_) {
        values.segment(pos, dims_.m) = u;
        pos += dims_.m;
    }
    return ExtendedState(dims_, std::move(values));
}

ExtendedState build_extended_state(const HistoryBuffer& history) { return history.build(); }

double transition_reward(const ExtendedState& w, const Vector& u, const ExtendedState& w_next,
                         const reward::RewardWeights& weights) {
    const auto& d = w.dims();
    require_dims(d == w_next.dims(), "transition states have different dimensions");
    require_dims(u.size() == d.m, "action dimension mismatch");

    std::vector<Vector> outputs;
    outputs.reserve(static_cast<std::size_t>(d.output_slots()));
    for (Index i = 0; i <= d.tau_o; ++i)
        outputs.emplace_back(w.output(i));

    std::vector<Vector> inputs;
    inputs.reserve(static_cast<std::size_t>(d.input_slots() + 1));
    inputs.push_back(u);
    for (Index i = 1; i <= d.input_slots(); ++i)
        inputs.emplace_back(w.input(i));

    const double a = reward::r1(w_next.output(0), w.output(0), u, weights);
    const double b = reward::r2(outputs, static_cast<std::size_t>(d.tau_o), weights);
    const double c = reward::r3(inputs, static_cast<std::size_t>(d.input_slots()), weights);
    return reward::total(a, b, c);
}

} // namespace ncsnaf::agent
