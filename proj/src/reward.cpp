#include "ncsnaf/reward.hpp"

#include "ncsnaf/errors.hpp"

#include <string>

namespace ncsnaf::reward {

namespace {

double weighted_square(const Vector& d, const Vector& diag) {
    return d.cwiseAbs2().dot(diag);
}

} // namespace

void RewardWeights::validate() const {
    if (output_weights.size() == 0 || (output_weights.array() < 0.0).any())
        throw ConfigError("reward.output_weights: need non-negative entries");
    if (!(effort >= 0.0))
        throw ConfigError("reward.effort: must be non-negative");
    if (!(smoothness >= 0.0))
        throw ConfigError("reward.smoothness: must be non-negative");
}

double r1(const Vector& y_next, const Vector& y, const Vector& u, const RewardWeights& w) {
    require_dims(y_next.size() == y.size() && y.size() == w.output_weights.size(),
                 "r1: output dimension mismatch");
    return -weighted_square(y_next - y, w.output_weights) - w.effort * u.squaredNorm();
}

double r2(std::span<const Vector> outputs, std::size_t tau_o, const RewardWeights& w) {
    if (outputs.size() != tau_o + 1)
        throw DimensionError("r2: expected " + std::to_string(tau_o + 1) + " outputs, got " +
                             std::to_string(outputs.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < tau_o; ++i) {
        require_dims(outputs[i].size() == w.output_weights.size() && outputs[i + 1].size() == w.output_weights.size(),
                     "r2: output dimension mismatch");
        sum += weighted_square(outputs[i] - outputs[i + 1], w.output_weights);
    }
    return -sum;
}

double r3(std::span<const Vector> inputs, std::size_t horizon, const RewardWeights& w) {
    if (inputs.size() != horizon + 1)
        throw DimensionError("r3: expected " + std::to_string(horizon + 1) + " inputs, got " +
                             std::to_string(inputs.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < horizon; ++i) {
        require_dims(inputs[i].size() == inputs[i + 1].size(), "r3: input dimension mismatch");
        sum += (inputs[i] - inputs[i + 1]).squaredNorm();
    }
    return -w.smoothness * sum;
}

} // namespace ncsnaf::reward
