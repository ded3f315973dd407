#include "ncsnaf/learner.hpp"

#include "ncsnaf/errors.hpp"
#include "ncsnaf/naf.hpp"

#include <cmath>
#include <string>

namespace ncsnaf::agent {

void LearnerConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ConfigError("train.gamma: must lie in [0, 1)");
    if (!(beta > 0.0 && beta <= 1.0))
        throw ConfigError("train.beta: must lie in (0, 1]");
    if (batch_size == 0)
        throw ConfigError("train.batch_size: must be positive");
    if (iterations == 0)
        throw ConfigError("train.iterations: must be positive");
    if (update_period == 0)
        throw ConfigError("train.update_period: must be positive");
    if (replay_capacity < batch_size)
        throw ConfigError("train.replay_capacity: must hold at least one batch");
    if (!(learning_rate > 0.0))
        throw ConfigError("train.learning_rate: must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw ConfigError("train.adam_beta1/adam_beta2: must lie in [0, 1)");
    if (!(adam_epsilon > 0.0))
        throw ConfigError("train.adam_epsilon: must be positive");
}

LossAndGrad batch_loss_and_grad(const nn::MlpNetwork& net, const nn::MlpNetwork& target,
                                const TransitionBatch& batch, double gamma) {
    const Index n = batch.size();
    require_dims(n > 0, "batch must be nonempty");
    require_dims(batch.next_states.cols() == n && batch.actions.cols() == n && batch.rewards.size() == n,
                 "batch columns disagree");

    // Targets are constants: they come from the target network only.
    const nn::HeadOutputs next = nn::evaluate_heads(target, batch.next_states);
    const Eigen::RowVectorXd targets = batch.rewards + gamma * next.value.row(0);

    const nn::ForwardTrace trace = nn::forward(net, batch.states);
    const nn::Matrix q = naf::batch_q(trace.heads, batch.actions);
    const Eigen::RowVectorXd residual = targets - q.row(0);
    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(residual(i)))
            throw NumericsError("non-finite TD error at batch transition " + std::to_string(i));
    }

    LossAndGrad out;
    out.loss = residual.squaredNorm() / static_cast<double>(n);
    const nn::Matrix dQ = (-2.0 / static_cast<double>(n)) * residual;
    const nn::HeadGrads head_grads = naf::batch_backward(trace.heads, batch.actions, dQ);
    out.grad = nn::backward(net, trace, head_grads).params;
    return out;
}

NafAgent::NafAgent(nn::MlpNetwork net, StateDims dims, LearnerConfig config, std::uint64_t sampling_seed)
    : NafAgent(net,
               nn::AdamState::fresh(net.parameter_count(), config.learning_rate, config.adam_beta1,
                                    config.adam_beta2, config.adam_epsilon),
               dims, config, sampling_seed) {}

NafAgent::NafAgent(nn::MlpNetwork net, nn::AdamState adam, StateDims dims, LearnerConfig config,
                   std::uint64_t sampling_seed)
    : config_(config), main_(net), target_(std::move(net)), adam_(std::move(adam)),
      replay_(dims, config.replay_capacity), rng_(sampling_seed) {
    config_.validate();
    require_dims(main_.input_dim() == dims.size(), "network input width does not match extended state length");
    require_dims(main_.action_dim() == dims.m, "network action dimension does not match input dimension");
    require_dims(static_cast<std::size_t>(adam_.first_moment.size()) == main_.parameter_count(),
                 "optimizer state does not match network");
}

Vector NafAgent::policy(const ExtendedState& w) const {
    return nn::evaluate_heads(main_, w.values()).mu.col(0);
}

NafAgent::UpdateStats NafAgent::update_round() {
    UpdateStats stats;
    if (!warm())
        return stats;
    for (std::size_t it = 0; it < config_.iterations; ++it) {
        const TransitionBatch batch = replay_.sample(config_.batch_size, rng_);
        LossAndGrad lg = batch_loss_and_grad(main_, target_, batch, config_.gamma);
        nn::ParameterVector params = nn::flatten(main_);
        nn::adam_step(params, lg.grad, adam_);
        nn::unflatten(main_, params);
        nn::soft_update(target_, main_, config_.beta);
        stats.loss_sum += lg.loss;
        ++stats.updates;
        ++total_updates_;
    }
    return stats;
}

} // namespace ncsnaf::agent
