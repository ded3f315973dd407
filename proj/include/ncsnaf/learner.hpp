#pragma once

#include "ncsnaf/nn.hpp"
#include "ncsnaf/replay.hpp"

#include <algorithm>
#include <cstdint>
#include <random>

namespace ncsnaf::agent {

struct LearnerConfig {
    double gamma = 0.99;
    double beta = 0.001; // soft target update rate
    std::size_t batch_size = 128;
    std::size_t iterations = 10;    // minibatch updates per update round
    std::size_t update_period = 4;  // controller steps between update rounds
    std::size_t warmup = 128;       // minimum replay size before updating
    std::size_t replay_capacity = 1'000'000;
    double learning_rate = 1.25e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
};

inline double td_target(double reward, double v_next, double gamma) { return reward + gamma * v_next; }

struct LossAndGrad {
    double loss = 0.0;
    nn::ParameterVector grad;
};

// J = mean_n (r_n + gamma V(w'_n; target) - Q(w_n, u_n; net))^2 and dJ/dtheta
// for the main network only. Throws NumericsError naming the first
// transition whose TD error is non-finite.
LossAndGrad batch_loss_and_grad(const nn::MlpNetwork& net, const nn::MlpNetwork& target,
                                const TransitionBatch& batch, double gamma);

// Main/target network pair with Adam and replay memory.
class NafAgent {
public:
    NafAgent(nn::MlpNetwork net, StateDims dims, LearnerConfig config, std::uint64_t sampling_seed);
    NafAgent(nn::MlpNetwork net, nn::AdamState adam, StateDims dims, LearnerConfig config,
             std::uint64_t sampling_seed);

    // mu(w; theta)
    Vector policy(const ExtendedState& w) const;

    void remember(const Transition& t) { replay_.push(t); }

    struct UpdateStats {
        std::size_t updates = 0;
        double loss_sum = 0.0;
    };

    // One update round: `iterations` minibatch steps, each followed by a soft
    // target update. No-op while the replay holds fewer than `warmup`
    // transitions.
    UpdateStats update_round();

    bool warm() const { return replay_.size() >= std::max(config_.warmup, config_.batch_size); }

    const nn::MlpNetwork& main() const { return main_; }
    const nn::MlpNetwork& target() const { return target_; }
    const nn::AdamState& adam() const { return adam_; }
    const ReplayMemory& replay() const { return replay_; }
    const LearnerConfig& config() const { return config_; }
    std::uint64_t total_updates() const { return total_updates_; }

private:
    LearnerConfig config_;
    nn::MlpNetwork main_;
    nn::MlpNetwork target_;
    nn::AdamState adam_;
    ReplayMemory replay_;
    std::mt19937_64 rng_;
    std::uint64_t total_updates_ = 0;
};

} // namespace ncsnaf::agent
