#pragma once

#include "ncsnaf/delay.hpp"
#include "ncsnaf/episode.hpp"
#include "ncsnaf/learner.hpp"
#include "ncsnaf/ou_noise.hpp"
#include "ncsnaf/plant.hpp"
#include "ncsnaf/reward.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace ncsnaf::agent {

// Everything a training run needs besides I/O. Defaults are the Chua
// stabilization setup: 2^-4 s sampling, 12 s episodes, delays in [1, 3]
// periods on both channels with known bounds of 4 periods each (tau = 8),
// tau_o = 4, four hidden layers of 128 units.
struct TrainConfig {
    plant::ChuaParams chua;
    double sample_period = 0.0625;
    double horizon = 12.0;
    int substeps = 16; // RK4 steps per sampling period

    delay::DelayModel delays;
    Index tau_o = 4;

    std::vector<Index> hidden = {128, 128, 128, 128};
    double tanh_weight = 4.0;

    LearnerConfig learner;

    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    NoiseSchedule noise;

    reward::RewardWeights reward;
    double init_box = 4.5; // x0 uniform in [-init_box, init_box]^3
    int episodes = 8500;
    std::size_t metric_start = 50;
    double divergence_threshold = plant::kDefaultDivergenceThreshold;
    double divergence_penalty = -1000.0;

    std::size_t steps() const;
    double substep() const { return sample_period / substeps; }
    StateDims dims() const;
    EpisodeSettings episode_settings() const;
    std::vector<Index> layer_widths() const;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct EpisodeSummary {
    int episode = 0; // 1-based
    double reward_metric = 0.0;
    double mean_loss = 0.0;
    double noise_scale = 0.0;
    std::size_t updates = 0;
    std::size_t replay_size = 0;
    bool diverged = false;
};

struct TrainingLog {
    std::vector<EpisodeSummary> episodes;
};

// Independent random streams derived from one run seed.
enum class Stream : std::uint64_t { Init = 1, Delay = 2, Noise = 3, Replay = 4, InitialState = 5 };
std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

struct TrainCallbacks {
    std::function<void(const EpisodeSummary&, const NafAgent&)> on_episode;
    // Called with the last good agent state before a numerics error propagates.
    std::function<void(const NafAgent&, const Error&)> on_abort;
};

TrainingLog train(const TrainConfig& config, std::uint64_t seed, const TrainCallbacks& callbacks = {});

} // namespace ncsnaf::agent
