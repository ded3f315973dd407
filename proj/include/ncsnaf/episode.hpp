#pragma once

// Event-driven networked closed loop for one episode.
//
// The sensor samples y_k = C x(k period) and sends it over the
// sensor-to-controller channel. When y_k arrives the controller builds w_k,
// stores the previous transition, picks u_k = mu(w_k) (+ noise while
// training), sends it over the controller-to-plant channel, and, every
// `update_period` controller steps, runs one learning round. The actuator
// holds the most recently arrived input.
//
// The plant is simulated over [0, steps * period]. The controller acts on
// samples 0..steps-1; sample `steps` only closes the last transition.

#include "ncsnaf/delay.hpp"
#include "ncsnaf/learner.hpp"
#include "ncsnaf/ou_noise.hpp"
#include "ncsnaf/plant.hpp"
#include "ncsnaf/reward.hpp"

#include <limits>
#include <random>
#include <vector>

namespace ncsnaf::agent {

enum class RolloutMode { Train, Eval };

struct EpisodeSettings {
    std::size_t steps = 192;
    double substep = 0.0625 / 16.0;
    double divergence_threshold = plant::kDefaultDivergenceThreshold;
    double divergence_penalty = -1000.0;
    reward::RewardWeights reward;
};

inline constexpr double kNotDelivered = std::numeric_limits<double>::quiet_NaN();

struct SampleRecord {
    std::size_t k = 0;
    double time = 0.0;
    Vector state;
    Vector output;
    Vector applied_input;          // held input at the sampling instant
    double tau_sc = kNotDelivered; // sampled channel delays for packet k
    double tau_cp = kNotDelivered;
    double controller_arrival = kNotDelivered; // clamped arrival of y_k
    double plant_arrival = kNotDelivered;      // clamped arrival of u_k
    Vector action;                 // u_k, empty when the controller never acted on y_k
};

struct EpisodeLog {
    std::vector<SampleRecord> samples;
    std::vector<double> rewards; // rewards[k] = R(w_k, u_k, w_{k+1})
    std::vector<Transition> transitions;
    bool diverged = false;
    double divergence_time = kNotDelivered;
    double divergence_penalty = 0.0;
    std::size_t updates = 0;
    double loss_sum = 0.0;

    // Sum of rewards[k] for k >= start, plus the divergence penalty if any.
    double reward_sum_from(std::size_t start) const;
    double mean_loss() const { return updates == 0 ? 0.0 : loss_sum / static_cast<double>(updates); }
};

struct EpisodeEnvironment {
    const plant::PlantModel& plant;
    const plant::SensorMap& sensor;
    const delay::DelayModel& delays;
    StateDims dims;
};

// `noise` and `episode` are only used in Train mode (noise may be null, which
// means no exploration). Eval mode never stores transitions nor updates.
EpisodeLog run_episode(NafAgent& agent, const EpisodeEnvironment& env, const Vector& x0,
                       const EpisodeSettings& settings, std::mt19937_64& delay_rng, OuProcess* noise,
                       std::mt19937_64* noise_rng, int episode, RolloutMode mode);

} // namespace ncsnaf::agent
