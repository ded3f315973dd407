#include "ncsnaf/trainer.hpp"

#include "ncsnaf/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ncsnaf::agent {

std::size_t TrainConfig::steps() const {
    return static_cast<std::size_t>(std::llround(horizon / sample_period));
}

StateDims TrainConfig::dims() const {
    return StateDims{2, 1, static_cast<Index>(delays.tau()), tau_o};
}

EpisodeSettings TrainConfig::episode_settings() const {
    EpisodeSettings s;
    s.steps = steps();
    s.substep = substep();
    s.divergence_threshold = divergence_threshold;
    s.divergence_penalty = divergence_penalty;
    s.reward = reward;
    return s;
}

std::vector<Index> TrainConfig::layer_widths() const {
    std::vector<Index> widths{dims().size()};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    return widths;
}

void TrainConfig::validate() const {
    if (!(chua.p1 > 0.0) || !(chua.p2 > 0.0))
        throw ConfigError("plant.p1/p2: must be positive");
    if (!(sample_period > 0.0))
        throw ConfigError("plant.sample_period: must be positive");
    if (!(horizon > 0.0))
        throw ConfigError("train.horizon: must be positive");
    const double ratio = horizon / sample_period;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("train.horizon: must be a whole number of sampling periods");
    if (substeps < 1)
        throw ConfigError("plant.substeps: must be >= 1");
    if (std::abs(delays.period - sample_period) > 1e-12 * sample_period)
        throw ConfigError("delay period must equal plant.sample_period");
    delays.validate();
    if (tau_o < 1)
        throw ConfigError("state.tau_o: must be >= 1");
    if (hidden.empty())
        throw ConfigError("network.hidden: need at least one hidden layer");
    for (Index w : hidden)
        if (w < 1)
            throw ConfigError("network.hidden: widths must be positive");
    if (!(tanh_weight > 0.0))
        throw ConfigError("network.tanh_weight: must be positive");
    learner.validate();
    if (!(ou_theta >= 0.0) || !(ou_sigma >= 0.0))
        throw ConfigError("noise.theta/sigma: must be non-negative");
    if (!(noise.scale >= 0.0) || !(noise.final_scale >= 0.0))
        throw ConfigError("noise.scale/final_scale: must be non-negative");
    if (noise.hold_episodes < 0)
        throw ConfigError("noise.hold_episodes: must be non-negative");
    reward.validate();
    if (reward.output_weights.size() != 2)
        throw ConfigError("reward.output_weights: need one weight per sensed output (2)");
    if (!(init_box >= 0.0))
        throw ConfigError("train.init_box: must be non-negative");
    if (episodes < 1)
        throw ConfigError("train.episodes: must be >= 1");
    if (!(divergence_threshold > 0.0))
        throw ConfigError("train.divergence_threshold: must be positive");
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

TrainingLog train(const TrainConfig& config, std::uint64_t seed, const TrainCallbacks& callbacks) {
    config.validate();
    const StateDims dims = config.dims();

    NafAgent agent(nn::init_network(config.layer_widths(), dims.m, config.tanh_weight,
                                    derive_seed(seed, Stream::Init)),
                   dims, config.learner, derive_seed(seed, Stream::Replay));

    plant::ChuaCircuit chua(config.chua);
    const plant::SensorMap sensor = plant::SensorMap::chua_xy(config.sample_period);
    const EpisodeEnvironment env{chua, sensor, config.delays, dims};
    const EpisodeSettings settings = config.episode_settings();

    NoiseSchedule schedule = config.noise;
    schedule.total_episodes = config.episodes;
    OuProcess noise(dims.m, config.ou_theta, config.ou_sigma, schedule);

    std::mt19937_64 delay_rng(derive_seed(seed, Stream::Delay));
    std::mt19937_64 noise_rng(derive_seed(seed, Stream::Noise));
    std::mt19937_64 init_rng(derive_seed(seed, Stream::InitialState));
    std::uniform_real_distribution<double> box(-config.init_box, config.init_box);

    TrainingLog log;
    log.episodes.reserve(static_cast<std::size_t>(config.episodes));
    for (int episode = 1; episode <= config.episodes; ++episode) {
        Vector x0(3);
        for (Index i = 0; i < 3; ++i)
            x0[i] = box(init_rng);

        EpisodeLog ep;
        try {
            ep = run_episode(agent, env, x0, settings, delay_rng, &noise, &noise_rng, episode, RolloutMode::Train);
        } catch (const NumericsError& e) {
            if (callbacks.on_abort)
                callbacks.on_abort(agent, e);
            throw;
        }

        EpisodeSummary s;
        s.episode = episode;
        s.reward_metric = ep.reward_sum_from(config.metric_start);
        s.mean_loss = ep.mean_loss();
        s.noise_scale = schedule.at(episode);
        s.updates = ep.updates;
        s.replay_size = agent.replay().size();
        s.diverged = ep.diverged;
        log.episodes.push_back(s);
        if (callbacks.on_episode)
            callbacks.on_episode(s, agent);
    }
    return log;
}

} // namespace ncsnaf::agent
