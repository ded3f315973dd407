#include "ncsnaf/episode.hpp"

#include "ncsnaf/errors.hpp"

#include <cmath>
#include <optional>

namespace ncsnaf::agent {

double EpisodeLog::reward_sum_from(std::size_t start) const {
    double sum = 0.0;
    for (std::size_t k = start; k < rewards.size(); ++k)
        sum += rewards[k];
    return sum + divergence_penalty;
}

EpisodeLog run_episode(NafAgent& agent, const EpisodeEnvironment& env, const Vector& x0,
                       const EpisodeSettings& settings, std::mt19937_64& delay_rng, OuProcess* noise,
                       std::mt19937_64* noise_rng, int episode, RolloutMode mode) {
    const StateDims& dims = env.dims;
    const double period = env.sensor.sample_period;
    require_dims(env.sensor.C.rows() == dims.p, "sensor output dimension does not match extended state");
    require_dims(env.sensor.C.cols() == env.plant.state_dim(), "sensor map does not match plant state");
    require_dims(env.plant.input_dim() == dims.m, "plant input dimension does not match extended state");
    require_dims(x0.size() == env.plant.state_dim(), "initial state dimension does not match plant");
    require_dims(agent.main().input_dim() == dims.size(), "network input width does not match extended state");
    if (!(period > 0.0) || std::abs(env.delays.period - period) > 1e-12 * period)
        throw ConfigError("delay model period must equal the sensor sampling period");
    if (settings.steps == 0)
        throw ConfigError("episode needs at least one step");

    const bool training = mode == RolloutMode::Train;
    if (training && noise != nullptr) {
        require_dims(noise_rng != nullptr, "training noise needs a random stream");
        noise->reset();
    }

    const std::size_t steps = settings.steps;
    const std::size_t update_period = agent.config().update_period;

    EpisodeLog log;
    log.samples.reserve(steps + 1);
    log.rewards.reserve(steps);

    HistoryBuffer history(dims);
    delay::DelayedChannel<std::size_t> to_controller;
    delay::DelayedChannel<std::size_t> to_plant;
    delay::ActuatorState actuator(dims.m);
    std::optional<ExtendedState> prev_w;
    Vector prev_u;

    auto on_controller_receive = [&](const delay::DelayedChannel<std::size_t>::Packet& pkt) {
        const std::size_t k = pkt.payload;
        SampleRecord& rec = log.samples[k];
        rec.controller_arrival = pkt.arrival_time;
        history.push_output(rec.output);
        ExtendedState w = history.build();

        if (prev_w) {
            const double r = transition_reward(*prev_w, prev_u, w, settings.reward);
            log.rewards.push_back(r);
            if (training) {
                Transition t{*prev_w, prev_u, w, r};
                agent.remember(t);
                log.transitions.push_back(std::move(t));
            }
        }
        if (k == steps)
            return;

        Vector u = agent.policy(w);
        if (training && noise != nullptr)
            u += noise->step(period, episode, *noise_rng);
        history.push_input(u);
        rec.action = u;
        rec.tau_cp = delay::sample_delay(env.delays, delay::Channel::ControllerToPlant, delay_rng);
        rec.plant_arrival = to_plant.send(pkt.arrival_time, k, rec.tau_cp);
        prev_w = std::move(w);
        prev_u = std::move(u);

        if (training && k % update_period == 0) {
            const auto stats = agent.update_round();
            log.updates += stats.updates;
            log.loss_sum += stats.loss_sum;
        }
    };

    Vector x = x0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * period;
        SampleRecord rec;
        rec.k = k;
        rec.time = t;
        rec.state = x;
        rec.output = plant::sense(x, env.sensor);
        rec.applied_input = actuator.held;
        rec.tau_sc = delay::sample_delay(env.delays, delay::Channel::SensorToController, delay_rng);
        log.samples.push_back(rec);
        to_controller.send(t, k, rec.tau_sc);
        if (k == steps)
            break;

        const double t_next = static_cast<double>(k + 1) * period;
        for (const auto& pkt : to_controller.poll(t_next))
            on_controller_receive(pkt);

        std::vector<delay::TimedInput> arrivals;
        for (const auto& pkt : to_plant.poll(t_next))
            arrivals.push_back({pkt.arrival_time, log.samples[pkt.payload].action});
        const plant::InputSchedule schedule = delay::actuate(actuator, arrivals);
        log.samples[k].applied_input = schedule.value_at(t);

        try {
            x = plant::integrate(env.plant, x, schedule, t, t_next, settings.substep,
                                 settings.divergence_threshold);
        } catch (const DivergenceError& e) {
            log.diverged = true;
            log.divergence_time = e.time();
            log.divergence_penalty = settings.divergence_penalty;
            return log;
        }
    }

    // Sensor packets still in flight at the horizon: the controller acts on
    // them, but their inputs can no longer reach the plant inside the episode.
    for (const auto& pkt : to_controller.poll(std::numeric_limits<double>::infinity()))
        on_controller_receive(pkt);
    return log;
}

} // namespace ncsnaf::agent
