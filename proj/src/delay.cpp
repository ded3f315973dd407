#include "ncsnaf/delay.hpp"

#include <algorithm>
#include <cmath>

namespace ncsnaf::delay {

void DelayModel::validate() const {
    if (!(period > 0.0))
        throw ConfigError("delay.period: must be positive");
    if (!(min_sc >= 0.0 && min_sc <= max_sc))
        throw ConfigError("delay.sc_min/sc_max: need 0 <= min <= max");
    if (!(min_cp >= 0.0 && min_cp <= max_cp))
        throw ConfigError("delay.cp_min/cp_max: need 0 <= min <= max");
    if (bound_sc < 0 || bound_cp < 0)
        throw ConfigError("delay.sc_bound/cp_bound: must be non-negative integers");
    // Small slack so bounds given as k*period compare equal.
    const double slack = 1e-12 * period;
    if (max_sc > bound_sc * period + slack)
        throw ConfigError("delay.sc_max: exceeds the known bound sc_bound * period");
    if (max_cp > bound_cp * period + slack)
        throw ConfigError("delay.cp_max: exceeds the known bound cp_bound * period");
    if (distribution == DelayDistribution::UniformMultiplesOfPeriod) {
        if (std::ceil(min_sc / period - 1e-9) > std::floor(max_sc / period + 1e-9))
            throw ConfigError("delay.sc_min/sc_max: range contains no multiple of the period");
        if (std::ceil(min_cp / period - 1e-9) > std::floor(max_cp / period + 1e-9))
            throw ConfigError("delay.cp_min/cp_max: range contains no multiple of the period");
    }
}

DelayModel DelayModel::none(double period) {
    DelayModel m;
    m.period = period;
    m.min_sc = m.max_sc = m.min_cp = m.max_cp = 0.0;
    m.bound_sc = m.bound_cp = 0;
    return m;
}

double sample_delay(const DelayModel& model, Channel which, std::mt19937_64& rng) {
    const bool sc = which == Channel::SensorToController;
    const double lo = sc ? model.min_sc : model.min_cp;
    const double hi = sc ? model.max_sc : model.max_cp;
    if (lo == hi)
        return lo;
    switch (model.distribution) {
    case DelayDistribution::UniformContinuous: {
        std::uniform_real_distribution<double> dist(lo, hi);
        return std::clamp(dist(rng), lo, hi);
    }
    case DelayDistribution::UniformMultiplesOfPeriod: {
        const auto first = static_cast<long long>(std::ceil(lo / model.period - 1e-9));
        const auto last = static_cast<long long>(std::floor(hi / model.period + 1e-9));
        std::uniform_int_distribution<long long> dist(first, last);
        return std::clamp(static_cast<double>(dist(rng)) * model.period, lo, hi);
    }
    }
    return lo;
}

plant::InputSchedule actuate(ActuatorState& act, const std::vector<TimedInput>& arrivals) {
    plant::InputSchedule schedule(act.held);
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        const auto& a = arrivals[i];
        require_dims(a.input.size() == act.held.size(), "actuator input dimension mismatch");
        if (i > 0 && a.time < arrivals[i - 1].time)
            throw OrderError("actuator arrivals must be nondecreasing in time");
        if (i + 1 < arrivals.size() && arrivals[i + 1].time == a.time)
            continue;
        if (!act.applied.empty() && a.time < act.applied.back().time)
            throw OrderError("actuator arrival precedes an already applied input");
        schedule.add_switch(a.time, a.input);
        act.held = a.input;
        act.applied.push_back(a);
    }
    return schedule;
}

} // namespace ncsnaf::delay
