#include "ncsnaf/ou_noise.hpp"

#include "ncsnaf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ncsnaf::agent {

double NoiseSchedule::at(int episode) const {
    if (episode <= hold_episodes || total_episodes <= hold_episodes)
        return scale;
    const int e = std::min(episode, total_episodes);
    const double frac = static_cast<double>(e - hold_episodes) / static_cast<double>(total_episodes - hold_episodes);
    return scale + (final_scale - scale) * frac;
}

OuProcess::OuProcess(Eigen::Index dim, double theta, double sigma, NoiseSchedule schedule)
    : theta_(theta), sigma_(sigma), schedule_(schedule), state_(Eigen::VectorXd::Zero(dim)) {
    if (!(theta_ >= 0.0) || !(sigma_ >= 0.0))
        throw ConfigError("noise.theta/sigma: must be non-negative");
}

void OuProcess::reset() { state_.setZero(); }

void OuProcess::set_state(const Eigen::VectorXd& x) {
    if (x.size() != state_.size())
        throw DimensionError("OU state dimension mismatch");
    state_ = x;
}

Eigen::VectorXd OuProcess::step(double dt, int episode, std::mt19937_64& rng) {
    if (!(dt > 0.0))
        throw DimensionError("OU step requires dt > 0");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double diffusion = sigma_ * std::sqrt(dt);
    for (Eigen::Index i = 0; i < state_.size(); ++i)
        state_[i] += -theta_ * state_[i] * dt + diffusion * normal(rng);
    return schedule_.at(episode) * state_;
}

Eigen::VectorXd ou_step(OuProcess& proc, double dt, int episode, std::mt19937_64& rng) {
    return proc.step(dt, episode, rng);
}

} // namespace ncsnaf::agent
