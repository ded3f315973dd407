#pragma once

#include <Eigen/Core>

#include <random>

namespace ncsnaf::agent {

// Exploration multiplier per episode (1-based): `scale` through
// `hold_episodes`, then linear decay reaching `final_scale` at
// `total_episodes`.
struct NoiseSchedule {
    double scale = 3.5;
    int hold_episodes = 1000;
    double final_scale = 0.05;
    int total_episodes = 8500;

    double at(int episode) const;
};

// Ornstein-Uhlenbeck process dx = -theta x dt + sigma dW, stepped with
// Euler-Maruyama. Reset to zero at the start of every episode.
class OuProcess {
public:
    OuProcess(Eigen::Index dim, double theta, double sigma, NoiseSchedule schedule = {});

    void reset();
    void set_state(const Eigen::VectorXd& x);

    // Advances the state by dt and returns schedule.at(episode) * state.
    Eigen::VectorXd step(double dt, int episode, std::mt19937_64& rng);

    const Eigen::VectorXd& state() const { return state_; }
    const NoiseSchedule& schedule() const { return schedule_; }
    double theta() const { return theta_; }
    double sigma() const { return sigma_; }

private:
    double theta_;
    double sigma_;
    NoiseSchedule schedule_;
    Eigen::VectorXd state_;
};

Eigen::VectorXd ou_step(OuProcess& proc, double dt, int episode, std::mt19937_64& rng);

} // namespace ncsnaf::agent
