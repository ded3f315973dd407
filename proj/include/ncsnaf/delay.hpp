#pragma once

// Network delay channels between sensor, controller and actuator.
//
// Both channels have bounded random delays. Delivery is in send order: a
// packet never arrives before the one sent ahead of it, which is realized by
// clamping each arrival to the previous one.

#include "ncsnaf/errors.hpp"
#include "ncsnaf/plant.hpp"

#include <deque>
#include <random>
#include <vector>

namespace ncsnaf::delay {

using Vector = Eigen::VectorXd;

enum class DelayDistribution { UniformContinuous, UniformMultiplesOfPeriod };

enum class Channel { SensorToController, ControllerToPlant };

// Delay ranges in seconds. bound_sc / bound_cp are the maxima known to the
// controller designer, in sampling periods (a and b with tau = a + b).
struct DelayModel {
    double period = 0.0625;
    double min_sc = 0.0625;
    double max_sc = 0.1875;
    double min_cp = 0.0625;
    double max_cp = 0.1875;
    int bound_sc = 4;
    int bound_cp = 4;
    DelayDistribution distribution = DelayDistribution::UniformContinuous;

    int tau() const { return bound_sc + bound_cp; }

    // Throws ConfigError naming the offending field.
    void validate() const;

    static DelayModel none(double period);
};

double sample_delay(const DelayModel& model, Channel which, std::mt19937_64& rng);

template <class Payload>
class DelayedChannel {
public:
    struct Packet {
        double send_time;
        double arrival_time;
        Payload payload;
    };

    // Enqueues with arrival = max(t_send + delay, last arrival) and returns
    // that arrival time.
    double send(double t_send, Payload payload, double delay) {
        if (!(delay >= 0.0))
            throw OrderError("channel delay must be non-negative");
        if (has_sent_ && t_send < last_send_)
            throw OrderError("channel send times must be nondecreasing");
        double arrival = t_send + delay;
        if (has_sent_ && arrival < last_arrival_)
            arrival = last_arrival_;
        queue_.push_back({t_send, arrival, std::move(payload)});
        last_send_ = t_send;
        last_arrival_ = arrival;
        has_sent_ = true;
        return arrival;
    }

    // Removes and returns every packet with arrival <= t, in send order.
    std::vector<Packet> poll(double t) {
        if (has_polled_ && t < last_poll_)
            throw OrderError("channel poll times must be nondecreasing");
        has_polled_ = true;
        last_poll_ = t;
        std::vector<Packet> out;
        while (!queue_.empty() && queue_.front().arrival_time <= t) {
            out.push_back(std::move(queue_.front()));
            queue_.pop_front();
        }
        return out;
    }

    std::size_t pending() const { return queue_.size(); }
    double last_arrival() const { return last_arrival_; }
    const std::deque<Packet>& queue() const { return queue_; }

private:
    std::deque<Packet> queue_;
    double last_send_ = 0.0;
    double last_arrival_ = 0.0;
    double last_poll_ = 0.0;
    bool has_sent_ = false;
    bool has_polled_ = false;
};

struct TimedInput {
    double time;
    Vector input;
};

// Zero-order hold at the plant: the held input changes only when a control
// packet arrives.
struct ActuatorState {
    Vector held;
    std::vector<TimedInput> applied;

    explicit ActuatorState(Eigen::Index input_dim) : held(Vector::Zero(input_dim)) {}
};

// Applies arrivals (nondecreasing times) and returns the schedule fragment
// starting from the previously held input. Arrivals sharing a time collapse
// to the last one, which is the latest in send order.
plant::InputSchedule actuate(ActuatorState& act, const std::vector<TimedInput>& arrivals);

} // namespace ncsnaf::delay
