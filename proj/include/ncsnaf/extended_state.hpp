#pragma once

// Extended state fed to the controller network:
//
//   w_k = [y_k, y_{k-1}, ..., y_{k-tau_o}, u_{k-1}, u_{k-2}, ..., u_{k-(tau+tau_o)}]
//
// tau is the worst-case round-trip delay in sampling periods and tau_o the
// length of the output history. Before the episode starts inputs read as
// zero and outputs read as the first observation y_0.

#include "ncsnaf/reward.hpp"

#include <Eigen/Core>

#include <deque>

namespace ncsnaf::agent {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct StateDims {
    Index p = 2;     // output dimension
    Index m = 1;     // input dimension
    Index tau = 8;   // max total delay in periods
    Index tau_o = 4; // output history length

    Index output_slots() const { return tau_o + 1; }
    Index input_slots() const { return tau + tau_o; }
    Index size() const { return p * output_slots() + m * input_slots(); }
    void validate() const;

    bool operator==(const StateDims&) const = default;
};

class ExtendedState {
public:
    ExtendedState(StateDims dims, Vector values);

    const StateDims& dims() const { return dims_; }
    const Vector& values() const { return values_; }

    // output(0) is y_k, output(tau_o) is y_{k-tau_o}.
    Eigen::VectorBlock<const Vector> output(Index age) const;
    // input(1) is u_{k-1}, input(tau + tau_o) the oldest.
    Eigen::VectorBlock<const Vector> input(Index age) const;

private:
    StateDims dims_;
    Vector values_;
};

class HistoryBuffer {
public:
    explicit HistoryBuffer(StateDims dims);

    // The first output pushed also fills every older output slot.
    void push_output(const Vector& y);
    void push_input(const Vector& u);

    bool has_output() const { return !outputs_.empty(); }
    // Index k of the newest output (-1 before any output).
    Index step() const { return outputs_pushed_ - 1; }
    const StateDims& dims() const { return dims_; }

    ExtendedState build() const;

private:
    StateDims dims_;
    std::deque<Vector> outputs_; // newest first
    std::deque<Vector> inputs_;  // newest first, u_{k-1} at front
    Index outputs_pushed_ = 0;
};

ExtendedState build_extended_state(const HistoryBuffer& history);

// R(w, u, w'): r1 from the newest output pair and u, r2 from the output
// block of w, r3 from u followed by the input block of w.
double transition_reward(const ExtendedState& w, const Vector& u, const ExtendedState& w_next,
                         const reward::RewardWeights& weights);

} // namespace ncsnaf::agent
