#pragma once

#include "ncsnaf/extended_state.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <random>
#include <vector>

namespace ncsnaf::agent {

struct Transition {
    ExtendedState w;
    Vector u;
    ExtendedState w_next;
    double reward = 0.0;
};

// Column b of each matrix is one transition.
struct TransitionBatch {
    Eigen::MatrixXd states;
    Eigen::MatrixXd actions;
    Eigen::MatrixXd next_states;
    Eigen::RowVectorXd rewards;

    Index size() const { return states.cols(); }
};

TransitionBatch make_batch(const std::vector<Transition>& transitions);

// Bounded FIFO of transitions, oldest evicted first. Rows are stored flat
// (w, u, w', r) in a ring that grows on demand up to capacity.
class ReplayMemory {
public:
    ReplayMemory(StateDims dims, std::size_t capacity);

    void push(const Transition& t);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const StateDims& dims() const { return dims_; }

    // i = 0 is the oldest stored transition.
    Transition at(std::size_t i) const;

    // n distinct indices drawn uniformly (no replacement within the call).
    std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;
    TransitionBatch sample(std::size_t n, std::mt19937_64& rng) const;
    TransitionBatch gather(const std::vector<std::size_t>& indices) const;

private:
    const double* row(std::size_t i) const;

    StateDims dims_;
    std::size_t capacity_;
    std::size_t row_width_;
    std::vector<double> storage_;
    std::size_t head_ = 0; // physical slot of the oldest row once full
    std::size_t size_ = 0;
};

} // namespace ncsnaf::agent
