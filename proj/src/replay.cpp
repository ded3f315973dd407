#include "ncsnaf/replay.hpp"

#include "ncsnaf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncsnaf::agent {

TransitionBatch make_batch(const std::vector<Transition>& transitions) {
    require_dims(!transitions.empty(), "batch must be nonempty");
    const auto& d = transitions.front().w.dims();
    const auto n = static_cast<Index>(transitions.size());
    TransitionBatch b;
    b.states.resize(d.size(), n);
    b.actions.resize(d.m, n);
    b.next_states.resize(d.size(), n);
    b.rewards.resize(n);
    for (Index i = 0; i < n; ++i) {
        const auto& t = transitions[static_cast<std::size_t>(i)];
        require_dims(t.w.dims() == d && t.w_next.dims() == d && t.u.size() == d.m,
                     "batch transitions have inconsistent dimensions");
        b.states.col(i) = t.w.values();
        b.actions.col(i) = t.u;
        b.next_states.col(i) = t.w_next.values();
        b.rewards(i) = t.reward;
    }
    return b;
}

ReplayMemory::ReplayMemory(StateDims dims, std::size_t capacity)
    : dims_(dims), capacity_(capacity),
      row_width_(static_cast<std::size_t>(2 * dims.size() + dims.m + 1)) {
    if (capacity_ == 0)
        throw ConfigError("train.replay_capacity: must be positive");
}

void ReplayMemory::push(const Transition& t) {
    require_dims(t.w.dims() == dims_ && t.w_next.dims() == dims_ && t.u.size() == dims_.m,
                 "transition dimensions do not match replay memory");
    if (!t.w.values().allFinite() || !t.w_next.values().allFinite() || !t.u.allFinite() ||
        !std::isfinite(t.reward))
        throw NumericsError("replay: refusing non-finite transition");

    double* dst = nullptr;
    if (size_ < capacity_) {
        storage_.resize(storage_.size() + row_width_);
        dst = storage_.data() + size_ * row_width_;
        ++size_;
    } else {
        dst = storage_.data() + head_ * row_width_;
        head_ = (head_ + 1) % capacity_;
    }
    const auto ds = static_cast<std::size_t>(dims_.size());
    const auto m = static_cast<std::size_t>(dims_.m);
    std::copy_n(t.w.values().data(), ds, dst);
    std::copy_n(t.u.data(), m, dst + ds);
    std::copy_n(t.w_next.values().data(), ds, dst + ds + m);
    dst[2 * ds + m] = t.reward;
}

const double* ReplayMemory::row(std::size_t i) const {
    if (i >= size_)
        throw DimensionError("replay index " + std::to_string(i) + " out of range");
    const std::size_t slot = size_ < capacity_ ? i : (head_ + i) % capacity_;
    return storage_.data() + slot * row_width_;
}

Transition ReplayMemory::at(std::size_t i) const {
    const double* r = row(i);
    const auto ds = dims_.size();
    const auto m = dims_.m;
    return {ExtendedState(dims_, Eigen::Map<const Vector>(r, ds)), Eigen::Map<const Vector>(r + ds, m),
            ExtendedState(dims_, Eigen::Map<const Vector>(r + ds + m, ds)), r[2 * ds + m]};
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t n, std::mt19937_64& rng) const {
    if (n == 0 || n > size_)
        throw DimensionError("cannot sample " + std::to_string(n) + " of " + std::to_string(size_) + " transitions");
    std::vector<std::size_t> picked;
    picked.reserve(n);
    std::uniform_int_distribution<std::size_t> dist(0, size_ - 1);
    while (picked.size() < n) {
        const std::size_t i = dist(rng);
        if (std::find(picked.begin(), picked.end(), i) == picked.end())
            picked.push_back(i);
    }
    return picked;
}

TransitionBatch ReplayMemory::gather(const std::vector<std::size_t>& indices) const {
    const auto ds = dims_.size();
    const auto m = dims_.m;
    const auto n = static_cast<Index>(indices.size());
    TransitionBatch b;
    b.states.resize(ds, n);
    b.actions.resize(m, n);
    b.next_states.resize(ds, n);
    b.rewards.resize(n);
    for (Index c = 0; c < n; ++c) {
        const double* r = row(indices[static_cast<std::size_t>(c)]);
        b.states.col(c) = Eigen::Map<const Vector>(r, ds);
        b.actions.col(c) = Eigen::Map<const Vector>(r + ds, m);
        b.next_states.col(c) = Eigen::Map<const Vector>(r + ds + m, ds);
        b.rewards(c) = r[2 * ds + m];
    }
    return b;
}

TransitionBatch ReplayMemory::sample(std::size_t n, std::mt19937_64& rng) const {
    return gather(sample_indices(n, rng));
}

} // namespace ncsnaf::agent
