#pragma once

// Composite stabilization reward built only from measured outputs and
// applied inputs; it never references the (unknown) equilibrium.
//
//   r1 = -(y' - y)^T W (y' - y) - c_u |u|^2
//   r2 = -sum_{i=1..tau_o} (y_{k+1-i} - y_{k-i})^T W (y_{k+1-i} - y_{k-i})
//   r3 = -c_s sum_{i=1..tau+tau_o} |u_{k+1-i} - u_{k-i}|^2
//
// Histories are passed newest first.

#include <Eigen/Core>

#include <span>

namespace ncsnaf::reward {

using Vector = Eigen::VectorXd;

struct RewardWeights {
    Vector output_weights = Vector::Constant(2, 0.8); // diagonal of W
    double effort = 1.0;
    double smoothness = 0.15;

    void validate() const;
};

double r1(const Vector& y_next, const Vector& y, const Vector& u, const RewardWeights& w);

// outputs = [y_k, y_{k-1}, ..., y_{k-tau_o}], exactly tau_o + 1 entries.
double r2(std::span<const Vector> outputs, std::size_t tau_o, const RewardWeights& w);

// inputs = [u_k, u_{k-1}, ..., u_{k-horizon}], exactly horizon + 1 entries,
// horizon = tau + tau_o.
double r3(std::span<const Vector> inputs, std::size_t horizon, const RewardWeights& w);

inline double total(double r1, double r2, double r3) { return r1 + r2 + r3; }

} // namespace ncsnaf::reward
