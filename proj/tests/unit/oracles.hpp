#pragma once

// Reference computations written independently of the library code paths.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

inline Eigen::VectorXd gaussian(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> d(0.0, sd);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = d(rng);
    return v;
}

inline Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> d(0.0, sd);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
            m(i, j) = d(rng);
    return m;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Central differences of f at x.
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                    double h) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd p = x, n = x;
        p[i] += h;
        n[i] -= h;
        g[i] = (f(p) - f(n)) / (2.0 * h);
    }
    return g;
}

inline double max_rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        worst = std::max(worst, rel_err(a[i], b[i]));
    return worst;
}

// Lower-triangular L from row-major entries with exp on the diagonal,
// built entry by entry.
inline Eigen::MatrixXd naive_L(const Eigen::VectorXd& l, Eigen::Index m) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = l[idx++];
            L(i, j) = i == j ? std::exp(std::min(10.0, std::max(-10.0, v))) : v;
        }
    return L;
}

// -1/2 d^T P d with P expanded as a double sum.
inline double naive_advantage(const Eigen::VectorXd& u, const Eigen::VectorXd& mu, const Eigen::MatrixXd& L) {
    const Eigen::Index m = u.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            double pij = 0.0;
            for (Eigen::Index k = 0; k < m; ++k)
                pij += L(i, k) * L(j, k);
            acc += (u[i] - mu[i]) * pij * (u[j] - mu[j]);
        }
    return -0.5 * acc;
}

// Classical RK4 step, written out.
template <class F>
Eigen::VectorXd rk4(const F& f, const Eigen::VectorXd& x, double h) {
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(x + h * k3);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace oracle
