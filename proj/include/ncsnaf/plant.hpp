#pragma once

#include <Eigen/Core>

#include <vector>

namespace ncsnaf::plant {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Continuous-time plant dx/dt = f(x, u). Only the simulator evaluates f.
class PlantModel {
public:
    virtual ~PlantModel() = default;
    virtual int state_dim() const = 0;
    virtual int input_dim() const = 0;
    virtual void derivative(const Vector& x, const Vector& u, Vector& dx) const = 0;
};

struct ChuaParams {
    double p1 = 10.0;
    double p2 = 100.0 / 7.0;
};

// phi(x) = (2x^3 - x) / 7
inline double chua_nonlinearity(double x) { return (2.0 * x * x * x - x) / 7.0; }

// [p1 (y - phi(x)), x - y + z + u, -p2 y]
Vector chua_deriv(const Vector& x, double u, const ChuaParams& params = {});

class ChuaCircuit final : public PlantModel {
public:
    explicit ChuaCircuit(ChuaParams params = {});

    int state_dim() const override { return 3; }
    int input_dim() const override { return 1; }
    void derivative(const Vector& x, const Vector& u, Vector& dx) const override;

    const ChuaParams& params() const { return params_; }

    // The origin and (+-1/sqrt(2), 0, -+1/sqrt(2)).
    static std::vector<Vector> equilibria();

private:
    ChuaParams params_;
};

// dx/dt = A x + B u
class LinearPlant final : public PlantModel {
public:
    LinearPlant(Matrix A, Matrix B);

    int state_dim() const override { return static_cast<int>(a_.rows()); }
    int input_dim() const override { return static_cast<int>(b_.cols()); }
    void derivative(const Vector& x, const Vector& u, Vector& dx) const override;

private:
    Matrix a_;
    Matrix b_;
};

// Piecewise-constant input: `initial` until the first switch, then each
// switch's input from its time (inclusive) until the next switch.
class InputSchedule {
public:
    struct Switch {
        double time;
        Vector input;
    };

    explicit InputSchedule(Vector initial) : initial_(std::move(initial)) {}

    // Switch times must be strictly increasing.
    void add_switch(double time, Vector input);

    const Vector& value_at(double t) const;
    const Vector& initial() const { return initial_; }
    const std::vector<Switch>& switches() const { return switches_; }

private:
    Vector initial_;
    std::vector<Switch> switches_;
};

inline constexpr double kDefaultDivergenceThreshold = 1e6;

// Fixed-step classical RK4 on [t0, t1]. The interval is split at every
// switch time so no step straddles an input change; each segment is walked
// from its own start with full substeps and one shorter closing step.
// Throws DivergenceError when the state turns non-finite or its max-norm
// exceeds divergence_threshold.
Vector integrate(const PlantModel& model, const Vector& x0, const InputSchedule& schedule, double t0, double t1,
                 double substep, double divergence_threshold = kDefaultDivergenceThreshold);

// y = C x, sampled every `sample_period` seconds.
struct SensorMap {
    Matrix C;
    double sample_period = 0.0625;

    // Observes the first two Chua states.
    static SensorMap chua_xy(double sample_period = 0.0625);
};

Vector sense(const Vector& x, const SensorMap& map);

} // namespace ncsnaf::plant
