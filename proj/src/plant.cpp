#include "ncsnaf/plant.hpp"

#include "ncsnaf/errors.hpp"

#include <cmath>
#include <string>

namespace ncsnaf::plant {

Vector chua_deriv(const Vector& x, double u, const ChuaParams& params) {
    require_dims(x.size() == 3, "Chua state must have 3 components");
    Vector dx(3);
    dx << params.p1 * (x[1] - chua_nonlinearity(x[0])), x[0] - x[1] + x[2] + u, -params.p2 * x[1];
    return dx;
}

ChuaCircuit::ChuaCircuit(ChuaParams params) : params_(params) {
    if (!(params_.p1 > 0.0) || !(params_.p2 > 0.0))
        throw DimensionError("Chua parameters must be positive");
}

void ChuaCircuit::derivative(const Vector& x, const Vector& u, Vector& dx) const {
    dx[0] = params_.p1 * (x[1] - chua_nonlinearity(x[0]));
    dx[1] = x[0] - x[1] + x[2] + u[0];
    dx[2] = -params_.p2 * x[1];
}

std::vector<Vector> ChuaCircuit::equilibria() {
    const double a = 1.0 / std::sqrt(2.0);
    return {Vector::Zero(3), Vector{{a, 0.0, -a}}, Vector{{-a, 0.0, a}}};
}

LinearPlant::LinearPlant(Matrix A, Matrix B) : a_(std::move(A)), b_(std::move(B)) {
    require_dims(a_.rows() == a_.cols(), "A must be square");
    require_dims(b_.rows() == a_.rows(), "B row count must equal state dimension");
}

void LinearPlant::derivative(const Vector& x, const Vector& u, Vector& dx) const {
    dx.noalias() = a_ * x;
    dx.noalias() += b_ * u;
}

void InputSchedule::add_switch(double time, Vector input) {
    require_dims(input.size() == initial_.size(), "schedule input dimension mismatch");
    if (!switches_.empty() && !(time > switches_.back().time))
        throw OrderError("schedule switch times must be strictly increasing");
    switches_.push_back({time, std::move(input)});
}

const Vector& InputSchedule::value_at(double t) const {
    const Vector* current = &initial_;
    for (const auto& s : switches_) {
        if (s.time > t)
            break;
        current = &s.input;
    }
    return *current;
}

namespace {

struct Rk4 {
    const PlantModel& model;
    Vector k1, k2, k3, k4, tmp;

    explicit Rk4(const PlantModel& m)
        : model(m), k1(m.state_dim()), k2(m.state_dim()), k3(m.state_dim()), k4(m.state_dim()),
          tmp(m.state_dim()) {}

    void step(Vector& x, const Vector& u, double h) {
        model.derivative(x, u, k1);
        tmp = x + 0.5 * h * k1;
        model.derivative(tmp, u, k2);
        tmp = x + 0.5 * h * k2;
        model.derivative(tmp, u, k3);
        tmp = x + h * k3;
        model.derivative(tmp, u, k4);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

void check_state(const Vector& x, double t, double threshold) {
    if (!x.allFinite())
        throw DivergenceError("plant state became non-finite at t=" + std::to_string(t), t);
    if (x.cwiseAbs().maxCoeff() > threshold)
        throw DivergenceError("plant state exceeded divergence threshold at t=" + std::to_string(t), t);
}

void integrate_segment(Rk4& rk, Vector& x, const Vector& u, double a, double b, double substep,
                       double threshold) {
    const double length = b - a;
    if (!(length > 0.0))
        return;
    // Number of steps: full substeps plus one closing step unless the
    // segment is (up to rounding) an exact multiple of the substep.
    auto full = static_cast<long long>(std::floor(length / substep));
    double rest = length - static_cast<double>(full) * substep;
    if (rest <= 1e-12 * substep) {
        rest = 0.0;
    }
    for (long long i = 0; i < full; ++i) {
        rk.step(x, u, substep);
        check_state(x, a + static_cast<double>(i + 1) * substep, threshold);
    }
    if (rest > 0.0) {
        rk.step(x, u, rest);
        check_state(x, b, threshold);
    }
}

} // namespace

Vector integrate(const PlantModel& model, const Vector& x0, const InputSchedule& schedule, double t0, double t1,
                 double substep, double divergence_threshold) {
    require_dims(x0.size() == model.state_dim(), "initial state dimension does not match plant");
    require_dims(schedule.initial().size() == model.input_dim(), "schedule input dimension does not match plant");
    if (!(t1 >= t0))
        throw DimensionError("integrate requires t1 >= t0");
    if (!(substep > 0.0))
        throw DimensionError("integrator substep must be positive");

    Vector x = x0;
    Rk4 rk(model);
    double start = t0;
    const Vector* input = &schedule.value_at(t0);
    for (const auto& s : schedule.switches()) {
        if (s.time <= t0)
            continue;
        if (s.time >= t1)
            break;
        integrate_segment(rk, x, *input, start, s.time, substep, divergence_threshold);
        start = s.time;
        input = &s.input;
    }
    integrate_segment(rk, x, *input, start, t1, substep, divergence_threshold);
    return x;
}

SensorMap SensorMap::chua_xy(double sample_period) {
    SensorMap map;
    map.C = Matrix::Zero(2, 3);
    map.C(0, 0) = 1.0;
    map.C(1, 1) = 1.0;
    map.sample_period = sample_period;
    return map;
}

Vector sense(const Vector& x, const SensorMap& map) {
    require_dims(x.size() == map.C.cols(), "state dimension does not match sensor map");
    return map.C * x;
}

} // namespace ncsnaf::plant
