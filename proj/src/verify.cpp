#include "ncsnaf/verify.hpp"

#include "ncsnaf/delay.hpp"
#include "ncsnaf/errors.hpp"
#include "ncsnaf/extended_state.hpp"
#include "ncsnaf/nn.hpp"
#include "ncsnaf/plant.hpp"
#include "ncsnaf/reward.hpp"

#include <Eigen/Cholesky>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace ncsnaf::verify {

namespace {

using naf::Matrix;
using naf::Vector;

struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what) {
    if (!ok)
        throw Failure{what};
}

Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = d(rng);
    return v;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::string naf_algebra(const Hooks& hooks) {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index m = 1 + trial % 3;
        const Vector l = random_vector(nn::triangle_size(m), rng);
        const Vector mu = random_vector(m, rng);
        const Matrix L = naf::assemble_L(l, m);
        for (int s = 0; s < 20; ++s) {
            const Vector u = random_vector(m, rng, 3.0);
            const auto a = hooks.advantage(u, mu, L);
            const Vector d = u - mu;
            const double reference = -0.5 * d.dot((L * L.transpose()) * d);
            expect(a.value <= 0.0, "advantage positive for m=" + std::to_string(m));
            expect(rel_err(a.value, reference) < 1e-10, "advantage disagrees with -1/2 d^T L L^T d");
            expect((a.P - a.P.transpose()).cwiseAbs().maxCoeff() == 0.0, "P not symmetric");
            Eigen::LLT<Matrix> llt(a.P);
            expect(llt.info() == Eigen::Success, "P not positive definite");
            ++checked;
        }
        expect(hooks.advantage(mu, mu, L).value == 0.0, "A(mu) != 0");
    }
    return std::to_string(checked) + " (state, action) pairs";
}

std::string naf_gradient() {
    std::mt19937_64 rng(12);
    const double h = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index m = 1 + trial % 3;
        naf::NafRaw raw{random_vector(1, rng)[0], random_vector(m, rng), random_vector(nn::triangle_size(m), rng, 0.5)};
        const Vector u = random_vector(m, rng, 2.0);
        const auto g = naf::naf_backward(raw, u, 1.0);
        auto q = [&](const naf::NafRaw& r) { return naf::evaluate(r, u).q; };
        for (Eigen::Index i = 0; i < m; ++i) {
            auto p = raw, n = raw;
            p.mu[i] += h;
            n.mu[i] -= h;
            worst = std::max(worst, rel_err(g.d_mu[i], (q(p) - q(n)) / (2 * h)));
        }
        for (Eigen::Index i = 0; i < raw.l_entries.size(); ++i) {
            auto p = raw, n = raw;
            p.l_entries[i] += h;
            n.l_entries[i] -= h;
            worst = std::max(worst, rel_err(g.d_l[i], (q(p) - q(n)) / (2 * h)));
        }
        expect(g.d_value == 1.0, "dQ/dV != 1");
    }
    expect(worst < 1e-4, "naf_backward finite-difference error " + sci(worst));
    return "max relative error " + sci(worst);
}

std::string network_gradient() {
    const auto net0 = nn::init_network({5, 8, 8}, 2, 4.0, 13);
    std::mt19937_64 rng(14);
    // Larger head weights than the default init so every head contributes.
    Vector params = net0.parameters() + random_vector(static_cast<Eigen::Index>(net0.parameter_count()), rng, 0.3);
    nn::MlpNetwork net(net0.layout(), 2, params);
    const Matrix x = Matrix::NullaryExpr(5, 3, [&] { return std::normal_distribution<double>(0, 1)(rng); });
    nn::HeadGrads hg;
    hg.value = Matrix::NullaryExpr(1, 3, [&] { return std::normal_distribution<double>(0, 1)(rng); });
    hg.mu = Matrix::NullaryExpr(2, 3, [&] { return std::normal_distribution<double>(0, 1)(rng); });
    hg.l = Matrix::NullaryExpr(3, 3, [&] { return std::normal_distribution<double>(0, 1)(rng); });

    const auto grads = nn::backward(net, nn::forward(net, x), hg);
    auto scalar = [&](const Vector& p) {
        nn::MlpNetwork probe(net.layout(), 2, p);
        const auto heads = nn::evaluate_heads(probe, x);
        return (hg.value.array() * heads.value.array()).sum() + (hg.mu.array() * heads.mu.array()).sum() +
               (hg.l.array() * heads.l.array()).sum();
    };
    const double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        Vector p = params, n = params;
        p[i] += h;
        n[i] -= h;
        worst = std::max(worst, rel_err(grads.params.values[i], (scalar(p) - scalar(n)) / (2 * h)));
    }
    expect(worst < 1e-4, "backward finite-difference error " + sci(worst));
    return "max relative error " + sci(worst) + " over " + std::to_string(params.size()) + " parameters";
}

std::string channel_ordering() {
    const double period = 0.0625;
    delay::DelayModel model;
    model.period = period;
    model.min_sc = model.min_cp = period;
    model.max_sc = model.max_cp = 3 * period;
    model.bound_sc = model.bound_cp = 4;
    std::mt19937_64 rng(15);
    for (int seq = 0; seq < 2000; ++seq) {
        delay::DelayedChannel<int> sc;
        delay::DelayedChannel<int> cp;
        int expected_sc = 0;
        int expected_cp = 0;
        for (int k = 0; k < 20; ++k) {
            const double t = k * period;
            sc.send(t, k, delay::sample_delay(model, delay::Channel::SensorToController, rng));
            for (const auto& p : sc.poll(t + period)) {
                expect(p.payload == expected_sc++, "sensor channel delivered out of order");
                const double arrival = cp.send(p.arrival_time, p.payload, delay::sample_delay(model, delay::Channel::ControllerToPlant, rng));
                expect(arrival - p.payload * period <= model.tau() * period + 1e-12, "end-to-end delay exceeds bound");
            }
            for (const auto& p : cp.poll(t + period))
                expect(p.payload == expected_cp++, "plant channel delivered out of order");
        }
    }
    return "2000 sequences of 20 packets";
}

std::string rk4_order() {
    plant::LinearPlant decay(Matrix::Constant(1, 1, -1.0), Matrix::Zero(1, 1));
    const plant::InputSchedule hold(Vector::Zero(1));
    std::vector<double> errs;
    for (int e = 4; e <= 8; ++e) {
        const double h = std::ldexp(1.0, -e);
        const Vector x = plant::integrate(decay, Vector::Ones(1), hold, 0.0, 1.0, h);
        errs.push_back(std::abs(x[0] - std::exp(-1.0)));
    }
    // Least-squares slope of log(err) against log(h).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(errs.size());
    for (std::size_t i = 0; i < errs.size(); ++i) {
        const double lx = std::log(std::ldexp(1.0, -static_cast<int>(i) - 4));
        const double ly = std::log(errs[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    expect(std::abs(slope - 4.0) <= 0.2, "RK4 convergence slope " + sci(slope));
    return "log-log slope " + sci(slope);
}

std::string reward_values() {
    const reward::RewardWeights w;
    const double a = reward::r1(Vector{{1.0, 1.0}}, Vector{{0.0, 0.0}}, Vector{{1.0}}, w);
    const std::vector<Vector> outs{Vector{{1.0, 1.0}}, Vector{{0.0, 1.0}}, Vector{{0.0, 0.0}}};
    const double b = reward::r2(outs, 2, w);
    std::vector<Vector> ins(4, Vector::Zero(1));
    ins[0][0] = 2.0;
    const double c = reward::r3(ins, 3, w);
    expect(std::abs(a + 2.6) < 1e-12, "r1 case != -2.6");
    expect(std::abs(b + 1.6) < 1e-12, "r2 case != -1.6");
    expect(std::abs(c + 0.6) < 1e-12, "r3 case != -0.6");
    expect(std::abs(reward::total(a, b, c) + 4.8) < 1e-12, "total != -4.8");
    return "r1=-2.6 r2=-1.6 r3=-0.6 total=-4.8";
}

std::string extended_state_layout() {
    const agent::StateDims dims{2, 1, 8, 4};
    expect(dims.size() == 22, "extended state length " + std::to_string(dims.size()) + " != 22");
    agent::HistoryBuffer hist(dims);
    hist.push_output(Vector{{1.0, 2.0}});
    const auto w0 = hist.build();
    for (Eigen::Index i = 0; i <= dims.tau_o; ++i)
        expect(w0.output(i) == Vector{{1.0, 2.0}}, "output padding is not y0");
    for (Eigen::Index i = 1; i <= dims.input_slots(); ++i)
        expect(w0.input(i)[0] == 0.0, "input padding is not zero");
    hist.push_input(Vector::Constant(1, 0.5));
    hist.push_output(Vector{{3.0, 4.0}});
    const auto w1 = hist.build();
    expect(w1.output(0) == Vector{{3.0, 4.0}} && w1.output(1) == Vector{{1.0, 2.0}}, "output shift broken");
    expect(w1.input(1)[0] == 0.5, "u_{k-1} not in newest input slot");
    return "length 22, padding and shift hold";
}

} // namespace

std::vector<SuiteResult> run_all(const Hooks& hooks) {
    const std::vector<std::pair<std::string, std::function<std::string()>>> suites{
        {"naf_algebra", [&] { return naf_algebra(hooks); }},
        {"naf_gradient", naf_gradient},
        {"network_gradient", network_gradient},
        {"channel_ordering", channel_ordering},
        {"rk4_order", rk4_order},
        {"reward_values", reward_values},
        {"extended_state", extended_state_layout},
    };
    std::vector<SuiteResult> results;
    for (const auto& [name, fn] : suites) {
        SuiteResult r;
        r.name = name;
        const auto start = std::chrono::steady_clock::now();
        try {
            r.detail = fn();
            r.passed = true;
        } catch (const Failure& f) {
            r.detail = f.what;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    }
    return results;
}

bool all_passed(const std::vector<SuiteResult>& results) {
    for (const auto& r : results)
        if (!r.passed)
            return false;
    return true;
}

void write_report(std::ostream& out, const std::vector<SuiteResult>& results) {
    nlohmann::json report;
    report["passed"] = all_passed(results);
    report["suites"] = nlohmann::json::array();
    for (const auto& r : results)
        report["suites"].push_back({{"name", r.name}, {"passed", r.passed}, {"millis", r.millis}, {"detail", r.detail}});
    out << report.dump(2) << "\n";
}

} // namespace ncsnaf::verify
