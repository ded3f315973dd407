#include "ncsnaf/errors.hpp"
#include "ncsnaf/naf.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace ncsnaf;
using naf::Matrix;
using naf::Vector;

TEST_CASE("assemble_L examples") {
    CHECK(naf::assemble_L(Vector{{0.0}}, 1) == Matrix::Identity(1, 1));
    CHECK(naf::assemble_L(Vector::Zero(3), 2) == Matrix::Identity(2, 2));
    const Matrix L = naf::assemble_L(Vector{{std::log(2.0), 3.0, std::log(5.0)}}, 2);
    CHECK(L(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(L(0, 1) == 0.0);
    CHECK(L(1, 0) == 3.0);
    CHECK(L(1, 1) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(naf::assemble_L(Vector::Zero(2), 2), DimensionError);
}

TEST_CASE("assemble_L agrees with an entrywise construction and clamps the exponent") {
    std::mt19937_64 rng(1);
    for (Eigen::Index m = 1; m <= 4; ++m) {
        const Vector l = oracle::gaussian(nn::triangle_size(m), rng, 8.0);
        CHECK((naf::assemble_L(l, m) - oracle::naive_L(l, m)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(naf::assemble_L(Vector{{50.0}}, 1)(0, 0) == std::exp(10.0));
    CHECK(naf::assemble_L(Vector{{-50.0}}, 1)(0, 0) == std::exp(-10.0));
}

TEST_CASE("advantage examples") {
    CHECK(naf::advantage(Vector{{0.7}}, Vector{{0.7}}, Matrix::Identity(1, 1)).value == 0.0);
    const auto a1 = naf::advantage(Vector{{2.0}}, Vector{{0.0}}, Matrix::Identity(1, 1));
    CHECK(a1.value == -2.0);
    CHECK(a1.P(0, 0) == 1.0);
    Matrix L(2, 2);
    L << 2, 0, 3, 5;
    const auto a2 = naf::advantage(Vector{{1.0, 0.0}}, Vector::Zero(2), L);
    CHECK(a2.P(0, 0) == 4.0);
    CHECK(a2.value == -2.0);
    CHECK_THROWS_AS(naf::advantage(Vector::Zero(2), Vector::Zero(1), L), DimensionError);
}

TEST_CASE("q_value examples") {
    CHECK(naf::q_value(3.0, 0.0) == 3.0);
    CHECK(naf::q_value(0.0, -2.0) == -2.0);
}

TEST_CASE("advantage properties over random instances") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index m = 1 + trial % 3;
        const Vector l = oracle::gaussian(nn::triangle_size(m), rng);
        const Vector mu = oracle::gaussian(m, rng);
        const Matrix L = naf::assemble_L(l, m);
        const auto at_mu = naf::advantage(mu, mu, L);
        CHECK(at_mu.value == 0.0);
        CHECK((at_mu.P - at_mu.P.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(at_mu.P);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        for (int s = 0; s < 20; ++s) {
            const Vector u = mu + oracle::gaussian(m, rng, 2.0);
            const double a = naf::advantage(u, mu, L).value;
            CHECK(a < 0.0);
            CHECK(oracle::rel_err(a, oracle::naive_advantage(u, mu, L)) < 1e-12);
        }
    }
}

TEST_CASE("Q is maximized at mu (Monte-Carlo)") {
    std::mt19937_64 rng(3);
    for (Eigen::Index m = 1; m <= 3; ++m) {
        naf::NafRaw raw{0.4, oracle::gaussian(m, rng), oracle::gaussian(nn::triangle_size(m), rng, 0.3)};
        const double q_mu = naf::evaluate(raw, raw.mu).q;
        CHECK(q_mu == raw.value);
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10000; ++i)
            best = std::max(best, naf::evaluate(raw, raw.mu + oracle::gaussian(m, rng, 0.5)).q);
        CHECK(best < q_mu);
        CHECK(best > q_mu - 0.05 * static_cast<double>(m));
    }
}

TEST_CASE("naf_backward examples") {
    naf::NafRaw raw{1.5, Vector{{0.3, -0.2}}, Vector{{0.1, 0.4, -0.3}}};
    const auto g0 = naf::naf_backward(raw, raw.mu, 2.0);
    CHECK(g0.d_value == 2.0);
    CHECK(g0.d_mu.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g0.d_l.cwiseAbs().maxCoeff() == 0.0);

    naf::NafRaw one{0.0, Vector{{0.0}}, Vector{{0.0}}};
    const auto g1 = naf::naf_backward(one, Vector{{2.0}}, 1.0);
    CHECK(g1.d_mu[0] == 2.0);
    // dA/dl for the diagonal: A = -1/2 e^{2l} d^2, so -e^{2l} d^2 = -4 at l = 0.
    CHECK(g1.d_l[0] == -4.0);
}

TEST_CASE("naf_backward matches central differences on 100 random instances") {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = 1 + trial % 3;
        const naf::NafRaw raw{oracle::gaussian(1, rng)[0], oracle::gaussian(m, rng),
                              oracle::gaussian(nn::triangle_size(m), rng, 0.5)};
        const Vector u = oracle::gaussian(m, rng, 2.0);
        const double dQ = 0.7;
        const auto g = naf::naf_backward(raw, u, dQ);
        const Vector fd_mu = oracle::central_diff(
            [&](const Vector& mu) {
                auto r = raw;
                r.mu = mu;
                return dQ * naf::evaluate(r, u).q;
            },
            raw.mu, 1e-6);
        const Vector fd_l = oracle::central_diff(
            [&](const Vector& l) {
                auto r = raw;
                r.l_entries = l;
                return dQ * naf::evaluate(r, u).q;
            },
            raw.l_entries, 1e-6);
        worst = std::max({worst, oracle::max_rel_err(g.d_mu, fd_mu), oracle::max_rel_err(g.d_l, fd_l)});
        CHECK(g.d_value == dQ);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("diagonal gradient is zero where the exponent clamp is active") {
    naf::NafRaw raw{0.0, Vector{{0.0}}, Vector{{12.0}}};
    CHECK(naf::naf_backward(raw, Vector{{1e-3}}, 1.0).d_l[0] == 0.0);
}

TEST_CASE("batched NAF agrees with the per-column routines") {
    std::mt19937_64 rng(5);
    const Eigen::Index m = 2, B = 6;
    nn::HeadOutputs h{oracle::gaussian(1, B, rng), oracle::gaussian(m, B, rng), oracle::gaussian(3, B, rng, 0.5)};
    const Matrix u = oracle::gaussian(m, B, rng);
    const Matrix dQ = oracle::gaussian(1, B, rng);
    const Matrix q = naf::batch_q(h, u);
    const auto g = naf::batch_backward(h, u, dQ);
    for (Eigen::Index b = 0; b < B; ++b) {
        const auto raw = naf::column(h, b);
        CHECK(q(0, b) == naf::evaluate(raw, u.col(b)).q);
        const auto gb = naf::naf_backward(raw, u.col(b), dQ(0, b));
        CHECK(g.value(0, b) == gb.d_value);
        CHECK((g.mu.col(b) - gb.d_mu).cwiseAbs().maxCoeff() == 0.0);
        CHECK((g.l.col(b) - gb.d_l).cwiseAbs().maxCoeff() == 0.0);
    }
}
