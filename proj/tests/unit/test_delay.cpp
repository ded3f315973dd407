#include "ncsnaf/delay.hpp"
#include "ncsnaf/errors.hpp"

#include <doctest.h>

using namespace ncsnaf;
using delay::Vector;

namespace {
constexpr double D = 0.0625;

delay::DelayModel model(double lo, double hi) {
    delay::DelayModel m;
    m.period = D;
    m.min_sc = m.min_cp = lo * D;
    m.max_sc = m.max_cp = hi * D;
    return m;
}
} // namespace

TEST_CASE("degenerate interval always samples the single value") {
    std::mt19937_64 rng(1);
    const auto m = model(1, 1);
    for (int i = 0; i < 100; ++i)
        CHECK(delay::sample_delay(m, delay::Channel::SensorToController, rng) == D);
}

TEST_CASE("continuous uniform delays: range and mean") {
    std::mt19937_64 rng(2);
    const auto m = model(1, 3);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double d = delay::sample_delay(m, delay::Channel::ControllerToPlant, rng);
        CHECK(d >= D);
        CHECK(d <= 3 * D);
        sum += d;
    }
    CHECK(std::abs(sum / n - 2 * D) < 0.01 * 2 * D);
}

TEST_CASE("multiples-of-period delays take only grid values") {
    std::mt19937_64 rng(3);
    auto m = model(1, 3);
    m.distribution = delay::DelayDistribution::UniformMultiplesOfPeriod;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 30000; ++i) {
        const double d = delay::sample_delay(m, delay::Channel::SensorToController, rng);
        const double k = d / D;
        REQUIRE(k == std::round(k));
        counts[static_cast<int>(k)]++;
    }
    CHECK(counts[0] == 0);
    for (int k = 1; k <= 3; ++k)
        CHECK(std::abs(counts[k] - 10000) < 500);
}

TEST_CASE("delay model validation") {
    auto m = model(3, 1);
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = model(1, 5); // exceeds the known bound of 4
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = model(1, 3);
    CHECK_NOTHROW(m.validate());
    CHECK(m.tau() == 8);
}

TEST_CASE("send clamps arrivals into send order") {
    delay::DelayedChannel<int> ch;
    CHECK(ch.send(0.0, 0, 3 * D) == 3 * D);
    CHECK(ch.send(D, 1, D) == 3 * D);
    const auto got = ch.poll(3 * D);
    REQUIRE(got.size() == 2);
    CHECK(got[0].payload == 0);
    CHECK(got[1].payload == 1);
}

TEST_CASE("zero delays make an identity channel") {
    delay::DelayedChannel<int> ch;
    for (int k = 0; k < 10; ++k) {
        CHECK(ch.send(k * D, k, 0.0) == k * D);
        const auto got = ch.poll(k * D);
        REQUIRE(got.size() == 1);
        CHECK(got[0].payload == k);
    }
}

TEST_CASE("monotone raw arrivals pass through the clamp unchanged") {
    delay::DelayedChannel<int> ch;
    CHECK(ch.send(0.0, 0, D) == D);
    CHECK(ch.send(D, 1, 1.5 * D) == 2.5 * D);
    CHECK(ch.send(2 * D, 2, 1.5 * D) == 3.5 * D);
}

TEST_CASE("poll boundaries") {
    delay::DelayedChannel<int> ch;
    ch.send(0.0, 0, 2 * D);
    CHECK(ch.poll(D).empty());
    CHECK(ch.poll(2 * D).size() == 1);
    ch.send(2 * D, 1, 0.25 * D);
    ch.send(2.5 * D, 2, 0.1 * D);
    const auto both = ch.poll(3 * D);
    REQUIRE(both.size() == 2);
    CHECK(both[0].payload == 1);
    CHECK(both[1].payload == 2);
    CHECK_THROWS_AS(ch.poll(2 * D), OrderError);
    CHECK_THROWS_AS(ch.send(D, 9, 0.0), OrderError);
    CHECK_THROWS_AS(ch.send(4 * D, 9, -1.0), OrderError);
}

TEST_CASE("random sequences stay ordered and within the end-to-end bound") {
    std::mt19937_64 rng(4);
    const auto m = model(1, 3);
    for (int seq = 0; seq < 1000; ++seq) {
        delay::DelayedChannel<int> sc, cp;
        int next_sc = 0, next_cp = 0;
        for (int k = 0; k < 30; ++k) {
            sc.send(k * D, k, delay::sample_delay(m, delay::Channel::SensorToController, rng));
            for (const auto& p : sc.poll((k + 1) * D)) {
                CHECK(p.payload == next_sc++);
                const double a = cp.send(p.arrival_time, p.payload,
                                         delay::sample_delay(m, delay::Channel::ControllerToPlant, rng));
                CHECK(a - p.payload * D <= m.tau() * D + 1e-12);
            }
            for (const auto& p : cp.poll((k + 1) * D))
                CHECK(p.payload == next_cp++);
        }
    }
}

TEST_CASE("same seed gives the same delay sequence") {
    const auto m = model(1, 3);
    std::mt19937_64 a(5), b(5);
    for (int i = 0; i < 100; ++i)
        CHECK(delay::sample_delay(m, delay::Channel::SensorToController, a) ==
              delay::sample_delay(m, delay::Channel::SensorToController, b));
}

TEST_CASE("actuator: hold, switch, zero start") {
    delay::ActuatorState act(1);
    CHECK(act.held == Vector::Zero(1));
    const auto none = delay::actuate(act, {});
    CHECK(none.switches().empty());
    CHECK(none.initial() == Vector::Zero(1));

    const auto one = delay::actuate(act, {{0.3, Vector::Constant(1, 2.0)}});
    REQUIRE(one.switches().size() == 1);
    CHECK(one.switches()[0].time == 0.3);
    CHECK(one.value_at(0.29)[0] == 0.0);
    CHECK(one.value_at(0.3)[0] == 2.0);
    CHECK(act.held[0] == 2.0);

    // Same-time arrivals collapse to the later packet.
    const auto two = delay::actuate(act, {{0.5, Vector::Constant(1, 1.0)}, {0.5, Vector::Constant(1, -1.0)}});
    REQUIRE(two.switches().size() == 1);
    CHECK(two.initial()[0] == 2.0);
    CHECK(two.value_at(0.5)[0] == -1.0);
    CHECK_THROWS_AS(delay::actuate(act, {{0.4, Vector::Constant(1, 0.0)}}), OrderError);
}
