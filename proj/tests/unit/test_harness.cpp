#include "ncsnaf/checkpoint.hpp"
#include "ncsnaf/config.hpp"
#include "ncsnaf/errors.hpp"
#include "ncsnaf/harness.hpp"
#include "ncsnaf/verify.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ncsnaf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

harness::ExperimentConfig tiny(const fs::path& out) {
    auto c = harness::default_config();
    c.train.hidden = {16};
    c.train.horizon = 1.0;
    c.train.metric_start = 4;
    c.train.learner.batch_size = 8;
    c.train.learner.warmup = 8;
    c.train.learner.replay_capacity = 2000;
    c.train.episodes = 10;
    c.checkpoint_every = 5;
    c.out = out.string();
    return c;
}

} // namespace

TEST_CASE("default config carries the reference hyperparameters") {
    const auto c = harness::default_config();
    CHECK(c.train.sample_period == 0.0625);
    CHECK(c.train.learner.gamma == 0.99);
    CHECK(c.train.learner.beta == 0.001);
    CHECK(c.train.learner.batch_size == 128);
    CHECK(c.train.learner.iterations == 10);
    CHECK(c.train.learner.update_period == 4);
    CHECK(c.train.learner.learning_rate == 1.25e-5);
    CHECK(c.train.learner.replay_capacity == 1000000);
    CHECK(c.train.dims().tau == 8);
    CHECK(c.train.dims().tau_o == 4);
    CHECK(c.train.steps() == 192);
    CHECK(c.train.episodes == 8500);
    CHECK(c.train.init_box == 4.5);
    CHECK(c.train.hidden == std::vector<Eigen::Index>{128, 128, 128, 128});
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("shipped default config parses to the built-in defaults") {
    const auto c = harness::load_config(fs::path(NCSNAF_SOURCE_DIR) / "configs" / "default.ini");
    CHECK(harness::to_ini(c) == harness::to_ini(harness::default_config()));
}

TEST_CASE("config text round-trips") {
    auto c = harness::default_config();
    c.train.learner.learning_rate = 3.3e-4;
    c.train.hidden = {32, 16};
    c.train.delays.max_sc = 2 * 0.0625;
    c.train.reward.output_weights = Eigen::VectorXd::Constant(2, 0.7);
    c.train.delays.distribution = delay::DelayDistribution::UniformMultiplesOfPeriod;
    c.seed = 42;
    c.out = "somewhere";
    const std::string text = harness::to_ini(c);
    CHECK(harness::to_ini(harness::parse_config(text)) == text);
}

TEST_CASE("unknown keys and bad values are all reported") {
    const std::string text = "[train]\nlearning_rat = 1\ngamma = 1.5\n[bogus]\nx = 1\n[network]\nhidden = 8,abc\n";
    try {
        harness::parse_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("train.learning_rat") != std::string::npos);
        CHECK(msg.find("bogus") != std::string::npos);
        CHECK(msg.find("network.hidden") != std::string::npos);
    }
    CHECK_THROWS_AS(harness::parse_config("[train]\ngamma = 1.5\n").validate(), ConfigError);
    auto c = harness::default_config();
    CHECK_THROWS_AS(harness::apply_override(c, "train.nope=1"), ConfigError);
    CHECK_THROWS_AS(harness::apply_override(c, "train.gamma"), ConfigError);
    harness::apply_override(c, "train.gamma=0.5");
    CHECK(c.train.learner.gamma == 0.5);
}

TEST_CASE("tau must match the delay bounds") {
    auto c = harness::parse_config("[state]\ntau = 6\n");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = harness::parse_config("[state]\ntau = 4\n[delay]\nsc_max = 2\ncp_max = 2\nsc_bound = 2\ncp_bound = 2\n");
    CHECK_NOTHROW(c.validate());
    CHECK(c.train.dims().size() == 18);
}

TEST_CASE("output root comes from the environment") {
    auto c = harness::default_config();
    c.seed = 3;
    ::setenv(harness::kOutRootEnv, "/tmp/ncsnaf_root", 1);
    CHECK(c.resolved_out() == fs::path("/tmp/ncsnaf_root/seed_3"));
    ::unsetenv(harness::kOutRootEnv);
    CHECK(c.resolved_out() == fs::path("runs/seed_3"));
}

TEST_CASE("train writes the documented artifacts and reruns byte-identically") {
    TempDir tmp("ncsnaf_harness_train");
    const auto a = harness::cmd_train(tiny(tmp.path / "a"));
    const std::string curve = slurp(a.learning_curve);
    CHECK(line_count(curve) == 11);
    CHECK(curve.rfind(std::string(harness::kLearningCurveHeader) + "\n", 0) == 0);
    CHECK(fs::exists(tmp.path / "a" / "checkpoints" / "episode_000005.ckpt"));
    CHECK(fs::exists(tmp.path / "a" / "checkpoints" / "episode_000010.ckpt"));
    CHECK(fs::exists(tmp.path / "a" / "checkpoints" / "final.ckpt"));

    const auto b = harness::cmd_train(tiny(tmp.path / "b"));
    CHECK(slurp(b.learning_curve) == curve);
    CHECK(slurp(tmp.path / "b" / "checkpoints" / "final.ckpt") == slurp(tmp.path / "a" / "checkpoints" / "final.ckpt"));

    // Re-feeding the snapshot reproduces the run.
    auto again = harness::load_config(a.config);
    again.out = (tmp.path / "c").string();
    const auto c = harness::cmd_train(again);
    CHECK(slurp(c.learning_curve) == curve);
}

TEST_CASE("eval: zero-weight checkpoint follows the uncontrolled plant") {
    TempDir tmp("ncsnaf_harness_eval");
    auto cfg = harness::default_config();
    cfg.train.horizon = 4.0;
    cfg.train.delays = delay::DelayModel::none(0.0625);
    cfg.train.delays.bound_sc = cfg.train.delays.bound_cp = 4;
    auto net = nn::init_network(cfg.train.layer_widths(), 1, 4.0, 1);
    net.set_parameters(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.parameter_count())));
    checkpoint::save(tmp.path / "zero.ckpt", net, nn::AdamState::fresh(net.parameter_count(), 1e-3));

    const Eigen::Vector3d x0(2.0, -1.0, 1.0);
    const auto r = harness::cmd_eval(tmp.path / "zero.ckpt", cfg, x0, 0, tmp.path / "traj.csv");
    const plant::ChuaCircuit chua;
    Eigen::VectorXd x = x0;
    for (std::size_t k = 0; k < r.log.samples.size(); ++k) {
        CHECK((r.log.samples[k].state - x).cwiseAbs().maxCoeff() == 0.0);
        x = plant::integrate(chua, x, plant::InputSchedule(Eigen::VectorXd::Zero(1)), static_cast<double>(k) * 0.0625,
                             static_cast<double>(k + 1) * 0.0625, 0.0625 / 16);
    }
    const std::string traj = slurp(r.trajectory);
    CHECK(traj.rfind("k,t,x1,x2,x3,y1,y2,u_applied,u_command,tau_sc,tau_cp,controller_arrival,plant_arrival\n", 0) == 0);
    CHECK(line_count(traj) == 64 + 2);
    CHECK(traj.find("0,0,2,-1,1,2,-1,0,0,0,0,0,0\n") != std::string::npos);
    const std::string delays = slurp(r.delay_trace);
    CHECK(delays.rfind(std::string(harness::kDelayTraceHeader) + "\n", 0) == 0);
    CHECK(r.delay_trace.filename() == "traj_delays.csv");
}

TEST_CASE("eval rejects a checkpoint that does not fit the config") {
    TempDir tmp("ncsnaf_harness_mismatch");
    auto net = nn::init_network({10, 8}, 1, 4.0, 1);
    checkpoint::save(tmp.path / "small.ckpt", net, nn::AdamState::fresh(net.parameter_count(), 1e-3));
    CHECK_THROWS_AS(harness::cmd_eval(tmp.path / "small.ckpt", harness::default_config(), Eigen::Vector3d(0, 0, 0), 0, {}),
                    DimensionError);
}

TEST_CASE("run config is found beside or above the checkpoint") {
    TempDir tmp("ncsnaf_harness_find");
    fs::create_directories(tmp.path / "checkpoints");
    std::ofstream(tmp.path / "config.ini") << "";
    CHECK(harness::find_run_config(tmp.path / "checkpoints" / "final.ckpt") == tmp.path / "config.ini");
    CHECK(harness::find_run_config(tmp.path / "x" / "y" / "z.ckpt").empty());
}

TEST_CASE("verify: all suites pass and report timing") {
    const auto results = verify::run_all();
    CHECK(verify::all_passed(results));
    CHECK(results.size() >= 4);
    std::ostringstream out;
    verify::write_report(out, results);
    CHECK(out.str().find("\"millis\"") != std::string::npos);
    CHECK(out.str().find("\"naf_algebra\"") != std::string::npos);
}

TEST_CASE("verify: a sign error in the advantage fails the algebra suite") {
    verify::Hooks broken;
    broken.advantage = [](const naf::Vector& u, const naf::Vector& mu, const naf::Matrix& L) {
        auto a = naf::advantage(u, mu, L);
        a.value = -a.value;
        return a;
    };
    const auto results = verify::run_all(broken);
    CHECK_FALSE(verify::all_passed(results));
    for (const auto& r : results)
        CHECK(r.passed == (r.name != "naf_algebra"));
}
