// Command line front end: train, eval, verify.

#include "ncsnaf/config.hpp"
#include "ncsnaf/errors.hpp"
#include "ncsnaf/harness.hpp"
#include "ncsnaf/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using namespace ncsnaf;

Eigen::VectorXd parse_state(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            values.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0)
            throw ConfigError("--init: cannot parse '" + item + "' as a number");
    }
    if (values.size() != 3)
        throw DimensionError("--init needs three comma-separated values, got " + std::to_string(values.size()));
    return Eigen::Map<Eigen::VectorXd>(values.data(), 3);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Networked-control NAF learner for the Chua circuit"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "run a training experiment");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool wall_clock = false;
    bool quiet = false;
    train->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
    train->add_option("--seed", seed, "run seed");
    train->add_option("--episodes", episodes, "number of episodes");
    train->add_option("--out", out_dir, "run directory");
    train->add_option("--set", overrides, "override, section.key=value (repeatable)");
    train->add_flag("--wall-clock", wall_clock, "record elapsed seconds in the learning curve");
    train->add_flag("--quiet", quiet, "no per-episode progress");

    auto* eval = app.add_subcommand("eval", "noise-free rollout of a checkpointed policy");
    std::string ckpt_path;
    std::string init;
    std::uint64_t delay_seed = 0;
    std::string eval_config;
    std::string traj_out;
    std::optional<double> horizon;
    eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required()->check(CLI::ExistingFile);
    eval->add_option("--init", init, "initial state \"x,y,z\"")->required();
    eval->add_option("--delay-seed", delay_seed, "seed for the delay draws");
    eval->add_option("--config", eval_config, "config (default: the run's config.ini)")->check(CLI::ExistingFile);
    eval->add_option("--out", traj_out, "trajectory CSV (default: trajectory.csv beside the checkpoint)");
    eval->add_option("--horizon", horizon, "episode length in seconds");

    auto* verify = app.add_subcommand("verify", "run the fast self-check suites, print a JSON report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            auto config = harness::load_config(config_path);
            for (const auto& o : overrides)
                harness::apply_override(config, o);
            if (seed)
                config.seed = *seed;
            if (episodes)
                config.train.episodes = *episodes;
            if (!out_dir.empty())
                config.out = out_dir;
            if (wall_clock)
                config.wall_clock = true;
            const auto art = harness::cmd_train(config, quiet ? nullptr : &std::cerr);
            std::cout << art.dir.string() << "\n";
            return 0;
        }
        if (*eval) {
            std::filesystem::path cfg_path = eval_config;
            if (cfg_path.empty())
                cfg_path = harness::find_run_config(ckpt_path);
            auto config = cfg_path.empty() ? harness::default_config() : harness::load_config(cfg_path);
            if (horizon)
                config.train.horizon = *horizon;
            std::filesystem::path out = traj_out;
            if (out.empty())
                out = std::filesystem::path(ckpt_path).parent_path() / "trajectory.csv";
            const auto result = harness::cmd_eval(ckpt_path, config, parse_state(init), delay_seed, out);
            std::cout << result.trajectory.string() << "\n" << result.delay_trace.string() << "\n";
            if (result.log.diverged)
                std::cerr << "rollout diverged at t=" << result.log.divergence_time << "\n";
            return 0;
        }
        if (*verify) {
            const auto results = verify::run_all();
            verify::write_report(std::cout, results);
            return verify::all_passed(results) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
