#include "ncsnaf/harness.hpp"

#include "ncsnaf/checkpoint.hpp"
#include "ncsnaf/errors.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace ncsnaf::harness {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    if (std::isnan(v))
        return "nan";
    // Shortest text that parses back to the same double.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::string checkpoint_name(int episode) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "episode_%06d.ckpt", episode);
    return buf;
}

} // namespace

RunArtifacts cmd_train(const ExperimentConfig& config, std::ostream* progress) {
    config.validate();
    RunArtifacts art;
    art.dir = config.resolved_out();
    fs::create_directories(art.dir / "checkpoints");

    art.config = art.dir / "config.ini";
    {
        auto out = open_out(art.config);
        out << to_ini(config);
    }

    art.learning_curve = art.dir / "learning_curve.csv";
    auto curve = open_out(art.learning_curve);
    curve << kLearningCurveHeader << "\n";

    const auto started = std::chrono::steady_clock::now();
    agent::TrainCallbacks callbacks;
    callbacks.on_episode = [&](const agent::EpisodeSummary& s, const agent::NafAgent& a) {
        const double elapsed =
            config.wall_clock ? std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() : 0.0;
        curve << s.episode << "," << num(s.reward_metric) << "," << num(s.mean_loss) << "," << num(s.noise_scale)
              << "," << num(elapsed) << "\n";
        curve.flush();
        if (config.checkpoint_every > 0 && s.episode % config.checkpoint_every == 0) {
            const fs::path p = art.dir / "checkpoints" / checkpoint_name(s.episode);
            checkpoint::save(p, a.main(), a.adam());
            art.checkpoints.push_back(p);
        }
        if (s.episode == config.train.episodes) {
            const fs::path p = art.dir / "checkpoints" / "final.ckpt";
            checkpoint::save(p, a.main(), a.adam());
            art.checkpoints.push_back(p);
        }
        if (progress != nullptr) {
            *progress << "episode " << s.episode << " reward " << num(s.reward_metric) << " loss "
                      << num(s.mean_loss) << " noise " << num(s.noise_scale) << (s.diverged ? " diverged" : "")
                      << "\n";
        }
    };
    callbacks.on_abort = [&](const agent::NafAgent& a, const Error& e) {
        const fs::path p = art.dir / "checkpoints" / "last_good.ckpt";
        checkpoint::save(p, a.main(), a.adam());
        if (progress != nullptr)
            *progress << "aborting: " << e.what() << "; saved " << p.string() << "\n";
    };

    art.log = agent::train(config.train, config.seed, callbacks);
    return art;
}

void write_trajectory_csv(std::ostream& out, const agent::EpisodeLog& log) {
    out << "k,t,x1,x2,x3,y1,y2,u_applied,u_command,tau_sc,tau_cp,controller_arrival,plant_arrival\n";
    for (const auto& s : log.samples) {
        out << s.k << "," << num(s.time);
        for (Eigen::Index i = 0; i < s.state.size(); ++i)
            out << "," << num(s.state[i]);
        for (Eigen::Index i = 0; i < s.output.size(); ++i)
            out << "," << num(s.output[i]);
        out << "," << num(s.applied_input.size() > 0 ? s.applied_input[0] : std::nan(""));
        out << "," << num(s.action.size() > 0 ? s.action[0] : std::nan(""));
        out << "," << num(s.tau_sc) << "," << num(s.tau_cp) << "," << num(s.controller_arrival) << ","
            << num(s.plant_arrival) << "\n";
    }
}

void write_delay_trace_csv(std::ostream& out, const agent::EpisodeLog& log) {
    out << kDelayTraceHeader << "\n";
    for (const auto& s : log.samples)
        out << s.k << "," << num(s.tau_sc) << "," << num(s.tau_cp) << "," << num(s.controller_arrival) << ","
            << num(s.plant_arrival) << "\n";
}

fs::path find_run_config(const fs::path& checkpoint_path) {
    const fs::path dir = checkpoint_path.parent_path();
    for (const fs::path& candidate : {dir / "config.ini", dir.parent_path() / "config.ini"})
        if (fs::exists(candidate))
            return candidate;
    return {};
}

EvalResult cmd_eval(const fs::path& checkpoint_path, const ExperimentConfig& config, const Eigen::VectorXd& x0,
                    std::uint64_t delay_seed, const fs::path& trajectory_out) {
    config.validate();
    require_dims(x0.size() == 3, "initial state must have 3 components");
    auto ckpt = checkpoint::load(checkpoint_path);
    const agent::StateDims dims = config.train.dims();
    if (ckpt.network.input_dim() != dims.size() || ckpt.network.action_dim() != dims.m)
        throw DimensionError("checkpoint network expects input width " + std::to_string(ckpt.network.input_dim()) +
                             " and action dimension " + std::to_string(ckpt.network.action_dim()) +
                             ", config gives extended state length " + std::to_string(dims.size()) +
                             " and action dimension " + std::to_string(dims.m));

    agent::NafAgent agent(std::move(ckpt.network), std::move(ckpt.adam), dims, config.train.learner, 0);
    plant::ChuaCircuit chua(config.train.chua);
    const auto sensor = plant::SensorMap::chua_xy(config.train.sample_period);
    const agent::EpisodeEnvironment env{chua, sensor, config.train.delays, dims};
    std::mt19937_64 delay_rng(delay_seed);

    EvalResult result;
    result.log = agent::run_episode(agent, env, x0, config.train.episode_settings(), delay_rng, nullptr, nullptr, 0,
                                    agent::RolloutMode::Eval);

    if (!trajectory_out.empty()) {
        if (trajectory_out.has_parent_path())
            fs::create_directories(trajectory_out.parent_path());
        result.trajectory = trajectory_out;
        {
            auto out = open_out(result.trajectory);
            write_trajectory_csv(out, result.log);
        }
        result.delay_trace = trajectory_out;
        result.delay_trace.replace_extension();
        result.delay_trace += "_delays.csv";
        auto out = open_out(result.delay_trace);
        write_delay_trace_csv(out, result.log);
    }
    return result;
}

} // namespace ncsnaf::harness
