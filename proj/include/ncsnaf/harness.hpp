#pragma once

// Run orchestration behind the command line tool.
//
// A training run directory contains:
//   config.ini            resolved configuration that produced the run
//   learning_curve.csv    episode,reward_sum_from_50th,mean_loss,noise_scale,seconds_elapsed
//   checkpoints/episode_NNNNNN.ckpt   every checkpoint_every episodes
//   checkpoints/final.ckpt
//
// Evaluation writes a trajectory CSV
//   k,t,x1,x2,x3,y1,y2,u_applied,u_command,tau_sc,tau_cp,controller_arrival,plant_arrival
// and a delay trace CSV next to it
//   k,tau_sc,tau_cp,controller_arrival,plant_arrival
// Values that never materialized (packets still in flight at the horizon)
// are written as "nan".

#include "ncsnaf/config.hpp"
#include "ncsnaf/episode.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace ncsnaf::harness {

struct RunArtifacts {
    std::filesystem::path dir;
    std::filesystem::path config;
    std::filesystem::path learning_curve;
    std::vector<std::filesystem::path> checkpoints; // periodic, then final
    agent::TrainingLog log;
};

inline constexpr const char* kLearningCurveHeader = "episode,reward_sum_from_50th,mean_loss,noise_scale,seconds_elapsed";
inline constexpr const char* kDelayTraceHeader = "k,tau_sc,tau_cp,controller_arrival,plant_arrival";

// `progress` receives one human-readable line per episode (may be null).
RunArtifacts cmd_train(const ExperimentConfig& config, std::ostream* progress = nullptr);

struct EvalResult {
    agent::EpisodeLog log;
    std::filesystem::path trajectory;
    std::filesystem::path delay_trace;
};

// Noise-free rollout of the checkpointed policy from x0. The episode length,
// plant and delay model come from `config`.
EvalResult cmd_eval(const std::filesystem::path& checkpoint_path, const ExperimentConfig& config,
                    const Eigen::VectorXd& x0, std::uint64_t delay_seed, const std::filesystem::path& trajectory_out);

// Finds config.ini beside the checkpoint or in its parent directory.
std::filesystem::path find_run_config(const std::filesystem::path& checkpoint_path);

void write_trajectory_csv(std::ostream& out, const agent::EpisodeLog& log);
void write_delay_trace_csv(std::ostream& out, const agent::EpisodeLog& log);

} // namespace ncsnaf::harness
