#pragma once

// Experiment configuration as flat INI text, one section per module.
// Delay values are given in sampling periods. Unknown sections or keys are
// errors, as are malformed values; every problem found is reported.
//
//   [plant]   p1 p2 sample_period substeps
//   [delay]   distribution sc_min sc_max cp_min cp_max sc_bound cp_bound
//   [state]   tau tau_o
//   [network] hidden tanh_weight
//   [train]   episodes horizon gamma beta batch_size iterations update_period
//             learning_rate adam_beta1 adam_beta2 adam_epsilon warmup
//             replay_capacity init_box metric_start divergence_threshold
//             divergence_penalty
//   [noise]   theta sigma scale hold_episodes final_scale
//   [reward]  output_weights effort smoothness
//   [run]     seed out checkpoint_every wall_clock

#include "ncsnaf/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ncsnaf::harness {

// Environment variable naming the default output root for runs.
inline constexpr const char* kOutRootEnv = "NCSNAF_OUT_ROOT";

struct ExperimentConfig {
    agent::TrainConfig train;
    std::optional<long long> declared_tau; // [state] tau, must equal sc_bound + cp_bound
    std::uint64_t seed = 0;
    std::string out; // empty: <$NCSNAF_OUT_ROOT or "runs">/seed_<seed>
    int checkpoint_every = 500;
    bool wall_clock = false; // record real seconds_elapsed in the learning curve

    void validate() const;
    std::filesystem::path resolved_out() const;
};

ExperimentConfig default_config();

// Applies `text` on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = default_config());
ExperimentConfig load_config(const std::filesystem::path& path);

// "section.key=value"
void apply_override(ExperimentConfig& config, const std::string& assignment);

// Full resolved config. parse_config(to_ini(c)) reproduces c; delay values
// round-trip bit-exactly when the sampling period is a power of two.
std::string to_ini(const ExperimentConfig& config);

std::vector<std::string> known_keys();

} // namespace ncsnaf::harness
