#pragma once

// Binary checkpoint of a network and its optimizer state.
//
// Layout (all integers and doubles little-endian):
//   magic       8 bytes  "NCSNAFCK"
//   version     u32
//   action_dim  u32
//   layer_count u32
//   per layer:  u32 in, u32 out, u8 activation, f64 activation weight, u64 offset
//   param_count u64, then param_count f64
//   adam:       f64 lr, f64 beta1, f64 beta2, f64 epsilon, u64 step,
//               u64 moment_count, moment_count f64 (first), moment_count f64 (second)
//   end marker  8 bytes  "KCFANSCN"

#include "ncsnaf/nn.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>

namespace ncsnaf::checkpoint {

inline constexpr std::uint32_t kFormatVersion = 1;

struct Checkpoint {
    nn::MlpNetwork network;
    nn::AdamState adam;
};

void write(std::ostream& out, const nn::MlpNetwork& net, const nn::AdamState& adam);
Checkpoint read(std::istream& in);

// Writes to a sibling temp file and renames, so a crash never leaves a
// half-written checkpoint at `path`.
void save(const std::filesystem::path& path, const nn::MlpNetwork& net, const nn::AdamState& adam);
Checkpoint load(const std::filesystem::path& path);

} // namespace ncsnaf::checkpoint
