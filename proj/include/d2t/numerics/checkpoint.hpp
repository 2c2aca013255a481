#pragma once

#include <filesystem>
#include <iosfwd>

#include "d2t/numerics/param_store.hpp"

namespace d2t::nn {

// Line-oriented text checkpoint:
//
//   d2t-checkpoint 1
//   params <count>
//   <name> <rows> <cols>
//   <row 0 values, space separated, %.17g>
//   ...
//
// Parameters appear in lexicographic name order. %.17g round-trips doubles
// exactly, so save -> load -> save is byte-identical.
inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const ParamStore& params);
void save_checkpoint(const std::filesystem::path& path, const ParamStore& params);

// Loads values into an existing store; names and shapes must match exactly.
void read_checkpoint(std::istream& in, ParamStore& params);
void load_checkpoint(const std::filesystem::path& path, ParamStore& params);

}  // namespace d2t::nn
