#pragma once

#include <cstddef>
#include <string>

namespace d2t::model {

// Ablation ladder: flat attention with copy, then hierarchical attention over
// static entity memory, then per-step memory updates, then the update gate.
enum class Mode { edcc, hier, dyn, gate };

enum class MemoryMode { none, fixed, dynamic_nogate, gated };

enum class EncoderKind { flat, sequential };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);
// Row label used in ablation tables: ED+CC, +Hier, +Dyn, +Gate.
std::string mode_label(Mode mode);
MemoryMode memory_mode(Mode mode);
inline bool hierarchical(Mode mode) { return mode != Mode::edcc; }

EncoderKind parse_encoder(const std::string& name);
std::string encoder_name(EncoderKind kind);

struct ModelConfig {
  std::size_t n = 600;         // record / hidden size
  std::size_t p = 300;         // entity memory size
  std::size_t word_dim = 600;  // decoder input embedding size
  std::size_t feature_dim = 0; // per-role feature embedding size; 0 = round(n / L)
  std::size_t layers = 2;      // decoder LSTM layers
  std::size_t features = 4;    // L
  double dropout = 0.3;
  Mode mode = Mode::gate;
  EncoderKind encoder = EncoderKind::flat;
  double init_scale = 0.1;     // parameters start uniform in [-init_scale, init_scale]

  std::size_t feature_size() const {
    return feature_dim > 0 ? feature_dim : (n + features / 2) / features;
  }
  // Throws UsageError on non-positive sizes or an odd n for the sequential encoder.
  void validate() const;
};

}  // namespace d2t::model
