#include "d2t/model/config.hpp"

#include "d2t/errors.hpp"

namespace d2t::model {

Mode parse_mode(const std::string& name) {
  if (name == "edcc") return Mode::edcc;
  if (name == "hier") return Mode::hier;
  if (name == "dyn") return Mode::dyn;
  if (name == "gate") return Mode::gate;
  throw UsageError("unknown mode '" + name + "' (expected edcc, hier, dyn or gate)");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::edcc: return "edcc";
    case Mode::hier: return "hier";
    case Mode::dyn: return "dyn";
    case Mode::gate: return "gate";
  }
  return "gate";
}

std::string mode_label(Mode mode) {
  switch (mode) {
    case Mode::edcc: return "ED+CC";
    case Mode::hier: return "+Hier";
    case Mode::dyn: return "+Dyn";
    case Mode::gate: return "+Gate";
  }
  return "+Gate";
}

MemoryMode memory_mode(Mode mode) {
  switch (mode) {
    case Mode::edcc: return MemoryMode::none;
    case Mode::hier: return MemoryMode::fixed;
    case Mode::dyn: return MemoryMode::dynamic_nogate;
    case Mode::gate: return MemoryMode::gated;
  }
  return MemoryMode::gated;
}

EncoderKind parse_encoder(const std::string& name) {
  if (name == "flat") return EncoderKind::flat;
  if (name == "sequential") return EncoderKind::sequential;
  throw UsageError("unknown encoder '" + name + "' (expected flat or sequential)");
}

std::string encoder_name(EncoderKind kind) {
  return kind == EncoderKind::flat ? "flat" : "sequential";
}

void ModelConfig::validate() const {
  if (n == 0 || p == 0 || word_dim == 0 || layers == 0 || features == 0 || feature_size() == 0) {
    throw UsageError("model sizes must be positive");
  }
  if (encoder == EncoderKind::sequential && n % 2 != 0) {
    throw UsageError("sequential encoder needs an even hidden size");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw UsageError("dropout must be in [0, 1)");
}

}  // namespace d2t::model
