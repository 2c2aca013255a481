#pragma once

#include <vector>

#include "d2t/model/gradient_audit.hpp"

namespace d2t::fixture {

using model::micro_config;
using model::micro_dataset;
using model::micro_game;
using model::micro_model;

inline const std::vector<model::Mode>& all_modes() {
  static const std::vector<model::Mode> modes{model::Mode::edcc, model::Mode::hier,
                                              model::Mode::dyn, model::Mode::gate};
  return modes;
}

}  // namespace d2t::fixture
