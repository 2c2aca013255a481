#pragma once

#include <cstdint>

#include "d2t/data/record.hpp"
#include "d2t/model/model.hpp"
#include "d2t/numerics/grad_check.hpp"

namespace d2t::model {

// Two entities with three records each and a six-token summary; "5" is
// copy-only and "-1" is not copyable.
data::GameInstance micro_game();
data::Dataset micro_dataset();
// n=8, p=6, two decoder layers, no dropout, weights uniform in [-0.3, 0.3].
ModelConfig micro_config(Mode mode, EncoderKind encoder = EncoderKind::flat);
Model micro_model(Mode mode, std::uint64_t seed = 7, EncoderKind encoder = EncoderKind::flat);

// Single central difference with step epsilon.
nn::GradCheckOptions central_difference(double epsilon = 1e-5, double tolerance = 1e-3);

// Tape gradients of the summary loss against finite differences over every
// parameter of the model. Parameter values are left unchanged.
nn::GradCheckReport check_gradients(Model& model, const data::GameInstance& game,
                                    const nn::GradCheckOptions& options = {});

}  // namespace d2t::model
