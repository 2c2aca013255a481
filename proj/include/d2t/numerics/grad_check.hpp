#pragma once

#include <functional>
#include <map>
#include <string>

#include "d2t/numerics/tape.hpp"

namespace d2t::nn {

struct GradCheckOptions {
  // Five-point stencil (f(-2e) - 8f(-e) + 8f(e) - f(2e)) / 12e: truncation
  // error O(e^4), so a larger step keeps cancellation error small. The step
  // starts at epsilon and shrinks by 10 down to min_epsilon until the
  // estimates at e and e/2 agree; disagreement means a kink or cancellation
  // noise. Failing that, the step whose two estimates are closest wins.
  // Without five_point a single central difference at epsilon is used.
  bool five_point = true;
  double epsilon = 1e-3;
  double min_epsilon = 1e-6;
  double tolerance = 1e-4;
  // Denominator floor: error = |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
};

struct GradCheckReport {
  std::map<std::string, double> max_relative_error;
  double worst = 0.0;
  std::string worst_param;
  double worst_analytic = 0.0;  // gradient entry at the worst error
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool passed = false;
};

// Builds a scalar from parameters in `params` on a fresh tape.
using ScalarFn = std::function<Var(Tape&)>;

// Compares tape gradients against central differences for every scalar in
// every parameter. Parameter values are restored.
GradCheckReport grad_check(const ScalarFn& fn, ParamStore& params,
                           const GradCheckOptions& options = {});

double relative_error(double analytic, double numeric, double floor);

}  // namespace d2t::nn
