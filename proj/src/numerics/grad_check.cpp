#include "d2t/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "d2t/errors.hpp"

namespace d2t::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const ScalarFn& fn, ParamStore& params,
                           const GradCheckOptions& options) {
  auto evaluate = [&]() {
    Tape tape;
    Var out = fn(tape);
    if (out.value().size() != 1) {
      throw UsageError("grad_check needs a scalar function, got " + out.value().shape_string());
    }
    return out.scalar();
  };

  Tape tape;
  Var out = fn(tape);
  if (out.value().size() != 1) {
    throw UsageError("grad_check needs a scalar function, got " + out.value().shape_string());
  }
  tape.backward(out);

  GradCheckReport report;
  for (const std::string& name : params.names()) {
    Matrix& value = params.value(name);
    const Matrix* analytic = tape.param_grad(name);
    double worst = 0.0, worst_a = 0.0, worst_n = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      auto at = [&](double offset) {
        value[i] = saved + offset;
        return evaluate();
      };
      auto stencil = [&](double e) {
        return (at(-2 * e) - 8 * at(-e) + 8 * at(e) - at(2 * e)) / (12 * e);
      };
      double numeric = 0.0;
      if (!options.five_point) {
        numeric = (at(options.epsilon) - at(-options.epsilon)) / (2 * options.epsilon);
      } else {
        double best_gap = std::numeric_limits<double>::infinity();
        for (double e = options.epsilon; e >= options.min_epsilon; e /= 10) {
          const double coarse = stencil(e);
          const double fine = stencil(e / 2);
          const double gap = std::abs(coarse - fine);
          if (gap < best_gap) {
            best_gap = gap;
            numeric = fine;
          }
          if (relative_error(coarse, fine, options.floor) < options.tolerance / 10) break;
        }
      }
      value[i] = saved;
      const double a = analytic != nullptr ? (*analytic)[i] : 0.0;
      const double err = relative_error(a, numeric, options.floor);
      if (err >= worst) {
        worst = err;
        worst_a = a;
        worst_n = numeric;
      }
      ++report.checked;
    }
    report.max_relative_error[name] = worst;
    if (worst >= report.worst) {
      report.worst = worst;
      report.worst_param = name;
      report.worst_analytic = worst_a;
      report.worst_numeric = worst_n;
    }
  }
  report.passed = report.worst < options.tolerance;
  return report;
}

}  // namespace d2t::nn
