#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "gn/params.hpp"
#include "gn/tape.hpp"

namespace gn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Compares tape gradients with central finite differences over every
/// parameter coordinate. `loss` builds a scalar on the given tape from the
/// current store values. Relative error is |a - n| / max(|a|, |n|, floor).
GradCheckResult check_gradients(ParameterStore& ps, const std::function<Var(Tape&)>& loss,
                                double step = 1e-5, double floor = 1e-7);

}  // namespace gn
