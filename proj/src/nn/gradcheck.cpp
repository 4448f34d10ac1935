#include "gn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gn {

GradCheckResult check_gradients(ParameterStore& ps, const std::function<Var(Tape&)>& loss, double step,
                                double floor) {
  ps.zero_grad();
  {
    Tape tape;
    tape.backward(loss(tape));
  }
  std::vector<Tensor> analytic;
  for (const auto& e : ps) analytic.push_back(e.grad);
  ps.zero_grad();

  auto eval = [&]() {
    Tape tape;
    return loss(tape).value().item();
  };

  GradCheckResult res;
  for (std::size_t p = 0; p < ps.size(); ++p) {
    auto& entry = ps.at(p);
    for (std::size_t i = 0; i < entry.value.size(); ++i) {
      const double orig = entry.value[i];
      entry.value[i] = orig + step;
      const double up = eval();
      entry.value[i] = orig - step;
      const double down = eval();
      entry.value[i] = orig;

      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[p][i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++res.coordinates;
      if (err > res.max_rel_error) {
        res.max_rel_error = err;
        res.worst_param = entry.name;
        res.worst_index = i;
        res.analytic = a;
        res.numeric = numeric;
      }
    }
  }
  return res;
}

}  // namespace gn
