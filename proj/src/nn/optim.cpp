#include "gn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace gn {

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerConfig::Kind::Sgd;
  if (s == "adam") return OptimizerConfig::Kind::Adam;
  throw std::invalid_argument("unknown optimizer '" + s + "' (sgd, adam)");
}

void Optimizer::ensure_state(const ParameterStore& ps) {
  for (const auto& e : ps) {
    if (!m_.contains(e.name)) {
      m_.add(e.name, Tensor(e.value.rows(), e.value.cols()));
      v_.add(e.name, Tensor(e.value.rows(), e.value.cols()));
    }
  }
}

void Optimizer::step(ParameterStore& ps) {
  ++t_;
  const double lr = cfg_.learning_rate;
  if (cfg_.kind == OptimizerConfig::Kind::Sgd) {
    for (auto& e : ps) {
      for (std::size_t i = 0; i < e.value.size(); ++i) e.value[i] -= lr * e.grad[i];
    }
    ps.zero_grad();
    return;
  }

  ensure_state(ps);
  const double b1 = cfg_.beta1;
  const double b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (auto& e : ps) {
    Tensor& m = m_.value(e.name);
    Tensor& v = v_.value(e.name);
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double g = e.grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      e.value[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }
  ps.zero_grad();
}

Json Optimizer::state_to_json() const {
  Json out = Json::object();
  out["t"] = t_;
  out["m"] = params_to_json(m_);
  out["v"] = params_to_json(v_);
  return out;
}

void Optimizer::load_state(const Json& j) {
  if (!j.is_object() || !j.contains("t") || !j.contains("m") || !j.contains("v")) {
    throw ParseError("optimizer state: expected {t, m, v}", 0);
  }
  t_ = j["t"].get<std::uint64_t>();
  m_ = params_from_json(j["m"]);
  v_ = params_from_json(j["v"]);
}

}  // namespace gn
