#include "gn/tasks/physics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gn::tasks {

void validate(const PhysicsState& s) {
  const std::size_t n = s.size();
  if (s.velocity.size() != n || s.mass.size() != n || s.fixed.size() != n) {
    throw std::invalid_argument("physics state arrays have different lengths");
  }
  if (!(s.dt > 0)) throw std::invalid_argument("physics timestep must be positive");
  for (std::size_t i = 0; i < n; ++i)
    if (!(s.mass[i] > 0)) throw std::invalid_argument("mass " + std::to_string(i) + " must be positive");
  for (std::size_t k = 0; k < s.springs.size(); ++k) {
    const Spring& sp = s.springs[k];
    if (sp.a < 0 || sp.b < 0 || static_cast<std::size_t>(sp.a) >= n || static_cast<std::size_t>(sp.b) >= n) {
      throw std::invalid_argument("spring " + std::to_string(k) + " references a missing mass");
    }
  }
}

double quantize_impulse(double j) { return std::nearbyint(j / kImpulseQuantum) * kImpulseQuantum; }

PhysicsState physics_step(const PhysicsState& s) {
  validate(s);
  const std::size_t n = s.size();
  std::vector<Vec2> impulse(n, Vec2{0.0, 0.0});
  for (const Spring& sp : s.springs) {
    const auto a = static_cast<std::size_t>(sp.a), b = static_cast<std::size_t>(sp.b);
    const double dx = s.position[b][0] - s.position[a][0];
    const double dy = s.position[b][1] - s.position[a][1];
    const double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    // Force on a points towards b when stretched.
    const double f = sp.stiffness * (len - sp.rest_length) / len;
    const Vec2 j{quantize_impulse(s.dt * f * dx), quantize_impulse(s.dt * f * dy)};
    impulse[a][0] += j[0];
    impulse[a][1] += j[1];
    impulse[b][0] -= j[0];
    impulse[b][1] -= j[1];
  }
  PhysicsState out = s;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.fixed[i]) continue;
    for (int c = 0; c < 2; ++c) {
      const double jg = quantize_impulse(s.dt * s.mass[i] * s.gravity[static_cast<std::size_t>(c)]);
      out.velocity[i][static_cast<std::size_t>(c)] += (impulse[i][static_cast<std::size_t>(c)] + jg) / s.mass[i];
      out.position[i][static_cast<std::size_t>(c)] += s.dt * out.velocity[i][static_cast<std::size_t>(c)];
    }
  }
  return out;
}

double kinetic_energy(const PhysicsState& s) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    e += 0.5 * s.mass[i] * (s.velocity[i][0] * s.velocity[i][0] + s.velocity[i][1] * s.velocity[i][1]);
  return e;
}

double spring_energy(const PhysicsState& s) {
  double e = 0.0;
  for (const Spring& sp : s.springs) {
    const auto a = static_cast<std::size_t>(sp.a), b = static_cast<std::size_t>(sp.b);
    const double len = std::hypot(s.position[b][0] - s.position[a][0], s.position[b][1] - s.position[a][1]);
    e += 0.5 * sp.stiffness * (len - sp.rest_length) * (len - sp.rest_length);
  }
  return e;
}

double total_energy(const PhysicsState& s) { return kinetic_energy(s) + spring_energy(s); }

Vec2 total_momentum(const PhysicsState& s) {
  Vec2 p{0.0, 0.0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    p[0] += s.mass[i] * s.velocity[i][0];
    p[1] += s.mass[i] * s.velocity[i][1];
  }
  return p;
}

PhysicsState gen_chain(std::size_t n, bool fixed_ends, Vec2 gravity, double dt, Rng& rng) {
  if (n < 1) throw std::invalid_argument("physics needs at least one mass");
  PhysicsState s;
  s.gravity = gravity;
  s.dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    s.position.push_back({static_cast<double>(i) + rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)});
    // Velocities start on the impulse grid so unit masses stay on it.
    s.velocity.push_back({quantize_impulse(rng.uniform(-0.5, 0.5)), quantize_impulse(rng.uniform(-0.5, 0.5))});
    s.mass.push_back(1.0);
    s.fixed.push_back(fixed_ends && (i == 0 || i + 1 == n));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) s.springs.push_back(Spring{static_cast<int>(i), static_cast<int>(i + 1), 1.0, 50.0});
  for (std::size_t i = 0; i < n; ++i)
    if (s.fixed[i]) s.velocity[i] = {0.0, 0.0};
  return s;
}

Graph state_to_graph(const PhysicsState& s) {
  Graph g;
  g.global_attr = {s.gravity[0], s.gravity[1], s.dt};
  for (std::size_t i = 0; i < s.size(); ++i) {
    g.nodes.push_back({s.position[i][0], s.position[i][1], s.velocity[i][0], s.velocity[i][1], s.mass[i],
                       s.fixed[i] ? 1.0 : 0.0});
  }
  for (const Spring& sp : s.springs) g.edges.push_back(Edge{{sp.rest_length, sp.stiffness}, sp.a, sp.b, 0});
  return g;
}

PhysicsState graph_to_state(const Graph& g) {
  if (g.global_attr.size() != 3) throw std::invalid_argument("physics graph needs global [gx, gy, dt]");
  PhysicsState s;
  s.gravity = {g.global_attr[0], g.global_attr[1]};
  s.dt = g.global_attr[2];
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const AttrVector& v = g.nodes[i];
    if (v.size() != 6) throw std::invalid_argument("physics node " + std::to_string(i) + " needs 6 attributes");
    s.position.push_back({v[0], v[1]});
    s.velocity.push_back({v[2], v[3]});
    s.mass.push_back(v[4]);
    s.fixed.push_back(v[5] > 0.5);
  }
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    if (e.attr.size() != 2) throw std::invalid_argument("physics edge " + std::to_string(k) + " needs 2 attributes");
    s.springs.push_back(Spring{e.sender, e.receiver, e.attr[0], e.attr[1]});
  }
  validate(s);
  return s;
}

Sample gen_physics_sample(std::size_t n, const TaskParams& p, Rng& rng) {
  PhysicsState s = gen_chain(n, p.fixed_ends, {0.0, p.gravity}, p.dt, rng);
  const std::size_t warm = p.warmup == 0 ? 0 : rng.below(p.warmup + 1);
  for (std::size_t t = 0; t < warm; ++t) s = physics_step(s);
  Sample out;
  out.task = Task::Physics;
  out.input = state_to_graph(s);
  out.target = state_to_graph(physics_step(s));
  return out;
}

}  // namespace gn::tasks
