#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gn/graph.hpp"
#include "gn/random.hpp"
#include "gn/tasks/sample.hpp"

namespace gn::tasks {

using Vec2 = std::array<double, 2>;

struct Spring {
  int a = 0;
  int b = 0;
  double rest_length = 1.0;  // m
  double stiffness = 50.0;   // N/m

  bool operator==(const Spring&) const = default;
};

struct PhysicsState {
  std::vector<Vec2> position;  // m
  std::vector<Vec2> velocity;  // m/s
  std::vector<double> mass;    // kg
  std::vector<bool> fixed;
  std::vector<Spring> springs;
  Vec2 gravity{0.0, -10.0};  // m/s^2
  double dt = 0.02;          // s

  std::size_t size() const { return position.size(); }
  bool operator==(const PhysicsState&) const = default;
};

/// Throws std::invalid_argument on non-positive masses or timestep, bad
/// spring endpoints or mismatched array lengths.
void validate(const PhysicsState& s);

/// Impulses are rounded to multiples of this before they are applied. With
/// power-of-two masses every velocity then stays on a fixed binary grid, the
/// additions are exact, and the equal and opposite spring impulses cancel
/// exactly in the total momentum.
inline constexpr double kImpulseQuantum = 0x1.0p-36;
double quantize_impulse(double j);

/// Hooke springs on both endpoints plus gravity, then semi-implicit Euler:
/// v += dt F / m, x += dt v. Fixed masses keep their state. A spring whose
/// endpoints coincide exerts no force.
PhysicsState physics_step(const PhysicsState& s);

double kinetic_energy(const PhysicsState& s);
double spring_energy(const PhysicsState& s);
/// Kinetic plus spring potential (gravity excluded).
double total_energy(const PhysicsState& s);
Vec2 total_momentum(const PhysicsState& s);

/// Chain of n unit masses along x joined by rest-length springs, jittered
/// positions and small random velocities.
PhysicsState gen_chain(std::size_t n, bool fixed_ends, Vec2 gravity, double dt, Rng& rng);

// Raw state graph: node attr [x, y, vx, vy, mass, fixed], one edge per
// spring (a -> b) with attr [rest_length, stiffness], global [gx, gy, dt].
Graph state_to_graph(const PhysicsState& s);
PhysicsState graph_to_state(const Graph& g);

/// A state after a random number of warm-up steps paired with its successor.
Sample gen_physics_sample(std::size_t n, const TaskParams& p, Rng& rng);

}  // namespace gn::tasks
