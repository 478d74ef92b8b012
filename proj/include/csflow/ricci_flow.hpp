#pragma once

// Ricci flow restricted to the diagonal left-invariant metrics on SU(2).
// With g(X_i, X_i) = l_i^2 and Ric(X_i, X_i) = l_i^2 R_ii, the equation
// dg/dt = -2 Ric reduces to dl_i/dt = -l_i R_ii; off-diagonal terms never
// appear because the orthonormal Ricci tensor of this family is diagonal.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "csflow/berger.hpp"

namespace csflow::flow {

using berger::Array3;
using berger::BergerParams;

/// Flow halts once any lambda drops to this value or below.
inline constexpr double kExtinctionThreshold = 1e-6;

/// Classical fourth-order Runge-Kutta step for an autonomous system.
template <class State, class Rhs>
State rk4_step(const State& y, double h, Rhs&& rhs) {
  const auto axpy = [](const State& a, double s, const State& b) {
    State out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
    return out;
  };
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, h / 2, k1));
  const State k3 = rhs(axpy(y, h / 2, k2));
  const State k4 = rhs(axpy(y, h, k3));
  State out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

/// dl_i/dt = -l_i R_ii.
inline Array3 ode_rhs(const BergerParams& p) {
  const Array3 r = berger::ricci(p);
  return {-p[0] * r[0], -p[1] * r[1], -p[2] * r[2]};
}

/// Volume-normalized flow: dl_i/dt = -l_i R_ii + (S / 3) l_i with S the
/// scalar curvature, so that d(l1 l2 l3)/dt = 0.
inline Array3 normalized_rhs(const BergerParams& p) {
  const Array3 r = berger::ricci(p);
  const double mean = (r[0] + r[1] + r[2]) / 3.0;
  return {p[0] * (mean - r[0]), p[1] * (mean - r[1]), p[2] * (mean - r[2])};
}

struct FlowState {
  BergerParams params;
  double t = 0.0;
  Array3 ricci{};
  double scalar_curvature = 0.0;
  double cs_density = 0.0;   // against the orthonormal coframe at time t
  double cs_integral = 0.0;  // cs_density * 2 pi^2 l1 l2 l3

  static FlowState at(const BergerParams& p, double t) {
    const Array3 r = berger::ricci(p);
    const double density = berger::cs_density(p);
    return {p, t, r, r[0] + r[1] + r[2], density, density * berger::volume(p)};
  }
};

enum class Method { rk4 };

struct FlowTrajectory {
  std::vector<FlowState> states;
  double step = 0.0;
  Method method = Method::rk4;
  bool normalized = false;
  bool extinct = false;  // stopped before t_end
};

/// One RK4 step of the (optionally normalized) flow. `h` may be negative.
/// Returns false, leaving `out` untouched, when the step would leave the
/// admissible region (a lambda at or below the extinction threshold, or a
/// non-finite value).
inline bool flow_step(const BergerParams& p, double h, bool normalized, BergerParams& out) {
  bool ok = true;
  const auto rhs = [&](const Array3& l) -> Array3 {
    for (double v : l) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        ok = false;
        return {0.0, 0.0, 0.0};
      }
    }
    const BergerParams q(l);
    return normalized ? normalized_rhs(q) : ode_rhs(q);
  };
  const Array3 next = rk4_step(p.lambdas(), h, rhs);
  if (!ok) return false;
  for (double v : next) {
    if (!std::isfinite(v) || v <= kExtinctionThreshold) return false;
  }
  out = BergerParams(next);
  return true;
}

/// Fixed-step RK4 trajectory from `start` over [0, t_end]. The final step is
/// shortened to land on t_end. Stops early, with `extinct` set, when the
/// metric collapses.
inline FlowTrajectory integrate(const BergerParams& start, double t_end, double h,
                                bool normalized) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("t_end must be > 0");
  }
  FlowTrajectory traj;
  traj.step = h;
  traj.normalized = normalized;
  traj.states.push_back(FlowState::at(start, 0.0));

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  BergerParams current = start;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_prev = static_cast<double>(n - 1) * h;
    const double t_next = std::min(static_cast<double>(n) * h, t_end);
    BergerParams next = current;
    if (!flow_step(current, t_next - t_prev, normalized, next)) {
      traj.extinct = true;
      break;
    }
    current = next;
    traj.states.push_back(FlowState::at(current, t_next));
  }
  return traj;
}

struct CsSample {
  double t;
  double cs_density;   // against the fixed initial coframe thetabar(0)
  double cs_integral;  // integral of TP1 over S^3
};

/// Chern-Simons density and integral along a trajectory. The density is
/// expressed against the coframe of the first state, which is held fixed
/// while the metric evolves; the integral is frame independent.
inline std::vector<CsSample> cs_along_flow(const FlowTrajectory& traj) {
  std::vector<CsSample> out;
  if (traj.states.empty()) return out;
  const double initial_volume = berger::volume(traj.states.front().params);
  out.reserve(traj.states.size());
  for (const FlowState& s : traj.states) {
    out.push_back({s.t, s.cs_integral / initial_volume, s.cs_integral});
  }
  return out;
}

/// Max over pairs of |l_i / l_j - 1|.
inline double ratio_spread(const BergerParams& p) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(p[i] / p[j] - 1.0));
  }
  return m;
}

}  // namespace csflow::flow
