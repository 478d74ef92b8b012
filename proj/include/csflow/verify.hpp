#pragma once

// Cross-checks between the production computations and the oracles. Each
// measure returns a single worst-case error; a check passes when that error
// is at most its tolerance. The acceptance suite and `csflow verify-all`
// both draw on these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "csflow/berger.hpp"
#include "csflow/chern_simons.hpp"
#include "csflow/oracles.hpp"
#include "csflow/ricci_flow.hpp"
#include "csflow/warped.hpp"

namespace csflow::verify {

using berger::BergerParams;

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Scale-aware difference: absolute below magnitude 1, relative above.
inline double scaled_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double scaled_error(const MatrixForm<double>& got, const MatrixForm<double>& want) {
  return (got - want).max_magnitude() / std::max(1.0, want.max_magnitude());
}

inline std::vector<BergerParams> random_params(std::uint64_t seed, int count, double lo,
                                               double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<BergerParams> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) out.emplace_back(u(gen), u(gen), u(gen));
  return out;
}

struct ClosedFormErrors {
  double connection_coeffs = 0.0;  // <nabla X_i X_j, X_k> vs Koszul
  double connection_form = 0.0;    // w vs Koszul
  double curvature_form = 0.0;     // Omega vs dw - w ^ w
  double ricci = 0.0;              // R_ii vs direct contraction
  double max() const {
    return std::max({connection_coeffs, connection_form, curvature_form, ricci});
  }
};

inline ClosedFormErrors closed_form_errors(const std::vector<BergerParams>& samples) {
  ClosedFormErrors e;
  for (const auto& p : samples) {
    const auto c = oracle::bracket_constants(p.lambdas());
    const auto kz = oracle::koszul(c);
    const auto conn = berger::connection_coeffs(p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          e.connection_coeffs = std::max(e.connection_coeffs, scaled_error(conn[i][j][k], kz[i][j][k]));
    const auto w_oracle = oracle::connection_matrix(kz);
    e.connection_form =
        std::max(e.connection_form, scaled_error(berger::connection_form(p), w_oracle));
    const auto omega_oracle = oracle::structure_equation(w_oracle, FrameStructure::lie(c));
    e.curvature_form =
        std::max(e.curvature_form, scaled_error(berger::curvature_form(p), omega_oracle));
    const auto r = berger::ricci(p);
    const auto r_oracle = oracle::ricci_direct(c);
    for (int i = 0; i < 3; ++i) e.ricci = std::max(e.ricci, scaled_error(r[i], r_oracle[i]));
  }
  return e;
}

/// Largest relative deviation of wdot from its finite-difference oracle.
inline double omega_dot_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    worst = std::max(worst, scaled_error(berger::omega_dot(p), oracle::omega_dot_fd(p)));
  }
  return worst;
}

/// Relative deviation of d/dt (fixed-coframe density), by finite differences
/// along the flow, from the 2 P1(wdot, Omega) pipeline.
inline double cs_rate_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const double analytic = berger::tp1_dot_pipeline(p);
    const double fd = oracle::cs_density_rate_fd(p);
    worst = std::max(worst, std::abs(fd - analytic) / std::max(1e-12, std::abs(analytic)));
  }
  return worst;
}

/// Pipeline / closed-form coefficient against the fixed ratio 4, on samples
/// away from the round locus.
inline double pipeline_ratio_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const double coef = berger::tp1_dot_coefficient(p);
    if (std::abs(coef) < 1e-6) continue;
    worst = std::max(worst, std::abs(berger::tp1_dot_pipeline(p) / coef -
                                     berger::kPipelineToClosedForm) /
                                berger::kPipelineToClosedForm);
  }
  return worst;
}

/// Factored vs expanded numerator, relative to (a + b + c)^5.
inline double numerator_identity_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const double a = p[0] * p[0], b = p[1] * p[1], c = p[2] * p[2];
    const double scale = std::pow(a + b + c, 5);
    worst = std::max(worst, std::abs(berger::pontryagin_numerator(a, b, c) -
                                     berger::pontryagin_numerator_expanded(a, b, c)) /
                                scale);
  }
  return worst;
}

/// Both factorizations of F against the literal polynomial, relative.
inline double factorization_error(std::uint64_t seed, int count) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  double worst = 0.0;
  for (int n = 0; n < count; ++n) {
    const double a = u(gen), b = u(gen);
    const double f = berger::big_F(a, b);
    for (int v = 1; v <= 2; ++v) {
      worst = std::max(worst, std::abs(berger::big_F_factored(a, b, v) - f) / std::abs(f));
    }
  }
  return worst;
}

/// Grid on (0.5, 3) used for the vanishing locus: 0.5 + 0.125 k, k = 1..20.
inline std::vector<double> locus_axis() {
  std::vector<double> axis;
  for (int k = 1; k <= 20; ++k) axis.push_back(0.5 + 0.125 * k);
  return axis;
}

struct LocusScan {
  int misclassified = 0;       // zero verdict differs from (alpha, beta) == (1, 1)
  int nonpositive_F = 0;       // F <= 0 with alpha, beta > 1
  int points = 0;
};

inline LocusScan vanishing_locus_scan(double zero_threshold = 1e-12) {
  LocusScan s;
  const auto axis = locus_axis();
  for (double a : axis) {
    for (double b : axis) {
      ++s.points;
      const bool zero = std::abs(berger::tp1_dot_coefficient(BergerParams(a, b, 1.0))) < zero_threshold;
      if (zero != (a == 1.0 && b == 1.0)) ++s.misclassified;
      if (a > 1.0 && b > 1.0 && !(berger::big_F(a, b) > 0.0)) ++s.nonpositive_F;
    }
  }
  return s;
}

/// 16-point Gauss-Legendre value of TP1 vs the closed-form t-integral.
inline double quadrature_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const auto w = transpose(berger::connection_form(p));
    const auto omega = transpose(berger::curvature_form(p));
    worst = std::max(worst, scaled_error(oracle::tp_quadrature(w, omega), berger::cs_density(p)));
  }
  return worst;
}

/// Column-convention curvature of t w, d(tw) + t^2 w ^ w, against phi_t.
inline double phi_t_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const FrameStructure fs = berger::structure(p);
    const auto w = transpose(berger::connection_form(p));
    const auto omega = transpose(berger::curvature_form(p));
    for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      MatrixForm<double> curv(2);
      const auto ww = matrix_wedge(w, w);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          curv.set(i, j, exterior_derivative(w(i, j), fs) * t + ww(i, j) * (t * t));
      worst = std::max(worst, scaled_error(curv, phi_t(t, w, omega)));
    }
  }
  return worst;
}

/// Orthonormal Chern-Simons density against its closed form
/// c = -4 (sum l^6 - sum_{p != q} l_p^4 l_q^2 + 4 l1^2 l2^2 l3^2) / (pi^2 l1^3 l2^3 l3^3).
inline double cs_density_closed_form(const BergerParams& p) {
  const double a = p[0] * p[0], b = p[1] * p[1], c = p[2] * p[2];
  const double num = a * a * a + b * b * b + c * c * c - a * a * (b + c) - b * b * (a + c) -
                     c * c * (a + b) + 4.0 * a * b * c;
  const double prod = p.product();
  return -4.0 * num / (std::numbers::pi * std::numbers::pi * prod * prod * prod);
}

inline double cs_density_error(const std::vector<BergerParams>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    worst = std::max(worst, scaled_error(berger::cs_density(p), cs_density_closed_form(p)));
  }
  return worst;
}

// ---- flow -----------------------------------------------------------------

/// |l(t_end) - sqrt(1 - 4 t_end)| for the round unit sphere.
inline double round_sphere_error(double h, double t_end = 0.2) {
  const auto traj = flow::integrate(BergerParams(1.0, 1.0, 1.0), t_end, h, false);
  if (traj.extinct) return INFINITY;
  const auto& last = traj.states.back();
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(last.params[i] - oracle::round_sphere_lambda(1.0, t_end)));
  }
  return worst;
}

/// Largest relative change of the Chern-Simons integral along the round flow.
inline double round_cs_drift(double h = 2.5e-3, double t_end = 0.2) {
  const auto traj = flow::integrate(BergerParams(1.0, 1.0, 1.0), t_end, h, false);
  const auto series = flow::cs_along_flow(traj);
  const double ref = series.front().cs_integral;
  double worst = 0.0;
  for (const auto& s : series) worst = std::max(worst, std::abs(s.cs_integral / ref - 1.0));
  return worst;
}

inline double normalized_spread(const BergerParams& start, double t_end, double h = 1e-3) {
  const auto traj = flow::integrate(start, t_end, h, true);
  if (traj.extinct) return INFINITY;
  return flow::ratio_spread(traj.states.back().params);
}

// ---- warped ---------------------------------------------------------------

inline std::vector<warped::ChartPoint> random_chart_points(const warped::WarpedSpec& spec,
                                                           std::uint64_t seed, int count) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> polar(0.2, std::numbers::pi - 0.2);
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
  std::vector<warped::ChartPoint> out;
  for (int n = 0; n < count; ++n) {
    warped::ChartPoint p{};
    for (int c = 0; c < 3; ++c) p[c] = spec.is_polar(c) ? polar(gen) : azimuth(gen);
    out.push_back(p);
  }
  return out;
}

inline double christoffel_fd_error(const warped::WarpedSpec& spec,
                                   const std::vector<warped::ChartPoint>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto g = warped::christoffel(spec, p);
    const auto o = oracle::christoffel_fd(spec, p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          worst = std::max(worst, std::abs(g[k][i][j].value() - o[k][i][j]));
  }
  return worst;
}

/// Relative to the largest |Gamma_dot| at each point.
inline double christoffel_dot_fd_error(const warped::WarpedSpec& spec,
                                       const std::vector<warped::ChartPoint>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto g = warped::christoffel_dot(spec, p);
    const auto o = oracle::christoffel_dot_fd(spec, p);
    double diff = 0.0, scale = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          diff = std::max(diff, std::abs(g[k][i][j] - o[k][i][j]));
          scale = std::max(scale, std::abs(g[k][i][j]));
        }
    worst = std::max(worst, diff / std::max(scale, 1e-12));
  }
  return worst;
}

inline double bianchi_error(const warped::WarpedSpec& spec,
                            const std::vector<warped::ChartPoint>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto geo = warped::compute_geometry(spec, p);
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) {
            const double s = geo.riemann[l][i][j][k].value() + geo.riemann[l][j][k][i].value() +
                             geo.riemann[l][k][i][j].value();
            worst = std::max(worst, std::abs(s));
          }
  }
  return worst;
}

/// Omega built through the exterior algebra against the Riemann tensor:
/// Omega_i^j(d_a, d_b) = R^j_{abi}.
inline double curvature_route_error(const warped::WarpedSpec& spec,
                                    const std::vector<warped::ChartPoint>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto geo = warped::compute_geometry(spec, p);
    const auto omega = warped::curvature_form(warped::connection_form(geo.gamma));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a)
          for (int b = a + 1; b < 3; ++b) {
            const double v = omega(i, j).component({a, b});
            worst = std::max(worst, std::abs(v - geo.riemann[j][a][b][i].value()));
          }
  }
  return worst;
}

// ---- catalogue ------------------------------------------------------------

struct CheckRecord {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string paper_anchor;
};

struct Options {
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 0;
  int samples = 100;
  int grid_resolution = 16;
  std::map<std::string, double> tolerance_overrides;
};

struct CheckDefinition {
  std::string name;
  double tolerance;
  std::string paper_anchor;
  std::function<double(const Options&)> measure;
};

inline std::vector<CheckDefinition> catalogue() {
  const auto params = [](const Options& o, double lo = 0.25, double hi = 4.0) {
    return random_params(o.seed, o.samples, lo, hi);
  };
  const auto warped_max = [](const Options& o, auto&& per_spec) {
    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
      for (const auto& w : warped::standard_warps(n)) {
        const warped::WarpedSpec spec(n, w);
        worst = std::max(worst, per_spec(spec, random_chart_points(spec, o.seed + n, 20)));
      }
    }
    return worst;
  };
  std::vector<CheckDefinition> c;
  c.push_back({"berger.connection_coeffs_vs_koszul", 1e-12, "Berger sphere Levi-Civita coefficients",
               [=](const Options& o) { return closed_form_errors(params(o)).connection_coeffs; }});
  c.push_back({"berger.connection_form_vs_koszul", 1e-12, "Berger sphere connection forms",
               [=](const Options& o) { return closed_form_errors(params(o)).connection_form; }});
  c.push_back({"berger.curvature_form_vs_structure_equation", 1e-12,
               "Berger sphere curvature forms",
               [=](const Options& o) { return closed_form_errors(params(o)).curvature_form; }});
  c.push_back({"berger.ricci_vs_contraction", 1e-12, "Berger sphere Ricci curvature",
               [=](const Options& o) { return closed_form_errors(params(o)).ricci; }});
  c.push_back({"berger.omega_dot_vs_finite_difference", 1e-6,
               "derivative of the connection forms under Ricci flow",
               [=](const Options& o) { return omega_dot_error(params(o, 0.5, 2.0)); }});
  c.push_back({"berger.pipeline_to_closed_form_ratio", 1e-12,
               "first variation of TP1 on generalized Berger spheres",
               [=](const Options& o) { return pipeline_ratio_error(params(o)); }});
  c.push_back({"berger.numerator_factored_vs_expanded", 1e-12,
               "coefficient of the TP1 derivative in three constants",
               [=](const Options& o) { return numerator_identity_error(params(o)); }});
  c.push_back({"berger.F_factorizations", 1e-9, "positivity of F(alpha, beta)",
               [](const Options& o) { return factorization_error(o.seed, 1000); }});
  c.push_back({"berger.vanishing_locus_misclassified", 0.0, "invariant only on round spheres",
               [](const Options&) { return double(vanishing_locus_scan().misclassified); }});
  c.push_back({"berger.F_nonpositive_points", 0.0, "F(alpha, beta) is positive",
               [](const Options&) { return double(vanishing_locus_scan().nonpositive_F); }});
  c.push_back({"chern_simons.quadrature_vs_closed_form", 1e-12, "Chern-Simons transgression form",
               [=](const Options& o) { return quadrature_error(params(o, 0.5, 2.0)); }});
  c.push_back({"chern_simons.phi_t_is_curvature_of_tw", 1e-12, "Chern-Simons transgression form",
               [=](const Options& o) { return phi_t_error(params(o, 0.5, 2.0)); }});
  c.push_back({"chern_simons.density_closed_form", 1e-12, "Chern-Simons form of a Berger sphere",
               [=](const Options& o) { return cs_density_error(params(o)); }});
  c.push_back({"chern_simons.density_rate_vs_pipeline", 1e-4,
               "first variation of the Chern-Simons form",
               [=](const Options& o) { return cs_rate_error(params(o, 0.5, 2.0)); }});
  c.push_back({"flow.round_sphere_closed_form", 1e-8, "round sphere under Ricci flow",
               [](const Options&) { return round_sphere_error(2.5e-3); }});
  c.push_back({"flow.rk4_halving_error_ratio", 1.0 / 12.0, "round sphere under Ricci flow",
               [](const Options&) { return round_sphere_error(2.5e-3) / round_sphere_error(5e-3); }});
  c.push_back({"flow.round_cs_integral_drift", 1e-9, "round spheres are invariant under the flow",
               [](const Options&) { return round_cs_drift(); }});
  c.push_back({"flow.normalized_ratio_spread", 1e-6, "convergence of the normalized flow",
               [](const Options&) { return normalized_spread(BergerParams(2.0, 1.0, 1.0), 10.0); }});
  c.push_back({"warped.christoffel_vs_finite_difference", 1e-8, "warped product Christoffel symbols",
               [=](const Options& o) { return warped_max(o, [](const auto& s, const auto& p) {
                 return christoffel_fd_error(s, p); }); }});
  c.push_back({"warped.christoffel_dot_vs_finite_difference", 1e-4,
               "variation of the Christoffel symbols",
               [=](const Options& o) { return warped_max(o, [](const auto& s, const auto& p) {
                 return christoffel_dot_fd_error(s, p); }); }});
  c.push_back({"warped.first_bianchi", 1e-9, "warped product curvature",
               [=](const Options& o) { return warped_max(o, [](const auto& s, const auto& p) {
                 return bianchi_error(s, p); }); }});
  c.push_back({"warped.curvature_form_vs_riemann", 1e-9, "warped product curvature forms",
               [=](const Options& o) { return warped_max(o, [](const auto& s, const auto& p) {
                 return curvature_route_error(s, p); }); }});
  // One scan of every warp serves all grid checks.
  const auto scans = std::make_shared<std::map<std::pair<int, unsigned>, std::vector<warped::GridScanResult>>>();
  const auto scan_max = [scans](const Options& o, auto field) {
    auto& cached = (*scans)[{o.grid_resolution, o.jobs}];
    if (cached.empty()) {
      for (int n = 1; n <= 2; ++n) {
        for (const auto& w : warped::standard_warps(n)) {
          cached.push_back(warped::grid_scan(warped::WarpedSpec(n, w), o.grid_resolution, o.jobs));
        }
      }
    }
    double worst = 0.0;
    for (const auto& r : cached) worst = std::max(worst, field(r));
    return worst;
  };
  c.push_back({"warped.exactness_trace_product", 1e-8, "derivative of TP1 is exact at time zero",
               [=](const Options& o) { return scan_max(o, [](const auto& r) { return r.max_trace_product; }); }});
  c.push_back({"warped.exactness_trace_wedge", 1e-8, "derivative of TP1 is exact at time zero",
               [=](const Options& o) { return scan_max(o, [](const auto& r) { return r.max_trace_wedge; }); }});
  c.push_back({"warped.curvature_trace", 1e-12, "curvature form has zero diagonal",
               [=](const Options& o) { return scan_max(o, [](const auto& r) { return r.max_curvature_trace; }); }});
  c.push_back({"warped.curvature_sparsity", 1e-11, "warped product curvature forms",
               [=](const Options& o) { return scan_max(o, [](const auto& r) { return r.max_curvature_pattern_violation; }); }});
  c.push_back({"warped.omega_dot_sparsity", 1e-11, "derivative of the warped connection forms",
               [=](const Options& o) { return scan_max(o, [](const auto& r) { return r.max_omega_dot_pattern_violation; }); }});
  return c;
}

/// Runs every check; failing records come first, otherwise catalogue order.
inline std::vector<CheckRecord> run_checks(const Options& opts) {
  std::vector<CheckRecord> records;
  for (const auto& def : catalogue()) {
    CheckRecord r{def.name, false, 0.0, def.tolerance, def.paper_anchor};
    if (auto it = opts.tolerance_overrides.find(def.name); it != opts.tolerance_overrides.end()) {
      r.tolerance = it->second;
    }
    r.max_error = def.measure(opts);
    r.passed = std::isfinite(r.max_error) && r.max_error <= r.tolerance;
    records.push_back(std::move(r));
  }
  std::stable_partition(records.begin(), records.end(),
                        [](const CheckRecord& r) { return !r.passed; });
  return records;
}

inline bool all_passed(const std::vector<CheckRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.passed; });
}

}  // namespace csflow::verify
