#pragma once

// Warped products S^n x_f S^m with n + m = 3 in spherical coordinates
// (theta^0, theta^1, theta^2). The metric is diagonal:
//   n = 1:  g = diag(1, f, f sin^2 theta^1),      f = f(theta^0)
//   n = 2:  g = diag(1, sin^2 theta^0, f),         f = f(theta^0, theta^1)
// Geometry is computed from order-3 jets of the metric at a chart point, so
// the Ricci-flow variation of the Christoffel symbols (which needs first
// derivatives of Ricci, hence third derivatives of g) is exact.
//
// Conventions: nabla_{d_k} d_i = Gamma^j_{ki} d_j, w_i^j = Gamma^j_{ki} dtheta^k,
// Omega = dw - w ^ w, R(d_i, d_j) d_k = R^l_{ijk} d_l, R_jk = R^i_{ijk}.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csflow/exterior_algebra.hpp"
#include "csflow/jet.hpp"
#include "csflow/parallel.hpp"

namespace csflow::warped {

/// Polar coordinates must stay this far from 0 and pi.
inline constexpr double kPoleMargin = 1e-2;

using ChartPoint = Point3;
using CoordJets = std::array<Jet<3>, 3>;

template <class T>
using Index3 = std::array<std::array<std::array<T, 3>, 3>, 3>;
template <class T>
using Index2 = std::array<std::array<T, 3>, 3>;

struct TrigFactor {
  enum class Kind { sin, cos };
  Kind kind = Kind::sin;
  int coordinate = 0;
  int frequency = 1;
};

/// A positive warping function on the base sphere, given as a map from
/// coordinate jets to the jet of f.
class WarpFunction {
 public:
  using Fn = std::function<Jet<3>(const CoordJets&)>;

  WarpFunction(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  static WarpFunction constant(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("constant warp must be positive");
    return WarpFunction("const(" + format(a) + ")", [a](const CoordJets&) { return Jet<3>(a); });
  }

  /// f = a + b * prod(factors); positive everywhere when a > |b|.
  static WarpFunction trig(double a, double b, std::vector<TrigFactor> factors) {
    if (!(a > std::abs(b))) {
      throw std::invalid_argument("warp a + b*trig needs a > |b| (got a = " + format(a) +
                                  ", b = " + format(b) + ")");
    }
    std::string name = format(a) + (b < 0 ? "-" : "+") + format(std::abs(b));
    for (const auto& f : factors) {
      if (f.coordinate < 0 || f.coordinate > 2) {
        throw std::invalid_argument("trig factor coordinate out of range");
      }
      name += std::string("*") + (f.kind == TrigFactor::Kind::sin ? "sin(" : "cos(") +
              (f.frequency == 1 ? "" : std::to_string(f.frequency)) + "t" +
              std::to_string(f.coordinate + 1) + ")";
    }
    return WarpFunction(std::move(name), [a, b, factors](const CoordJets& x) {
      Jet<3> term(b);
      for (const auto& f : factors) {
        const Jet<3> arg = x[f.coordinate] * static_cast<double>(f.frequency);
        term = term * (f.kind == TrigFactor::Kind::sin ? sin(arg) : cos(arg));
      }
      return Jet<3>(a) + term;
    });
  }

  Jet<3> operator()(const CoordJets& x) const { return fn_(x); }
  const std::string& name() const { return name_; }

 private:
  static std::string format(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  std::string name_;
  Fn fn_;
};

class WarpedSpec {
 public:
  WarpedSpec(int base_dim, WarpFunction warp) : n_(base_dim), warp_(std::move(warp)) {
    if (n_ != 1 && n_ != 2) throw std::invalid_argument("base sphere dimension must be 1 or 2");
  }

  int base_dim() const { return n_; }
  int fiber_dim() const { return 3 - n_; }
  const WarpFunction& warp() const { return warp_; }

  /// Coordinates entering the metric through sin^2 (polar angles).
  bool is_polar(int coord) const { return n_ == 1 ? coord == 1 : coord == 0; }

 private:
  int n_;
  WarpFunction warp_;
};

inline void check_chart_point(const WarpedSpec& spec, const ChartPoint& p) {
  for (int c = 0; c < 3; ++c) {
    if (!std::isfinite(p[c])) throw std::domain_error("chart point has a non-finite coordinate");
    if (spec.is_polar(c) &&
        !(p[c] > kPoleMargin && p[c] < std::numbers::pi - kPoleMargin)) {
      throw std::domain_error("polar coordinate theta" + std::to_string(c + 1) + " = " +
                              std::to_string(p[c]) + " is within 1e-2 of a pole");
    }
  }
}

namespace detail {

template <int N>
bool depends_on(const Jet<N>& f, int coord) {
  for (int i = 0; i < Jet<N>::kSize; ++i) {
    if (csflow::detail::kMonomials<N>.exponents[i][coord] > 0 && f.coefficient_at(i) != 0.0) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Diagonal metric components as order-3 jets about p.
inline std::array<Jet<3>, 3> metric(const WarpedSpec& spec, const ChartPoint& p) {
  check_chart_point(spec, p);
  const CoordJets x{Jet<3>::variable(p[0], 0), Jet<3>::variable(p[1], 1),
                    Jet<3>::variable(p[2], 2)};
  const Jet<3> f = spec.warp()(x);
  if (!(f.value() > 0.0)) {
    throw std::domain_error("warping function is not positive at the chart point");
  }
  for (int c = spec.base_dim(); c < 3; ++c) {
    if (detail::depends_on(f, c)) {
      throw std::invalid_argument("warping function depends on a fiber coordinate");
    }
  }
  if (spec.base_dim() == 1) {
    const Jet<3> s = sin(x[1]);
    return {Jet<3>(1.0), f, f * s * s};
  }
  const Jet<3> s = sin(x[0]);
  return {Jet<3>(1.0), s * s, f};
}

/// Everything the warped computations need at one chart point.
struct PointGeometry {
  std::array<Jet<3>, 3> g;
  Index3<Jet<2>> gamma;         // [k][i][j] = Gamma^k_ij
  Index3<std::array<Jet<1>, 3>> riemann;  // [l][i][j][k] = R^l_ijk
  Index2<Jet<1>> ricci;         // [j][k]
  Index3<double> gamma_dot;     // [k][i][j], time-zero derivative under dg/dt = -2 Ric
};

inline Index3<Jet<2>> christoffel_from_metric(const std::array<Jet<3>, 3>& g) {
  Index3<Jet<2>> gamma{};
  std::array<Index2<Jet<2>>, 1> dg{};  // dg[0][a][c] = d_c g_a
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) dg[0][a][c] = partial(g[a], c);
  }
  for (int k = 0; k < 3; ++k) {
    if (!(g[k].value() > 0.0)) throw std::domain_error("singular metric");
    const Jet<2> inv = reciprocal(g[k].truncate<2>());
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Jet<2> s;
        if (j == k) s += dg[0][k][i];
        if (i == k) s += dg[0][k][j];
        if (i == j) s -= dg[0][i][k];
        gamma[k][i][j] = 0.5 * inv * s;
      }
    }
  }
  return gamma;
}

inline PointGeometry compute_geometry(const WarpedSpec& spec, const ChartPoint& p) {
  PointGeometry geo;
  geo.g = metric(spec, p);
  geo.gamma = christoffel_from_metric(geo.g);

  Index3<Jet<1>> gamma1{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gamma1[k][i][j] = geo.gamma[k][i][j].truncate<1>();

  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          Jet<1> r = partial(geo.gamma[l][j][k], i) - partial(geo.gamma[l][i][k], j);
          for (int m = 0; m < 3; ++m) {
            r += gamma1[m][j][k] * gamma1[l][i][m] - gamma1[m][i][k] * gamma1[l][j][m];
          }
          geo.riemann[l][i][j][k] = r;
        }
      }
    }
  }
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      Jet<1> r;
      for (int i = 0; i < 3; ++i) r += geo.riemann[i][i][j][k];
      geo.ricci[j][k] = r;
    }
  }

  // nabla_i R_jk = d_i R_jk - Gamma^m_ij R_mk - Gamma^m_ik R_jm
  Index3<double> nabla_ric{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        double v = geo.ricci[j][k].d(i);
        for (int m = 0; m < 3; ++m) {
          v -= geo.gamma[m][i][j].value() * geo.ricci[m][k].value() +
               geo.gamma[m][i][k].value() * geo.ricci[j][m].value();
        }
        nabla_ric[i][j][k] = v;
      }
    }
  }
  // Gamma_dot^k_ij = -g^{kl} (nabla_i R_jl + nabla_j R_il - nabla_l R_ij)
  for (int k = 0; k < 3; ++k) {
    const double inv = 1.0 / geo.g[k].value();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        geo.gamma_dot[k][i][j] =
            -inv * (nabla_ric[i][j][k] + nabla_ric[j][i][k] - nabla_ric[k][i][j]);
      }
    }
  }
  return geo;
}

inline Index3<Jet<2>> christoffel(const WarpedSpec& spec, const ChartPoint& p) {
  return christoffel_from_metric(metric(spec, p));
}

inline Index2<Jet<1>> ricci_tensor(const WarpedSpec& spec, const ChartPoint& p) {
  return compute_geometry(spec, p).ricci;
}

inline Index3<double> christoffel_dot(const WarpedSpec& spec, const ChartPoint& p) {
  return compute_geometry(spec, p).gamma_dot;
}

/// The variation formula in the form
///   R_il / (g_ii g_ll) (d_i g_jl + d_j g_il - d_l g_ij)
///     - g^{kl} (d_i R_jl + d_j R_il - d_l R_ii),   summed over l,
/// evaluated literally. Its first term carries no k and its last term reads
/// R_ii for R_ij, so it does not agree with christoffel_dot(); it is kept
/// for side-by-side comparison only.
inline Index3<double> christoffel_dot_as_printed(const WarpedSpec& spec, const ChartPoint& p) {
  const PointGeometry geo = compute_geometry(spec, p);
  Index3<double> out{};
  const auto g = [&](int a) { return geo.g[a].value(); };
  const auto dg = [&](int a, int b, int c) { return a == b ? geo.g[a].d(c) : 0.0; };
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int l = 0; l < 3; ++l) {
          v += geo.ricci[i][l].value() / (g(i) * g(l)) *
               (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
          const double inv_kl = k == l ? 1.0 / g(k) : 0.0;
          v -= inv_kl * (geo.ricci[j][l].d(i) + geo.ricci[i][l].d(j) - geo.ricci[i][i].d(l));
        }
        out[k][i][j] = v;
      }
    }
  }
  return out;
}

/// w_i^j = Gamma^j_{ki} dtheta^k with jet coefficients.
inline MatrixForm<Jet<2>> connection_form(const Index3<Jet<2>>& gamma) {
  MatrixForm<Jet<2>> w(1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Form<Jet<2>> f(1);
      for (int k = 0; k < 3; ++k) f[k] = gamma[j][k][i];
      w.set(i, j, f);
    }
  }
  return w;
}

inline MatrixForm<Jet<2>> connection_form(const WarpedSpec& spec, const ChartPoint& p) {
  return connection_form(christoffel(spec, p));
}

/// Omega = dw - w ^ w at the point, through the exterior algebra.
inline MatrixForm<double> curvature_form(const MatrixForm<Jet<2>>& w) {
  const FrameStructure coords = FrameStructure::coordinate();
  const MatrixForm<Jet<1>> w1 = w.map([](const Jet<2>& j) { return j.truncate<1>(); });
  const MatrixForm<Jet<1>> ww = matrix_wedge(w1, w1);
  MatrixForm<double> omega(2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Form<Jet<1>> entry = exterior_derivative(w(i, j), coords) - ww(i, j);
      omega.set(i, j, entry.map([](const Jet<1>& x) { return x.value(); }));
    }
  }
  return omega;
}

inline MatrixForm<double> curvature_form(const WarpedSpec& spec, const ChartPoint& p) {
  return curvature_form(connection_form(spec, p));
}

/// wdot_i^j = Gamma_dot^j_{ki} dtheta^k.
inline MatrixForm<double> omega_dot(const Index3<double>& gamma_dot) {
  MatrixForm<double> w(1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Form<double> f(1);
      for (int k = 0; k < 3; ++k) f[k] = gamma_dot[j][k][i];
      w.set(i, j, f);
    }
  }
  return w;
}

inline MatrixForm<double> omega_dot(const WarpedSpec& spec, const ChartPoint& p) {
  return omega_dot(christoffel_dot(spec, p));
}

struct Residuals {
  double trace_product = 0.0;  // coefficient of tr(wdot) ^ tr(Omega)
  double trace_wedge = 0.0;    // coefficient of tr(wdot ^ Omega)
};

inline Residuals exactness_residuals(const MatrixForm<double>& wdot,
                                     const MatrixForm<double>& omega) {
  return {wedge(trace(wdot), trace(omega)).top(), trace(matrix_wedge(wdot, omega)).top()};
}

inline Residuals exactness_residuals(const WarpedSpec& spec, const ChartPoint& p) {
  const PointGeometry geo = compute_geometry(spec, p);
  return exactness_residuals(omega_dot(geo.gamma_dot),
                             curvature_form(connection_form(geo.gamma)));
}

/// allowed[i][j][pos]: whether entry (i, j) may carry a nonzero coefficient
/// at canonical basis position pos.
using SparsityPattern = std::array<std::array<std::array<bool, 3>, 3>, 3>;

/// Omega_i^j lies in the span of dtheta^i ^ dtheta^j (n = 1); for n = 2 the
/// base block is dtheta^0 ^ dtheta^1 only and the mixed entries are
/// combinations of dtheta^0 ^ dtheta^2 and dtheta^1 ^ dtheta^2.
inline SparsityPattern curvature_pattern(int n) {
  SparsityPattern s{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      if (n == 1 || (i < 2 && j < 2)) {
        s[i][j][csflow::detail::basis_position(2, {std::min(i, j), std::max(i, j)})] = true;
      } else {
        s[i][j][1] = true;  // 02
        s[i][j][2] = true;  // 12
      }
    }
  }
  return s;
}

/// Which dtheta^k may appear in wdot_i^j.
inline SparsityPattern omega_dot_pattern(int n) {
  SparsityPattern s{};
  const auto allow = [&](int i, int j, std::initializer_list<int> ks) {
    for (int k : ks) s[i][j][k] = true;
  };
  if (n == 1) {
    allow(0, 0, {0});
    allow(0, 1, {1});
    allow(0, 2, {2});
    allow(1, 0, {1});
    allow(1, 1, {0});
    allow(2, 0, {2});  // Gamma_dot^0_22 dtheta^2; Gamma_dot^0_02 vanishes
    allow(2, 2, {0});
  } else {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) allow(i, j, {0, 1});
    }
    allow(0, 2, {2});
    allow(1, 2, {2});
    allow(2, 0, {2});
    allow(2, 1, {2});
    allow(2, 2, {0, 1});
  }
  return s;
}

/// The n = 1 pattern with the 1-forms of entries (2, 0) and (2, 2)
/// exchanged (dtheta^0 and dtheta^2 respectively). The computed wdot
/// violates it at generic points.
inline SparsityPattern omega_dot_pattern_swapped_n1() {
  SparsityPattern s = omega_dot_pattern(1);
  s[2][0] = {true, false, false};
  s[2][2] = {false, false, true};
  return s;
}

/// Largest coefficient sitting where the pattern demands a zero, relative to
/// the largest coefficient of the matrix when that exceeds 1.
inline double pattern_violation(const MatrixForm<double>& m, const SparsityPattern& allowed) {
  const double scale = std::max(1.0, m.max_magnitude());
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int pos = 0; pos < m(i, j).size(); ++pos) {
        if (!allowed[i][j][pos]) worst = std::max(worst, std::abs(m(i, j)[pos]));
      }
    }
  }
  return worst / scale;
}

struct GridScanResult {
  double max_trace_product = 0.0;
  double max_trace_wedge = 0.0;
  double max_curvature_pattern_violation = 0.0;
  double max_omega_dot_pattern_violation = 0.0;
  double max_curvature_trace = 0.0;
  std::size_t points = 0;
};

/// Uniform cell-centred chart grid with `resolution` points per axis. Polar
/// angles fill (margin, pi - margin); the other angles fill (0, 2 pi).
inline std::vector<ChartPoint> chart_grid(const WarpedSpec& spec, int resolution) {
  if (resolution < 4) throw std::invalid_argument("grid resolution must be at least 4");
  std::array<std::vector<double>, 3> axes;
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < resolution; ++k) {
      const double u = (k + 0.5) / resolution;
      axes[c].push_back(spec.is_polar(c)
                            ? kPoleMargin + u * (std::numbers::pi - 2.0 * kPoleMargin)
                            : u * 2.0 * std::numbers::pi);
    }
  }
  std::vector<ChartPoint> pts;
  pts.reserve(static_cast<std::size_t>(resolution) * resolution * resolution);
  for (double a : axes[0])
    for (double b : axes[1])
      for (double c : axes[2]) pts.push_back({a, b, c});
  return pts;
}

inline GridScanResult grid_scan(const WarpedSpec& spec, int resolution, unsigned jobs = 0) {
  const std::vector<ChartPoint> pts = chart_grid(spec, resolution);
  const SparsityPattern omega_pat = curvature_pattern(spec.base_dim());
  const SparsityPattern dot_pat = omega_dot_pattern(spec.base_dim());
  const auto parts = parallel_accumulate<GridScanResult>(
      pts.size(), jobs, [] { return GridScanResult{}; },
      [&](std::size_t idx, GridScanResult& acc) {
        const PointGeometry geo = compute_geometry(spec, pts[idx]);
        const MatrixForm<double> omega = curvature_form(connection_form(geo.gamma));
        const MatrixForm<double> wdot = omega_dot(geo.gamma_dot);
        const Residuals r = exactness_residuals(wdot, omega);
        acc.max_trace_product = std::max(acc.max_trace_product, std::abs(r.trace_product));
        acc.max_trace_wedge = std::max(acc.max_trace_wedge, std::abs(r.trace_wedge));
        acc.max_curvature_pattern_violation =
            std::max(acc.max_curvature_pattern_violation, pattern_violation(omega, omega_pat));
        acc.max_omega_dot_pattern_violation =
            std::max(acc.max_omega_dot_pattern_violation, pattern_violation(wdot, dot_pat));
        acc.max_curvature_trace = std::max(acc.max_curvature_trace, trace(omega).max_magnitude());
        ++acc.points;
      });
  GridScanResult total;
  for (const auto& p : parts) {
    total.max_trace_product = std::max(total.max_trace_product, p.max_trace_product);
    total.max_trace_wedge = std::max(total.max_trace_wedge, p.max_trace_wedge);
    total.max_curvature_pattern_violation =
        std::max(total.max_curvature_pattern_violation, p.max_curvature_pattern_violation);
    total.max_omega_dot_pattern_violation =
        std::max(total.max_omega_dot_pattern_violation, p.max_omega_dot_pattern_violation);
    total.max_curvature_trace = std::max(total.max_curvature_trace, p.max_curvature_trace);
    total.points += p.points;
  }
  return total;
}

/// Five built-in warps per base dimension, each smooth and positive on the
/// base sphere.
inline std::vector<WarpFunction> standard_warps(int n) {
  using K = TrigFactor::Kind;
  if (n == 1) {
    return {WarpFunction::trig(2.0, 1.0, {{K::sin, 0, 1}}),
            WarpFunction::trig(2.0, 0.5, {{K::cos, 0, 1}}),
            WarpFunction::trig(2.0, 0.9, {{K::sin, 0, 1}}),
            WarpFunction::trig(3.0, -1.5, {{K::cos, 0, 2}}),
            WarpFunction::trig(1.5, 0.7, {{K::sin, 0, 1}, {K::cos, 0, 1}})};
  }
  if (n == 2) {
    return {WarpFunction::trig(2.0, 0.5, {{K::cos, 0, 1}}),
            WarpFunction::trig(2.0, 0.5, {{K::sin, 0, 1}, {K::cos, 1, 1}}),
            WarpFunction::trig(2.0, -0.9, {{K::sin, 0, 1}, {K::sin, 1, 1}}),
            WarpFunction::trig(3.0, 1.0, {{K::cos, 0, 2}}),
            WarpFunction::trig(2.0, 0.8, {{K::sin, 0, 1}, {K::sin, 0, 1}, {K::cos, 1, 2}})};
  }
  throw std::invalid_argument("base sphere dimension must be 1 or 2");
}

}  // namespace csflow::warped
