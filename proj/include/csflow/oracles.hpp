#pragma once

// Independent reference computations. Nothing in the production path calls
// these; they recompute the same quantities by a different route (Koszul
// from brackets, direct R(X,Y)Z, finite differences in time and space,
// Gauss-Legendre quadrature) so that the closed forms can be checked.

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "csflow/berger.hpp"
#include "csflow/chern_simons.hpp"
#include "csflow/exterior_algebra.hpp"
#include "csflow/ricci_flow.hpp"
#include "csflow/warped.hpp"

namespace csflow::oracle {

using berger::Array3;
using berger::BergerParams;
using berger::Tensor3;
using Matrix3 = std::array<Array3, 3>;

/// Structure constants of the frame l_i^{-1} X_i from the su(2) brackets
/// [X_1, X_2] = 2 X_3 (cyclic), by bilinearity.
inline FrameStructure::Constants bracket_constants(const Array3& lambda) {
  FrameStructure::Constants c{};
  const auto su2 = [](int i, int j, int k) {
    if (i == j) return 0.0;
    if (k != 3 - i - j) return 0.0;
    return (j == (i + 1) % 3) ? 2.0 : -2.0;
  };
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[k][i][j] = su2(i, j, k) * lambda[k] / (lambda[i] * lambda[j]);
  return c;
}

/// Levi-Civita coefficients <nabla_{e_i} e_j, e_k> of a left-invariant frame
/// with constant diagonal metric g_aa = mu_a, by the Koszul formula
///   2 <nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>.
inline Tensor3 koszul(const FrameStructure::Constants& c, const Array3& mu = {1.0, 1.0, 1.0}) {
  Tensor3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        out[i][j][k] = 0.5 * (c[k][i][j] * mu[k] - c[i][j][k] * mu[i] + c[j][k][i] * mu[j]);
  return out;
}

/// Row-convention connection matrix w_i^j(e_k) = <nabla_{e_k} e_i, e_j> / g_jj.
inline MatrixForm<double> connection_matrix(const Tensor3& koszul_coeffs,
                                            const Array3& mu = {1.0, 1.0, 1.0}) {
  MatrixForm<double> w(1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Form<double> f(1);
      for (int k = 0; k < 3; ++k) f[k] = koszul_coeffs[k][i][j] / mu[j];
      w.set(i, j, f);
    }
  }
  return w;
}

/// Omega = dw - w ^ w on the Lie frame.
inline MatrixForm<double> structure_equation(const MatrixForm<double>& w, const FrameStructure& fs) {
  MatrixForm<double> omega(2);
  const MatrixForm<double> ww = matrix_wedge(w, w);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) omega.set(i, j, exterior_derivative(w(i, j), fs) - ww(i, j));
  return omega;
}

/// Ricci diagonal of an orthonormal left-invariant frame from
/// R(X_a, X_b) X_c = nabla_a nabla_b X_c - nabla_b nabla_a X_c - nabla_[a,b] X_c,
/// Ric(X_b, X_b) = sum_a <R(X_a, X_b) X_b, X_a>.
inline Array3 ricci_direct(const FrameStructure::Constants& c) {
  const Tensor3 gam = koszul(c);  // nabla_a X_c = gam[a][c][m] X_m
  const auto riem = [&](int a, int b, int cc, int n) {
    double v = 0.0;
    for (int m = 0; m < 3; ++m) {
      v += gam[b][cc][m] * gam[a][m][n] - gam[a][cc][m] * gam[b][m][n];
      v -= c[m][a][b] * gam[m][cc][n];
    }
    return v;
  };
  Array3 r{};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) r[b] += riem(a, b, b, a);
  return r;
}

/// Connection matrix against the fixed frame of `start` after the metric has
/// moved to `now` (g_aa = (now_a / start_a)^2 on the fixed frame).
inline MatrixForm<double> fixed_frame_connection(const BergerParams& start,
                                                 const BergerParams& now) {
  Array3 mu{};
  for (int a = 0; a < 3; ++a) mu[a] = (now[a] / start[a]) * (now[a] / start[a]);
  const auto c = bracket_constants(start.lambdas());
  return connection_matrix(koszul(c, mu), mu);
}

/// Central difference of f(t) at 0, sampled along the Ricci flow, with one
/// Richardson extrapolation step. f takes the flowed parameters.
template <class Value, class F>
Value flow_derivative(const BergerParams& p, double h, F&& f) {
  const auto central = [&](double step) {
    BergerParams fwd = p, bwd = p;
    flow::flow_step(p, step, false, fwd);
    flow::flow_step(p, -step, false, bwd);
    return (1.0 / (2.0 * step)) * (f(fwd) - f(bwd));
  };
  const Value coarse = central(h);
  const Value fine = central(h / 2);
  return (1.0 / 3.0) * (4.0 * fine - coarse);
}

/// d/dt of the fixed-frame connection matrix at t = 0.
inline MatrixForm<double> omega_dot_fd(const BergerParams& p, double h = 1e-4) {
  return flow_derivative<MatrixForm<double>>(
      p, h, [&](const BergerParams& q) { return fixed_frame_connection(p, q); });
}

/// d/dt at t = 0 of the Chern-Simons density against the fixed coframe,
/// c(l(t)) V(t) / V(0).
inline double cs_density_rate_fd(const BergerParams& p, double h = 1e-4) {
  const double v0 = berger::volume(p);
  return flow_derivative<double>(p, h, [&](const BergerParams& q) {
    return berger::cs_density(q) * berger::volume(q) / v0;
  });
}

/// TP1 = 2 int_0^1 P1(w ^ phi_t) dt by 16-point Gauss-Legendre quadrature,
/// for column-convention matrices. Returns the top coefficient.
inline double tp_quadrature(const MatrixForm<double>& connection,
                            const MatrixForm<double>& curvature) {
  const auto integrand = [&](double t) {
    return 2.0 * p1_eval(connection, phi_t(t, connection, curvature)).top();
  };
  return boost::math::quadrature::gauss<double, 16>::integrate(integrand, 0.0, 1.0);
}

/// Round-sphere solution of the unnormalized flow: l(t) = sqrt(l0^2 - 4 t).
inline double round_sphere_lambda(double lambda0, double t) {
  return std::sqrt(lambda0 * lambda0 - 4.0 * t);
}

inline Matrix3 inverse(const Matrix3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Matrix3 inv{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int a = (j + 1) % 3, b = (j + 2) % 3, c = (i + 1) % 3, d = (i + 2) % 3;
      inv[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
    }
  }
  return inv;
}

/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), full metric.
inline warped::Index3<double> christoffel_from(const Matrix3& g,
                                               const std::array<Matrix3, 3>& dg) {
  const Matrix3 inv = inverse(g);
  warped::Index3<double> out{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int l = 0; l < 3; ++l) {
          v += inv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        }
        out[k][i][j] = 0.5 * v;
      }
  return out;
}

inline Matrix3 metric_values(const warped::WarpedSpec& spec, const warped::ChartPoint& p) {
  const auto g = warped::metric(spec, p);
  Matrix3 m{};
  for (int a = 0; a < 3; ++a) m[a][a] = g[a].value();
  return m;
}

/// Richardson-extrapolated central difference of a matrix-valued function of
/// the chart point along coordinate c.
template <class F>
Matrix3 coordinate_derivative(const warped::ChartPoint& p, int c, double h, F&& f) {
  const auto central = [&](double step) {
    warped::ChartPoint a = p, b = p;
    a[c] += step;
    b[c] -= step;
    const Matrix3 fa = f(a), fb = f(b);
    Matrix3 d{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) d[i][j] = (fa[i][j] - fb[i][j]) / (2.0 * step);
    return d;
  };
  const Matrix3 coarse = central(h), fine = central(h / 2);
  Matrix3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
  return out;
}

/// Christoffel symbols from finite differences of the metric values.
inline warped::Index3<double> christoffel_fd(const warped::WarpedSpec& spec,
                                             const warped::ChartPoint& p, double h = 1e-3) {
  std::array<Matrix3, 3> dg{};
  const auto g = [&](const warped::ChartPoint& q) { return metric_values(spec, q); };
  for (int c = 0; c < 3; ++c) dg[c] = coordinate_derivative(p, c, h, g);
  return christoffel_from(metric_values(spec, p), dg);
}

/// Gamma_dot by differencing the Christoffel symbols of g - 2 s Ric and
/// g + 2 s Ric, with d Ric from finite differences of Ricci values.
inline warped::Index3<double> christoffel_dot_fd(const warped::WarpedSpec& spec,
                                                 const warped::ChartPoint& p,
                                                 double s = 1e-4, double h = 1e-3) {
  const auto ric = [&](const warped::ChartPoint& q) {
    const auto r = warped::ricci_tensor(spec, q);
    Matrix3 m{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = r[i][j].value();
    return m;
  };
  const auto metric_at = [&](const warped::ChartPoint& q) { return metric_values(spec, q); };
  const Matrix3 g = metric_at(p), r = ric(p);
  std::array<Matrix3, 3> dg{}, dr{};
  for (int c = 0; c < 3; ++c) {
    dg[c] = coordinate_derivative(p, c, h, metric_at);
    dr[c] = coordinate_derivative(p, c, h, ric);
  }
  const auto gamma_at = [&](double t) {
    Matrix3 gt = g;
    std::array<Matrix3, 3> dgt = dg;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        gt[i][j] -= 2.0 * t * r[i][j];
        for (int c = 0; c < 3; ++c) dgt[c][i][j] -= 2.0 * t * dr[c][i][j];
      }
    return christoffel_from(gt, dgt);
  };
  const auto plus = gamma_at(s), minus = gamma_at(-s);
  warped::Index3<double> out{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[k][i][j] = (plus[k][i][j] - minus[k][i][j]) / (2.0 * s);
  return out;
}

}  // namespace csflow::oracle
