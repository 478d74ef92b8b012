#pragma once

// Closed-form geometry of the generalized Berger sphere: S^3 = SU(2) with
// the left-invariant metric for which Xbar_i = X_i / lambda_i is orthonormal,
// where [X_i, X_{i+1}] = 2 X_{i+2} (indices mod 3).
//
// Conventions: nabla_{Xbar_k} Xbar_i = w_i^p(Xbar_k) Xbar_p (row convention),
// so Omega = dw - w ^ w. The coframe thetabar is held fixed when the metric
// evolves; only the lambdas change.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "csflow/chern_simons.hpp"
#include "csflow/exterior_algebra.hpp"

namespace csflow::berger {

using Array3 = std::array<double, 3>;
using Tensor3 = std::array<std::array<std::array<double, 3>, 3>, 3>;

/// Admissible window for user-supplied lambdas; the degree-10 rational
/// functions below lose accuracy outside it.
inline constexpr double kMinLambda = 1e-3;
inline constexpr double kMaxLambda = 1e3;

class BergerParams {
 public:
  BergerParams(double l1, double l2, double l3) : lambda_{l1, l2, l3} {
    for (int i = 0; i < 3; ++i) {
      if (!(lambda_[i] > 0.0) || !std::isfinite(lambda_[i])) {
        throw std::invalid_argument("lambda" + std::to_string(i + 1) +
                                    " must be a positive finite number");
      }
    }
  }
  explicit BergerParams(const Array3& l) : BergerParams(l[0], l[1], l[2]) {}

  double operator[](int i) const { return lambda_[i]; }
  const Array3& lambdas() const { return lambda_; }
  double product() const { return lambda_[0] * lambda_[1] * lambda_[2]; }

  friend bool operator==(const BergerParams&, const BergerParams&) = default;

 private:
  Array3 lambda_;
};

/// Throws unless every lambda lies in [kMinLambda, kMaxLambda].
inline void check_parameter_window(const BergerParams& p) {
  for (int i = 0; i < 3; ++i) {
    if (p[i] < kMinLambda || p[i] > kMaxLambda) {
      throw std::invalid_argument("lambda" + std::to_string(i + 1) + " = " +
                                  std::to_string(p[i]) + " outside [1e-3, 1e3]");
    }
  }
}

/// Sign of the permutation (i j k) of (0 1 2); 0 if any index repeats.
constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

constexpr int third_index(int i, int j) { return 3 - i - j; }

/// [Xbar_i, Xbar_j] = c^k_{ij} Xbar_k with c^k_{ij} = 2 eps_{ijk} lambda_k / (lambda_i lambda_j).
inline FrameStructure structure(const BergerParams& p) {
  FrameStructure::Constants c{};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        c[k][i][j] = 2.0 * levi_civita(i, j, k) * p[k] / (p[i] * p[j]);
      }
    }
  }
  return FrameStructure::lie(c);
}

/// conn[i][j][k] = <nabla_{Xbar_i} Xbar_j, Xbar_k>
///               = eps_{ijk} (-l_i^2 + l_j^2 + l_k^2) / (l_i l_j l_k).
inline Tensor3 connection_coeffs(const BergerParams& p) {
  Tensor3 conn{};
  const double prod = p.product();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const int k = third_index(i, j);
      conn[i][j][k] =
          levi_civita(i, j, k) * (-p[i] * p[i] + p[j] * p[j] + p[k] * p[k]) / prod;
    }
  }
  return conn;
}

/// w_i^j = eps_{ijk} (l_i^2 + l_j^2 - l_k^2) / (l_i l_j l_k) thetabar^k.
inline MatrixForm<double> connection_form(const BergerParams& p) {
  MatrixForm<double> w(1);
  const double prod = p.product();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const int k = third_index(i, j);
      const double c =
          levi_civita(i, j, k) * (p[i] * p[i] + p[j] * p[j] - p[k] * p[k]) / prod;
      w.set(i, j, Form<double>::basis({k}, c));
    }
  }
  w.verify_skew(1e-13 * (1.0 + w.max_magnitude()));
  return w;
}

/// Omega_i^j = K_ij thetabar^i ^ thetabar^j with
/// K_ij = (3 l_k^4 - l_i^4 - l_j^4 + 2 l_i^2 l_j^2 - 2 l_i^2 l_k^2 - 2 l_j^2 l_k^2)
///        / (l_i^2 l_j^2 l_k^2).
/// This sign agrees with dw - w ^ w; the other commonly printed numerator
/// (l_i^4 + l_j^4 - 3 l_k^4 - ...) is its negative, see
/// curvature_form_negated_numerator().
inline MatrixForm<double> curvature_form(const BergerParams& p) {
  MatrixForm<double> omega(2);
  const double denom = p.product() * p.product();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const int k = third_index(i, j);
      const double a = p[i] * p[i], b = p[j] * p[j], c = p[k] * p[k];
      const double num = 3 * c * c - a * a - b * b + 2 * a * b - 2 * a * c - 2 * b * c;
      omega.set(i, j, Form<double>::basis({i, j}, num / denom));
    }
  }
  omega.verify_skew(1e-13 * (1.0 + omega.max_magnitude()));
  return omega;
}

/// The curvature matrix with numerator (l_i^4 + l_j^4 - 3 l_k^4 - 2 l_i^2 l_j^2
/// + 2 l_i^2 l_k^2 + 2 l_j^2 l_k^2), kept only for comparison: it is
/// -curvature_form(p) and does not satisfy the structure equation.
inline MatrixForm<double> curvature_form_negated_numerator(const BergerParams& p) {
  return -1.0 * curvature_form(p);
}

/// Orthonormal-frame Ricci components
/// R_ii = 2 (l_i^4 - l_j^4 - l_k^4 + 2 l_j^2 l_k^2) / (l_i^2 l_j^2 l_k^2);
/// the off-diagonal components vanish in this frame.
inline Array3 ricci(const BergerParams& p) {
  Array3 r{};
  const double denom = p.product() * p.product();
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double a = p[i] * p[i], b = p[j] * p[j], c = p[k] * p[k];
    r[i] = 2.0 * (a * a - b * b - c * c + 2 * b * c) / denom;
  }
  return r;
}

inline double scalar_curvature(const BergerParams& p) {
  const Array3 r = ricci(p);
  return r[0] + r[1] + r[2];
}

/// Time-zero derivative of the connection matrix under the Ricci flow, in
/// the fixed frame Xbar(0):
///   wdot_i^j(Xbar_k) = 2 eps_{kij} [l_i^2 (R_jj - R_ii) + l_k^2 (R_kk - R_jj)]
///                      / (l_i l_j l_k).
/// It follows from differentiating w_i^j(Xbar_k) = <nabla_{Xbar_k} Xbar_i, Xbar_j> / g_jj
/// with d g_aa / dt = -2 R_aa g_aa. It is not skew: the fixed frame stops
/// being orthonormal for t > 0. It vanishes on round spheres.
inline MatrixForm<double> omega_dot(const BergerParams& p) {
  const Array3 r = ricci(p);
  MatrixForm<double> wd(1);
  const double prod = p.product();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const int k = third_index(i, j);
      const double c = 2.0 * levi_civita(k, i, j) *
                       (p[i] * p[i] * (r[j] - r[i]) + p[k] * p[k] * (r[k] - r[j])) / prod;
      wd.set(i, j, Form<double>::basis({k}, c));
    }
  }
  return wd;
}

/// The formula wdot = -2 (R_11 + R_22 + R_33) w as it is usually printed.
/// Kept for comparison only: it is nonzero on the round sphere, where the
/// fixed-frame connection does not change, and it disagrees with the
/// finite-difference oracle.
inline MatrixForm<double> omega_dot_printed(const BergerParams& p) {
  return (-2.0 * scalar_curvature(p)) * connection_form(p);
}

/// Numerator N(a, b, c) of the Chern-Simons derivative in the squares
/// a = l1^2, b = l2^2, c = l3^2:
///   N = sum a^5 - sum_{p != q} a_p^4 a_q + sum_p a_p^3 a_{p+1} a_{p+2}
///     = (a - b)^2 [(a - c)(a^2 + ab + b^2) + b^3] + (a - c)(b - c) c^3.
/// The factored form is evaluated; it is exactly zero when a = b = c.
inline double pontryagin_numerator(double a, double b, double c) {
  return (a - b) * (a - b) * ((a - c) * (a * a + a * b + b * b) + b * b * b) +
         (a - c) * (b - c) * c * c * c;
}

/// Same numerator, term by term from the expanded sum.
inline double pontryagin_numerator_expanded(double a, double b, double c) {
  const std::array<double, 3> s{a, b, c};
  double tenth = 0.0, mixed = 0.0, cyclic = 0.0;
  for (int p = 0; p < 3; ++p) {
    tenth += std::pow(s[p], 5);
    for (int q = 0; q < 3; ++q) {
      if (p != q) mixed += std::pow(s[p], 4) * s[q];
    }
    cyclic += std::pow(s[p], 3) * s[(p + 1) % 3] * s[(p + 2) % 3];
  }
  return tenth - mixed + cyclic;
}

/// Closed-form coefficient of thetabar^1^2^3 in d/dt TP1 at t = 0:
///   16 / (pi^2 l1^5 l2^5 l3^5) * N(l1^2, l2^2, l3^2).
inline double tp1_dot_coefficient(const BergerParams& p) {
  const double prod = p.product();
  const double prod5 = prod * prod * prod * prod * prod;
  return 16.0 / (std::numbers::pi * std::numbers::pi * prod5) *
         pontryagin_numerator(p[0] * p[0], p[1] * p[1], p[2] * p[2]);
}

/// Ratio between the variation pipeline 2 P1(wdot, Omega) and
/// tp1_dot_coefficient; constant over all parameters.
inline constexpr double kPipelineToClosedForm = 4.0;

/// 2 P1(wdot, Omega) coefficient against thetabar^1^2^3, assembled from the
/// connection derivative and the curvature through the exterior algebra.
inline double tp1_dot_pipeline(const BergerParams& p) {
  return tp_dot_integrand(omega_dot(p), curvature_form(p)).top();
}

/// Coefficient of TP1 against the orthonormal coframe thetabar^1^2^3.
inline double cs_density(const BergerParams& p) {
  return cs_invariant_density(transpose(connection_form(p)), transpose(curvature_form(p)));
}

/// Riemannian volume 2 pi^2 l1 l2 l3.
inline double volume(const BergerParams& p) {
  return 2.0 * std::numbers::pi * std::numbers::pi * p.product();
}

/// F(alpha, beta) = N(alpha^2, beta^2, 1), written out term by term.
inline double big_F(double alpha, double beta) {
  const double a = alpha, b = beta;
  return std::pow(a, 10) + std::pow(b, 10) - std::pow(a, 8) * b * b -
         std::pow(b, 8) * a * a - std::pow(a, 8) - std::pow(b, 8) + std::pow(a, 6) * b * b +
         std::pow(b, 6) * a * a + a * a * b * b - a * a - b * b + 1.0;
}

/// The two factorizations of F:
///   variant 1: (a2 - b2)^2 ((a2 - 1)(a2^2 + a2 b2 + b2^2) + b2^3) + (a2 - 1)(b2 - 1)
///   variant 2: the same with alpha and beta exchanged inside the bracket,
/// where a2 = alpha^2, b2 = beta^2.
inline double big_F_factored(double alpha, double beta, int variant) {
  const double a2 = alpha * alpha, b2 = beta * beta;
  const double lead = (a2 - b2) * (a2 - b2);
  const double tail = (a2 - 1.0) * (b2 - 1.0);
  const double quad = a2 * a2 + a2 * b2 + b2 * b2;
  switch (variant) {
    case 1:
      return lead * ((a2 - 1.0) * quad + b2 * b2 * b2) + tail;
    case 2:
      return lead * ((b2 - 1.0) * quad + a2 * a2 * a2) + tail;
    default:
      throw std::invalid_argument("big_F_factored variant must be 1 or 2, got " +
                                  std::to_string(variant));
  }
}

/// (alpha, beta) = (l_max / l_min, l_mid / l_min), both >= 1. The conformal
/// rescaling to l_min = 1 maps the numerator to F(alpha, beta).
inline std::pair<double, double> normalized_pair(const BergerParams& p) {
  Array3 l = p.lambdas();
  std::sort(l.begin(), l.end());
  return {l[2] / l[0], l[1] / l[0]};
}

}  // namespace csflow::berger
