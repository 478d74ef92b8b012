#pragma once

// Chern-Simons transgression form of the first Pontryagin polynomial on a
// 3-manifold, and the first variation integrand.
//
// Matrix conventions: the functions here take connection and curvature
// matrices in the column convention, nabla e_j = e_i w^i_j, for which
// Omega = dw + w ^ w and phi_t below is the curvature of t*w. Frames that
// index as nabla e_i = w_i^j e_j (row convention, Omega = dw - w ^ w) must be
// transposed first. P1 itself is unchanged by transposition, so p1_eval and
// tp_dot_integrand accept either convention.

#include <array>
#include <numbers>
#include <stdexcept>

#include "csflow/exterior_algebra.hpp"

namespace csflow {

/// First Pontryagin polynomial P1(A, B) = (tr A tr B - tr AB) / (2 pi^2).
struct FirstPontryagin {
  static constexpr int degree = 2;
  static constexpr double normalization = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
};

template <typename T>
Form<T> p1_eval(const MatrixForm<T>& a, const MatrixForm<T>& b) {
  if (a.degree() + b.degree() > kDim) {
    throw std::invalid_argument("p1_eval degree overflow");
  }
  const Form<T> traces = wedge(trace(a), trace(b));
  return (traces - trace(matrix_wedge(a, b))) * T(FirstPontryagin::normalization);
}

/// phi_t = t Omega + (t^2 - t)/2 [w, w].
template <typename T>
MatrixForm<T> phi_t(double t, const MatrixForm<T>& connection, const MatrixForm<T>& curvature) {
  if (connection.degree() != 1 || curvature.degree() != 2) {
    throw std::invalid_argument("phi_t needs a 1-form connection and a 2-form curvature");
  }
  return T(t) * curvature + T(0.5 * (t * t - t)) * lie_bracket_form(connection);
}

/// TP1(w) = 2 int_0^1 P1(w ^ phi_t) dt, integrated in closed form: the
/// integrand is t P1(w, Omega) + (t^2 - t)/2 P1(w, [w, w]), and
/// int t = 1/2, int (t^2 - t)/2 = -1/12.
template <typename T>
Form<T> tp_form(const MatrixForm<T>& connection, const MatrixForm<T>& curvature) {
  if (connection.degree() != 1 || curvature.degree() != 2) {
    throw std::invalid_argument("tp_form needs a 1-form connection and a 2-form curvature");
  }
  const Form<T> with_curvature = p1_eval(connection, curvature);
  const Form<T> with_bracket = p1_eval(connection, lie_bracket_form(connection));
  return (with_curvature * T(0.5) - with_bracket * T(1.0 / 12.0)) * T(2.0);
}

/// 2 P1(w_dot, Omega): d/ds TP1(w(s)) modulo exact forms.
template <typename T>
Form<T> tp_dot_integrand(const MatrixForm<T>& connection_dot, const MatrixForm<T>& curvature) {
  if (connection_dot.degree() != 1 || curvature.degree() != 2) {
    throw std::invalid_argument(
        "tp_dot_integrand needs a 1-form variation and a 2-form curvature");
  }
  return p1_eval(connection_dot, curvature) * T(2.0);
}

/// Coefficient of TP1 against theta^0 ^ theta^1 ^ theta^2 for a homogeneous
/// (constant-coefficient) connection.
inline double cs_invariant_density(const MatrixForm<double>& connection,
                                   const MatrixForm<double>& curvature) {
  return tp_form(connection, curvature).top();
}

template <int N>
double cs_invariant_density(const MatrixForm<Jet<N>>& connection,
                            const MatrixForm<Jet<N>>& curvature) {
  const auto constant = [](const MatrixForm<Jet<N>>& m) {
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) {
        for (int b = 0; b < m(i, j).size(); ++b) {
          if (m(i, j)[b].max_derivative_magnitude() != 0.0) return false;
        }
      }
    }
    return true;
  };
  if (!constant(connection) || !constant(curvature)) {
    throw std::invalid_argument("Chern-Simons density is position-dependent here");
  }
  const auto values = [](const Jet<N>& j) { return j.value(); };
  return cs_invariant_density(connection.map(values), curvature.map(values));
}

}  // namespace csflow
