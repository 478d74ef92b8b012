#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace csflow {

namespace detail {

// Monomials x1^e1 x2^e2 x3^e3 with e1+e2+e3 <= N, ordered by total degree
// and then lexicographically (descending e1, e2).
template <int N>
struct MonomialTable {
  static constexpr int kSize = (N + 1) * (N + 2) * (N + 3) / 6;

  std::array<std::array<int, 3>, kSize> exponents{};

  constexpr MonomialTable() {
    int idx = 0;
    for (int deg = 0; deg <= N; ++deg) {
      for (int a = deg; a >= 0; --a) {
        for (int b = deg - a; b >= 0; --b) {
          exponents[idx++] = {a, b, deg - a - b};
        }
      }
    }
  }

  constexpr int index_of(int a, int b, int c) const {
    if (a < 0 || b < 0 || c < 0 || a + b + c > N) return -1;
    for (int i = 0; i < kSize; ++i) {
      if (exponents[i][0] == a && exponents[i][1] == b && exponents[i][2] == c) {
        return i;
      }
    }
    return -1;
  }
};

template <int N>
inline constexpr MonomialTable<N> kMonomials{};

template <int N>
struct ProductTable {
  static constexpr int kSize = MonomialTable<N>::kSize;
  // product[i][j] = index of monomial_i * monomial_j, or -1 if truncated.
  std::array<std::array<int, kSize>, kSize> product{};

  constexpr ProductTable() {
    const auto& m = kMonomials<N>;
    for (int i = 0; i < kSize; ++i) {
      for (int j = 0; j < kSize; ++j) {
        product[i][j] = m.index_of(m.exponents[i][0] + m.exponents[j][0],
                                   m.exponents[i][1] + m.exponents[j][1],
                                   m.exponents[i][2] + m.exponents[j][2]);
      }
    }
  }
};

template <int N>
inline constexpr ProductTable<N> kProducts{};

constexpr double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace detail

/// Truncated Taylor expansion of a smooth function of three coordinates
/// about a fixed point, exact through total order N.
///
/// Arithmetic on jets is arithmetic on the underlying functions, truncated
/// at order N, so derivatives of composite expressions (metric components,
/// Christoffel symbols, curvature) come out exactly, not by differencing.
/// Taking a partial derivative lowers the order by one, which the type
/// tracks: the derivative of a Jet<N> is a Jet<N - 1>.
template <int N>
class Jet {
  static_assert(N >= 0 && N <= 6, "jet order out of supported range");

 public:
  static constexpr int kOrder = N;
  static constexpr int kSize = detail::MonomialTable<N>::kSize;

  constexpr Jet() = default;
  constexpr Jet(double value) { c_[0] = value; }  // NOLINT(implicit)

  /// The coordinate function x_index evaluated about `value`.
  static constexpr Jet variable(double value, int index) {
    Jet j(value);
    if constexpr (N >= 1) {
      j.c_[detail::kMonomials<N>.index_of(index == 0, index == 1, index == 2)] = 1.0;
    }
    return j;
  }

  constexpr double value() const { return c_[0]; }

  /// Raw Taylor coefficient of x^a y^b z^c.
  constexpr double coefficient(int a, int b, int c) const {
    const int i = detail::kMonomials<N>.index_of(a, b, c);
    return i < 0 ? 0.0 : c_[i];
  }
  constexpr double coefficient_at(int i) const { return c_[i]; }
  constexpr double& coefficient_at(int i) { return c_[i]; }

  /// Mixed partial derivative with the given multiplicities per coordinate.
  constexpr double partial_derivative(int a, int b, int c) const {
    return coefficient(a, b, c) * detail::factorial(a) * detail::factorial(b) *
           detail::factorial(c);
  }
  double d(int i) const { return partial_derivative(i == 0, i == 1, i == 2); }
  double d(int i, int j) const {
    std::array<int, 3> e{};
    ++e[i];
    ++e[j];
    return partial_derivative(e[0], e[1], e[2]);
  }
  double d(int i, int j, int k) const {
    std::array<int, 3> e{};
    ++e[i];
    ++e[j];
    ++e[k];
    return partial_derivative(e[0], e[1], e[2]);
  }

  /// Largest absolute Taylor coefficient of positive order.
  double max_derivative_magnitude() const {
    double m = 0.0;
    for (int i = 1; i < kSize; ++i) m = std::max(m, std::abs(c_[i]));
    return m;
  }

  template <int M>
  constexpr Jet<M> truncate() const {
    static_assert(M <= N);
    Jet<M> out;
    for (int i = 0; i < Jet<M>::kSize; ++i) out.coefficient_at(i) = c_[i];
    return out;
  }

  constexpr Jet& operator+=(const Jet& o) {
    for (int i = 0; i < kSize; ++i) c_[i] += o.c_[i];
    return *this;
  }
  constexpr Jet& operator-=(const Jet& o) {
    for (int i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  constexpr Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  constexpr Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend constexpr Jet operator-(Jet a) { return a *= -1.0; }
  friend constexpr Jet operator*(Jet a, double s) { return a *= s; }
  friend constexpr Jet operator*(double s, Jet a) { return a *= s; }
  friend constexpr Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend constexpr Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    const auto& table = detail::kProducts<N>.product;
    for (int i = 0; i < kSize; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (int j = 0; j < kSize; ++j) {
        const int k = table[i][j];
        if (k >= 0) out.c_[k] += a.c_[i] * b.c_[j];
      }
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double a, const Jet& b) { return a * reciprocal(b); }

  /// f(jet) from the derivatives f(v), f'(v), ..., f^(N)(v) at v = value().
  friend Jet compose(const Jet& x, const std::array<double, N + 1>& derivs) {
    Jet h = x;
    h.c_[0] = 0.0;
    Jet out(derivs[0]);
    Jet power(1.0);
    for (int k = 1; k <= N; ++k) {
      power = power * h;
      out += power * (derivs[k] / detail::factorial(k));
    }
    return out;
  }

  friend Jet sin(const Jet& x) {
    std::array<double, N + 1> d{};
    const double s = std::sin(x.value()), c = std::cos(x.value());
    const std::array<double, 4> cycle{s, c, -s, -c};
    for (int k = 0; k <= N; ++k) d[k] = cycle[k % 4];
    return compose(x, d);
  }

  friend Jet cos(const Jet& x) {
    std::array<double, N + 1> d{};
    const double s = std::sin(x.value()), c = std::cos(x.value());
    const std::array<double, 4> cycle{c, -s, -c, s};
    for (int k = 0; k <= N; ++k) d[k] = cycle[k % 4];
    return compose(x, d);
  }

  friend Jet reciprocal(const Jet& x) {
    const double v = x.value();
    if (v == 0.0) throw std::domain_error("reciprocal of a jet with zero value");
    std::array<double, N + 1> d{};
    double term = 1.0 / v;
    for (int k = 0; k <= N; ++k) {
      d[k] = term;
      term *= -(k + 1) / v;
    }
    return compose(x, d);
  }

 private:
  std::array<double, kSize> c_{};
};

/// Partial derivative with respect to coordinate `i`; loses one order.
template <int N>
Jet<N - 1> partial(const Jet<N>& f, int i) {
  static_assert(N >= 1, "cannot differentiate an order-0 jet");
  Jet<N - 1> out;
  const auto& lower = detail::kMonomials<N - 1>;
  for (int idx = 0; idx < Jet<N - 1>::kSize; ++idx) {
    auto e = lower.exponents[idx];
    const double mult = e[i] + 1;
    ++e[i];
    out.coefficient_at(idx) = mult * f.coefficient(e[0], e[1], e[2]);
  }
  return out;
}

template <typename T>
struct is_jet : std::false_type {};
template <int N>
struct is_jet<Jet<N>> : std::true_type {};

/// Scalar value of a coefficient, for double or jet coefficients.
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) {
  return x.value();
}

/// Magnitude used for zero and skew-symmetry tests.
inline double magnitude(double x) { return std::abs(x); }
template <int N>
double magnitude(const Jet<N>& x) {
  double m = std::abs(x.value());
  return std::max(m, x.max_derivative_magnitude());
}

}  // namespace csflow
