#pragma once

// Differential forms on a 3-manifold written in a fixed (co)frame
// theta^0, theta^1, theta^2. Coefficients are a ring type T: plain doubles
// for left-invariant forms on a Lie group, or jets (csflow::Jet<N>) for
// coordinate expressions evaluated about a chart point.
//
// Indices are 0-based throughout: theta^0 is the first coframe element.

#include <algorithm>
#include <array>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "csflow/jet.hpp"

namespace csflow {

inline constexpr int kDim = 3;

using Point3 = std::array<double, 3>;

namespace detail {

inline constexpr std::array<int, 4> kBasisCount{1, 3, 3, 1};

// Strictly increasing index tuples of each degree, in canonical order.
inline constexpr std::array<std::array<std::array<int, 3>, 3>, 4> kBasis{{
    {{{}, {}, {}}},
    {{{0}, {1}, {2}}},
    {{{0, 1}, {0, 2}, {1, 2}}},
    {{{0, 1, 2}, {}, {}}},
}};

/// Position of a sorted index tuple among the canonical basis of its degree.
constexpr int basis_position(int degree, const std::array<int, 3>& sorted) {
  for (int b = 0; b < kBasisCount[degree]; ++b) {
    bool same = true;
    for (int m = 0; m < degree; ++m) same = same && kBasis[degree][b][m] == sorted[m];
    if (same) return b;
  }
  return -1;
}

struct Signed {
  int sign;      // 0 when the product vanishes
  int position;  // canonical basis position in the result degree
};

/// Sort `idx[0..n)` in place, returning the permutation sign (0 on repeats).
constexpr int sort_with_sign(std::array<int, 3>& idx, int n) {
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < n - i; ++j) {
      if (idx[j] == idx[j + 1]) return 0;
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (idx[i] == idx[i + 1]) return 0;
  }
  return sign;
}

constexpr Signed wedge_basis(int p, int a, int q, int b) {
  std::array<int, 3> merged{};
  for (int m = 0; m < p; ++m) merged[m] = kBasis[p][a][m];
  for (int m = 0; m < q; ++m) merged[p + m] = kBasis[q][b][m];
  const int sign = sort_with_sign(merged, p + q);
  if (sign == 0) return {0, 0};
  return {sign, basis_position(p + q, merged)};
}

}  // namespace detail

/// A degree-k form sum_I coeff_I theta^I over the canonical increasing
/// multi-indices I. Exactly C(3, k) coefficients exist.
template <typename T>
class Form {
 public:
  Form() = default;
  explicit Form(int degree) : degree_(degree) {
    if (degree < 0 || degree > kDim) {
      throw std::invalid_argument("form degree must lie in [0, 3], got " +
                                  std::to_string(degree));
    }
  }

  /// c * theta^{i_1} ^ ... ^ theta^{i_k}, reordered to canonical form with
  /// the permutation sign; a repeated index yields the zero form.
  static Form basis(std::initializer_list<int> indices, const T& c = T(1.0)) {
    Form f(static_cast<int>(indices.size()));
    std::array<int, 3> idx{};
    int n = 0;
    for (int i : indices) {
      if (i < 0 || i >= kDim) throw std::invalid_argument("coframe index out of range");
      idx[n++] = i;
    }
    const int sign = detail::sort_with_sign(idx, n);
    if (sign == 0) return f;
    f.coeffs_[detail::basis_position(n, idx)] = sign > 0 ? c : T(-1.0) * c;
    return f;
  }

  static Form scalar(const T& c) {
    Form f(0);
    f.coeffs_[0] = c;
    return f;
  }

  int degree() const { return degree_; }
  int size() const { return detail::kBasisCount[degree_]; }

  /// Coefficient at canonical basis position `pos`.
  const T& operator[](int pos) const { return coeffs_[pos]; }
  T& operator[](int pos) { return coeffs_[pos]; }

  /// Coefficient of theta^{indices} in the given (not necessarily sorted)
  /// order, i.e. the value of the form on (e_{i_1}, ..., e_{i_k}).
  T component(std::initializer_list<int> indices) const {
    if (static_cast<int>(indices.size()) != degree_) {
      throw std::invalid_argument("component arity does not match form degree");
    }
    std::array<int, 3> idx{};
    int n = 0;
    for (int i : indices) idx[n++] = i;
    const int sign = detail::sort_with_sign(idx, n);
    if (sign == 0) return T{};
    const T& c = coeffs_[detail::basis_position(n, idx)];
    return sign > 0 ? c : T(-1.0) * c;
  }

  /// Coefficient of a top-degree form against theta^0 ^ theta^1 ^ theta^2.
  const T& top() const {
    if (degree_ != kDim) throw std::invalid_argument("top() requires a 3-form");
    return coeffs_[0];
  }

  template <typename F>
  auto map(F&& f) const {
    using U = std::decay_t<decltype(f(coeffs_[0]))>;
    Form<U> out(degree_);
    for (int i = 0; i < size(); ++i) out[i] = f(coeffs_[i]);
    return out;
  }

  Form& operator+=(const Form& o) {
    require_same_degree(o);
    for (int i = 0; i < size(); ++i) coeffs_[i] = coeffs_[i] + o.coeffs_[i];
    return *this;
  }
  Form& operator-=(const Form& o) {
    require_same_degree(o);
    for (int i = 0; i < size(); ++i) coeffs_[i] = coeffs_[i] - o.coeffs_[i];
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(const Form& a) { return a * T(-1.0); }
  friend Form operator*(const Form& a, const T& s) {
    Form out(a.degree_);
    for (int i = 0; i < a.size(); ++i) out.coeffs_[i] = a.coeffs_[i] * s;
    return out;
  }
  friend Form operator*(const T& s, const Form& a) { return a * s; }

  double max_magnitude() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m = std::max(m, magnitude(coeffs_[i]));
    return m;
  }
  bool is_zero(double tol = 0.0) const { return max_magnitude() <= tol; }

 private:
  void require_same_degree(const Form& o) const {
    if (o.degree_ != degree_) {
      throw std::invalid_argument("cannot add forms of degrees " + std::to_string(degree_) +
                                  " and " + std::to_string(o.degree_));
    }
  }

  int degree_ = 0;
  std::array<T, 3> coeffs_{};
};

/// theta^i as a 1-form with unit coefficient.
template <typename T = double>
Form<T> theta(int i) {
  return Form<T>::basis({i});
}

/// Graded-anticommutative exterior product in the coframe basis.
template <typename T>
Form<T> wedge(const Form<T>& a, const Form<T>& b) {
  const int p = a.degree(), q = b.degree();
  if (p + q > kDim) {
    throw std::invalid_argument("wedge degree overflow: " + std::to_string(p) + " + " +
                                std::to_string(q) + " > 3");
  }
  Form<T> out(p + q);
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const auto s = detail::wedge_basis(p, i, q, j);
      if (s.sign == 0) continue;
      const T prod = a[i] * b[j];
      out[s.position] = s.sign > 0 ? out[s.position] + prod : out[s.position] - prod;
    }
  }
  return out;
}

/// 3x3 matrix of forms of one common degree (connection, curvature, ...).
template <typename T>
class MatrixForm {
 public:
  using Entries = std::array<std::array<Form<T>, 3>, 3>;

  explicit MatrixForm(int degree = 0) : degree_(degree) {
    for (auto& row : entries_) row.fill(Form<T>(degree));
  }

  explicit MatrixForm(Entries entries) : entries_(std::move(entries)) {
    degree_ = entries_[0][0].degree();
    for (const auto& row : entries_) {
      for (const auto& e : row) {
        if (e.degree() != degree_) {
          throw std::invalid_argument("matrix form entries must share one degree");
        }
      }
    }
  }

  static MatrixForm identity() {
    MatrixForm m(0);
    for (int i = 0; i < kDim; ++i) m.entries_[i][i] = Form<T>::scalar(T(1.0));
    return m;
  }

  int degree() const { return degree_; }
  const Form<T>& operator()(int i, int j) const { return entries_[i][j]; }

  /// Replace one entry; clears any verified skew-symmetry.
  void set(int i, int j, Form<T> f) {
    if (f.degree() != degree_) {
      throw std::invalid_argument("entry degree does not match matrix form degree");
    }
    entries_[i][j] = std::move(f);
    skew_ = false;
  }

  /// Largest |A_i^j + A_j^i| component.
  double skew_defect() const {
    double m = 0.0;
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) {
        m = std::max(m, (entries_[i][j] + entries_[j][i]).max_magnitude());
      }
    }
    return m;
  }

  /// Checks A_i^j = -A_j^i to `tol` and records it; throws if violated.
  MatrixForm& verify_skew(double tol = 0.0) {
    const double defect = skew_defect();
    if (defect > tol) {
      throw std::invalid_argument("matrix form is not skew-symmetric (defect " +
                                  std::to_string(defect) + ")");
    }
    skew_ = true;
    return *this;
  }
  bool skew_verified() const { return skew_; }

  template <typename F>
  auto map(F&& f) const {
    using U = std::decay_t<decltype(f(entries_[0][0][0]))>;
    typename MatrixForm<U>::Entries out;
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) out[i][j] = entries_[i][j].map(f);
    }
    return MatrixForm<U>(std::move(out));
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& row : entries_) {
      for (const auto& e : row) m = std::max(m, e.max_magnitude());
    }
    return m;
  }

  friend MatrixForm operator+(const MatrixForm& a, const MatrixForm& b) {
    return combine(a, b, [](const Form<T>& x, const Form<T>& y) { return x + y; });
  }
  friend MatrixForm operator-(const MatrixForm& a, const MatrixForm& b) {
    return combine(a, b, [](const Form<T>& x, const Form<T>& y) { return x - y; });
  }
  friend MatrixForm operator*(const T& s, const MatrixForm& a) {
    MatrixForm out(a.degree_);
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) out.entries_[i][j] = a.entries_[i][j] * s;
    }
    out.skew_ = a.skew_;
    return out;
  }

 private:
  template <typename Op>
  static MatrixForm combine(const MatrixForm& a, const MatrixForm& b, Op op) {
    if (a.degree_ != b.degree_) {
      throw std::invalid_argument("matrix forms of different degree");
    }
    MatrixForm out(a.degree_);
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) out.entries_[i][j] = op(a.entries_[i][j], b.entries_[i][j]);
    }
    out.skew_ = a.skew_ && b.skew_;
    return out;
  }

  int degree_ = 0;
  Entries entries_{};
  bool skew_ = false;
};

/// (A ^ B)_i^j = sum_p A_i^p ^ B_p^j.
template <typename T>
MatrixForm<T> matrix_wedge(const MatrixForm<T>& a, const MatrixForm<T>& b) {
  if (a.degree() + b.degree() > kDim) {
    throw std::invalid_argument("matrix_wedge degree overflow");
  }
  typename MatrixForm<T>::Entries out;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      Form<T> acc(a.degree() + b.degree());
      for (int p = 0; p < kDim; ++p) acc += wedge(a(i, p), b(p, j));
      out[i][j] = acc;
    }
  }
  return MatrixForm<T>(std::move(out));
}

template <typename T>
Form<T> trace(const MatrixForm<T>& a) {
  Form<T> acc(a.degree());
  for (int p = 0; p < kDim; ++p) acc += a(p, p);
  return acc;
}

template <typename T>
MatrixForm<T> transpose(const MatrixForm<T>& a) {
  typename MatrixForm<T>::Entries out;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) out[i][j] = a(j, i);
  }
  return MatrixForm<T>(std::move(out));
}

/// [w, w] = 2 w ^ w for a matrix of 1-forms.
template <typename T>
MatrixForm<T> lie_bracket_form(const MatrixForm<T>& w) {
  if (w.degree() != 1) {
    throw std::invalid_argument("lie_bracket_form needs a matrix of 1-forms");
  }
  return T(2.0) * matrix_wedge(w, w);
}

enum class FrameKind { coordinate, lie };

/// Structure constants c^k_{ij} of the frame, [e_i, e_j] = c^k_{ij} e_k.
/// Coordinate frames have all constants zero.
class FrameStructure {
 public:
  using Constants = std::array<std::array<std::array<double, 3>, 3>, 3>;  // [k][i][j]

  static FrameStructure coordinate() { return FrameStructure(FrameKind::coordinate, {}); }

  static FrameStructure lie(const Constants& c, double tol = 0.0) {
    for (int k = 0; k < kDim; ++k) {
      for (int i = 0; i < kDim; ++i) {
        for (int j = 0; j < kDim; ++j) {
          if (std::abs(c[k][i][j] + c[k][j][i]) > tol) {
            throw std::invalid_argument("structure constants must be antisymmetric in (i, j)");
          }
        }
      }
    }
    return FrameStructure(FrameKind::lie, c);
  }

  FrameKind kind() const { return kind_; }
  double operator()(int k, int i, int j) const { return c_[k][i][j]; }
  const Constants& constants() const { return c_; }

  /// d theta^k = -1/2 c^k_{ij} theta^i ^ theta^j.
  Form<double> d_theta(int k) const {
    Form<double> out(2);
    for (int i = 0; i < kDim; ++i) {
      for (int j = i + 1; j < kDim; ++j) {
        out += Form<double>::basis({i, j}, -c_[k][i][j]);
      }
    }
    return out;
  }

  /// d of the canonical basis element at `position` of degree `degree`.
  Form<double> d_basis(int degree, int position) const {
    const auto& idx = detail::kBasis[degree][position];
    switch (degree) {
      case 0:
        return Form<double>(1);
      case 1:
        return d_theta(idx[0]);
      case 2:
        return wedge(d_theta(idx[0]), theta(idx[1])) - wedge(theta(idx[0]), d_theta(idx[1]));
      default:
        throw std::invalid_argument("exterior derivative of a 3-form on a 3-manifold");
    }
  }

 private:
  FrameStructure(FrameKind kind, const Constants& c) : kind_(kind), c_(c) {}

  FrameKind kind_;
  Constants c_{};
};

/// d of a constant-coefficient form: only the frame's structure contributes.
inline Form<double> exterior_derivative(const Form<double>& a, const FrameStructure& fs) {
  if (a.degree() > 2) throw std::invalid_argument("exterior derivative of a 3-form");
  Form<double> out(a.degree() + 1);
  if (fs.kind() == FrameKind::coordinate) return out;
  for (int b = 0; b < a.size(); ++b) {
    if (a[b] != 0.0) out += fs.d_basis(a.degree(), b) * a[b];
  }
  return out;
}

/// d of a form whose coefficients are jets about a chart point. Along a
/// coordinate coframe d(f theta^I) = df ^ theta^I; on a Lie coframe the jet
/// coefficients must be constant, since frame derivatives are not
/// coordinate derivatives there.
template <int N>
Form<Jet<N - 1>> exterior_derivative(const Form<Jet<N>>& a, const FrameStructure& fs) {
  using Lower = Jet<N - 1>;
  if (a.degree() > 2) throw std::invalid_argument("exterior derivative of a 3-form");
  Form<Lower> out(a.degree() + 1);
  for (int b = 0; b < a.size(); ++b) {
    const auto& idx = detail::kBasis[a.degree()][b];
    if (fs.kind() == FrameKind::coordinate) {
      for (int k = 0; k < kDim; ++k) {
        Form<Lower> term = Form<Lower>::basis({k}, partial(a[b], k));
        Form<Lower> rest = Form<Lower>::scalar(Lower(1.0));
        for (int m = 0; m < a.degree(); ++m) rest = wedge(rest, theta<Lower>(idx[m]));
        out += wedge(term, rest);
      }
    } else {
      if (a[b].max_derivative_magnitude() != 0.0) {
        throw std::invalid_argument("non-constant coefficients on a Lie coframe");
      }
      const Form<double> db = fs.d_basis(a.degree(), b);
      for (int p = 0; p < db.size(); ++p) {
        out[p] = out[p] + Lower(db[p] * a[b].value());
      }
    }
  }
  return out;
}

/// A coefficient field: either a constant or a function of the chart point
/// that supplies its jet through third order.
class ScalarField {
 public:
  using Evaluator = std::function<Jet<3>(const Point3&)>;

  ScalarField() = default;
  ScalarField(double c) : impl_(c) {}  // NOLINT(implicit)
  explicit ScalarField(Evaluator eval) : impl_(std::move(eval)) {}

  bool is_constant() const { return std::holds_alternative<double>(impl_); }

  Jet<3> jet_at(const std::optional<Point3>& p) const {
    if (const auto* c = std::get_if<double>(&impl_)) return Jet<3>(*c);
    if (!p) throw std::invalid_argument("evaluable coefficient needs a chart point");
    return std::get<Evaluator>(impl_)(*p);
  }

  // Only scaling by constants is needed for Form::basis.
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    if (a.is_constant() && b.is_constant()) {
      return ScalarField(std::get<double>(a.impl_) * std::get<double>(b.impl_));
    }
    const ScalarField lhs = a, rhs = b;
    return ScalarField(Evaluator(
        [lhs, rhs](const Point3& p) { return lhs.jet_at(p) * rhs.jet_at(p); }));
  }

 private:
  std::variant<double, Evaluator> impl_{0.0};
};

/// Evaluate every coefficient field of `a` about `p`.
inline Form<Jet<3>> localize(const Form<ScalarField>& a, const std::optional<Point3>& p) {
  return a.map([&](const ScalarField& f) { return f.jet_at(p); });
}

/// d of a form with field coefficients; `p` is required as soon as any
/// coefficient is not constant. The result is a jet form about `p`.
inline Form<Jet<2>> exterior_derivative(const Form<ScalarField>& a, const FrameStructure& fs,
                                        const std::optional<Point3>& p) {
  return exterior_derivative(localize(a, p), fs);
}

}  // namespace csflow
