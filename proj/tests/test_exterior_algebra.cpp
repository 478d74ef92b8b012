#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "csflow/berger.hpp"
#include "csflow/exterior_algebra.hpp"

using namespace csflow;

namespace {

Form<double> random_form(std::mt19937_64& gen, int degree) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Form<double> f(degree);
  for (int i = 0; i < f.size(); ++i) f[i] = u(gen);
  return f;
}

}  // namespace

TEST(Form, StoresBinomialCount) {
  EXPECT_EQ(Form<double>(0).size(), 1);
  EXPECT_EQ(Form<double>(1).size(), 3);
  EXPECT_EQ(Form<double>(2).size(), 3);
  EXPECT_EQ(Form<double>(3).size(), 1);
  EXPECT_THROW(Form<double>(4), std::invalid_argument);
}

TEST(Form, BasisNormalizesOrderAndSign) {
  const auto f = Form<double>::basis({2, 0}, 5.0);
  EXPECT_DOUBLE_EQ(f.component({0, 2}), -5.0);
  EXPECT_DOUBLE_EQ(f.component({2, 0}), 5.0);
  EXPECT_TRUE(Form<double>::basis({1, 1}).is_zero());
}

TEST(Wedge, BasisOneForms) {
  const auto w = wedge(theta(0), theta(1));
  EXPECT_DOUBLE_EQ(w.component({0, 1}), 1.0);
  EXPECT_TRUE(wedge(theta(0), theta(0)).is_zero());
}

TEST(Wedge, SignFromReordering) {
  // (2 theta^2) ^ (3 theta^1 ^ theta^3) = -6 theta^123
  const auto a = Form<double>::basis({1}, 2.0);
  const auto b = Form<double>::basis({0, 2}, 3.0);
  EXPECT_DOUBLE_EQ(wedge(a, b).top(), -6.0);
}

TEST(Wedge, DegreeOverflowThrows) {
  EXPECT_THROW(wedge(Form<double>(2), Form<double>(2)), std::invalid_argument);
}

TEST(Wedge, GradedCommutativity) {
  std::mt19937_64 gen(7);
  for (int n = 0; n < 50; ++n) {
    const auto a = random_form(gen, 1), b = random_form(gen, 1), c = random_form(gen, 2);
    EXPECT_LT((wedge(a, b) + wedge(b, a)).max_magnitude(), 1e-14);
    EXPECT_LT((wedge(a, c) - wedge(c, a)).max_magnitude(), 1e-14);
  }
}

TEST(Wedge, Associative) {
  std::mt19937_64 gen(11);
  for (int n = 0; n < 50; ++n) {
    const auto a = random_form(gen, 1), b = random_form(gen, 1), c = random_form(gen, 1);
    EXPECT_NEAR(wedge(wedge(a, b), c).top(), wedge(a, wedge(b, c)).top(), 1e-13);
  }
}

TEST(MatrixForm, IdentityIsLeftUnit) {
  const auto omega = berger::curvature_form(berger::BergerParams(1.3, 0.8, 2.0));
  const auto prod = matrix_wedge(MatrixForm<double>::identity(), omega);
  EXPECT_EQ((prod - omega).max_magnitude(), 0.0);
  EXPECT_EQ(matrix_wedge(MatrixForm<double>(0), omega).max_magnitude(), 0.0);
}

TEST(MatrixForm, MixedDegreesRejected) {
  MatrixForm<double>::Entries e;
  for (auto& row : e) row.fill(Form<double>(1));
  e[1][2] = Form<double>(2);
  EXPECT_THROW((MatrixForm<double>(e)), std::invalid_argument);
}

TEST(MatrixForm, RoundConnectionSquaredHasZeroDiagonal) {
  const auto w = berger::connection_form(berger::BergerParams(1.0, 1.0, 1.0));
  const auto ww = matrix_wedge(w, w);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(ww(i, i).max_magnitude(), 0.0);
}

TEST(MatrixForm, SkewVerification) {
  auto w = berger::connection_form(berger::BergerParams(1.5, 1.0, 0.5));
  EXPECT_TRUE(w.skew_verified());
  EXPECT_EQ(trace(w).max_magnitude(), 0.0);
  w.set(0, 1, Form<double>::basis({2}, 9.0));
  EXPECT_FALSE(w.skew_verified());
  EXPECT_THROW(w.verify_skew(), std::invalid_argument);
}

TEST(Trace, DiagonalConstants) {
  MatrixForm<double> m(0);
  m.set(0, 0, Form<double>::scalar(1.5));
  m.set(1, 1, Form<double>::scalar(-2.0));
  m.set(2, 2, Form<double>::scalar(4.0));
  EXPECT_DOUBLE_EQ(trace(m)[0], 3.5);
}

TEST(Trace, RoundSphereConnectionWedgeCurvature) {
  const berger::BergerParams round(1.0, 1.0, 1.0);
  const auto w = berger::connection_form(round);
  // With the negated curvature numerator the six diagonal terms give -6;
  // the curvature that satisfies the structure equation gives +6.
  EXPECT_DOUBLE_EQ(trace(matrix_wedge(w, berger::curvature_form_negated_numerator(round))).top(),
                   -6.0);
  EXPECT_DOUBLE_EQ(trace(matrix_wedge(w, berger::curvature_form(round))).top(), 6.0);
}

TEST(LieBracket, RoundSphereEntry) {
  const auto w = berger::connection_form(berger::BergerParams(1.0, 1.0, 1.0));
  const auto br = lie_bracket_form(w);
  EXPECT_DOUBLE_EQ(br(0, 1).component({0, 1}), -2.0);
  EXPECT_THROW(lie_bracket_form(berger::curvature_form(berger::BergerParams(1, 1, 1))),
               std::invalid_argument);
}

TEST(LieBracket, QuadraticInScale) {
  const auto w = berger::connection_form(berger::BergerParams(0.7, 1.9, 1.2));
  const auto lhs = lie_bracket_form(3.0 * w);
  const auto rhs = 9.0 * lie_bracket_form(w);
  EXPECT_LT((lhs - rhs).max_magnitude(), 1e-12);
  EXPECT_EQ(lie_bracket_form(MatrixForm<double>(1)).max_magnitude(), 0.0);
}

TEST(ExteriorDerivative, ConstantZeroForm) {
  EXPECT_TRUE(exterior_derivative(Form<double>::scalar(3.0), berger::structure(
                                      berger::BergerParams(1.0, 2.0, 3.0)))
                  .is_zero());
}

TEST(ExteriorDerivative, LieCoframe) {
  const berger::BergerParams p(1.7, 0.6, 1.3);
  const auto d = exterior_derivative(theta(0), berger::structure(p));
  EXPECT_NEAR(d.component({1, 2}), -2.0 * p[0] / (p[1] * p[2]), 1e-15);
  EXPECT_NEAR(d.component({0, 1}), 0.0, 1e-15);
}

TEST(ExteriorDerivative, SquaresToZeroOnLieCoframe) {
  const auto fs = berger::structure(berger::BergerParams(0.9, 1.4, 2.2));
  std::mt19937_64 gen(3);
  for (int n = 0; n < 20; ++n) {
    const auto a = random_form(gen, 1);
    EXPECT_LT(std::abs(exterior_derivative(exterior_derivative(a, fs), fs).top()), 1e-13);
  }
}

TEST(ExteriorDerivative, CoordinateProductRule) {
  // d(sin x^0 dx^1) = cos x^0 dx^0 ^ dx^1
  const Point3 p{0.8, 0.1, 2.0};
  const Form<ScalarField> a = Form<ScalarField>::basis(
      {1}, ScalarField(ScalarField::Evaluator([](const Point3& q) {
        return sin(Jet<3>::variable(q[0], 0));
      })));
  const auto d = exterior_derivative(a, FrameStructure::coordinate(), p);
  EXPECT_NEAR(d.component({0, 1}).value(), std::cos(0.8), 1e-15);
  EXPECT_NEAR(d.component({0, 2}).value(), 0.0, 1e-15);
  EXPECT_THROW(exterior_derivative(a, FrameStructure::coordinate(), std::nullopt),
               std::invalid_argument);
}

TEST(ExteriorDerivative, NonConstantOnLieFrameRejected) {
  Form<Jet<2>> a(1);
  a[0] = Jet<2>::variable(1.0, 0);
  EXPECT_THROW(exterior_derivative(a, berger::structure(berger::BergerParams(1, 1, 1))),
               std::invalid_argument);
}

TEST(FrameStructure, AntisymmetryEnforced) {
  FrameStructure::Constants c{};
  c[0][1][2] = 1.0;
  EXPECT_THROW(FrameStructure::lie(c), std::invalid_argument);
  c[0][2][1] = -1.0;
  EXPECT_NO_THROW(FrameStructure::lie(c));
  EXPECT_EQ(FrameStructure::coordinate()(0, 1, 2), 0.0);
}
