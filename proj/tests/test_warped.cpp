#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csflow/oracles.hpp"
#include "csflow/verify.hpp"
#include "csflow/warped.hpp"

using namespace csflow;
using namespace csflow::warped;
using K = TrigFactor::Kind;

namespace {

WarpFunction sin_squared() {
  return WarpFunction("sin^2(t1)", [](const CoordJets& x) {
    const auto s = sin(x[0]);
    return s * s;
  });
}

double max_abs(const Index3<double>& t) {
  double m = 0.0;
  for (const auto& a : t)
    for (const auto& b : a)
      for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(WarpFunction, RejectsNonPositiveFamily) {
  EXPECT_THROW(WarpFunction::trig(1.0, 2.0, {{K::sin, 0, 1}}), std::invalid_argument);
  EXPECT_THROW(WarpFunction::trig(1.0, -1.0, {{K::sin, 0, 1}}), std::invalid_argument);
  EXPECT_THROW(WarpFunction::constant(0.0), std::invalid_argument);
  EXPECT_THROW(WarpedSpec(3, WarpFunction::constant(1.0)), std::invalid_argument);
}

TEST(Metric, ProductCases) {
  const WarpedSpec one(1, WarpFunction::constant(1.0));
  const auto g = metric(one, {0.3, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(g[0].value(), 1.0);
  EXPECT_DOUBLE_EQ(g[1].value(), 1.0);
  EXPECT_NEAR(g[2].value(), std::sin(1.0) * std::sin(1.0), 1e-15);

  const WarpedSpec two(2, WarpFunction::trig(2.0, 0.5, {{K::cos, 0, 1}}));
  const auto h = metric(two, {std::numbers::pi / 2, 0.4, 0.4});
  EXPECT_DOUBLE_EQ(h[0].value(), 1.0);
  EXPECT_NEAR(h[1].value(), 1.0, 1e-15);
  EXPECT_NEAR(h[2].value(), 2.0, 1e-15);
}

TEST(Metric, WarpEntersFiberBlock) {
  const WarpedSpec s(1, WarpFunction::trig(2.0, 1.0, {{K::sin, 0, 1}}));
  const auto g = metric(s, {std::numbers::pi / 2, 1.2, 0.0});
  EXPECT_NEAR(g[1].value(), 3.0, 1e-15);
  EXPECT_NEAR(g[2].value(), 3.0 * std::sin(1.2) * std::sin(1.2), 1e-14);
}

TEST(Metric, DomainChecks) {
  const WarpedSpec s(2, WarpFunction::constant(1.0));
  EXPECT_THROW(metric(s, {0.005, 1.0, 1.0}), std::domain_error);
  EXPECT_THROW(metric(s, {std::numbers::pi - 0.001, 1.0, 1.0}), std::domain_error);
  const WarpedSpec fiber(1, WarpFunction::trig(2.0, 1.0, {{K::sin, 2, 1}}));
  EXPECT_THROW(metric(fiber, {1.0, 1.0, 1.0}), std::invalid_argument);
  const WarpedSpec negative(1, WarpFunction("neg", [](const CoordJets& x) { return cos(x[0]); }));
  EXPECT_THROW(metric(negative, {3.0, 1.0, 1.0}), std::domain_error);
}

TEST(Christoffel, RoundTwoSphere) {
  const WarpedSpec s(2, WarpFunction::constant(1.0));
  const double t = 0.9;
  const auto g = christoffel(s, {t, 0.3, 0.3});
  EXPECT_NEAR(g[1][0][1].value(), std::cos(t) / std::sin(t), 1e-14);
  EXPECT_NEAR(g[0][1][1].value(), -std::sin(t) * std::cos(t), 1e-14);
}

TEST(Christoffel, ConstantWarpHasNoBaseDerivativeTerms) {
  const WarpedSpec s(1, WarpFunction::constant(2.5));
  const auto g = christoffel(s, {0.4, 1.1, 0.2});
  EXPECT_EQ(g[1][0][1].value(), 0.0);
  EXPECT_EQ(g[2][0][2].value(), 0.0);
  EXPECT_EQ(g[0][1][1].value(), 0.0);
}

TEST(Christoffel, MatchesFiniteDifference) {
  for (int n = 1; n <= 2; ++n) {
    for (const auto& w : standard_warps(n)) {
      const WarpedSpec s(n, w);
      const auto pts = verify::random_chart_points(s, 17, 10);
      EXPECT_LT(verify::christoffel_fd_error(s, pts), 1e-8) << w.name();
    }
  }
}

TEST(Riemann, FirstBianchiAndCurvatureRoute) {
  for (int n = 1; n <= 2; ++n) {
    for (const auto& w : standard_warps(n)) {
      const WarpedSpec s(n, w);
      const auto pts = verify::random_chart_points(s, 19, 10);
      EXPECT_LT(verify::bianchi_error(s, pts), 1e-9) << w.name();
      EXPECT_LT(verify::curvature_route_error(s, pts), 1e-9) << w.name();
    }
  }
}

TEST(CurvatureForm, ProductTwoSphereBlock) {
  // Omega_1^2 = -dtheta^1 ^ dtheta^2 and Omega_2^1 = sin^2 theta^1 dtheta^1 ^ dtheta^2
  // for every warp; mixed planes are flat when f is constant.
  const ChartPoint p{1.1, 0.6, 2.0};
  for (const auto& w : {WarpFunction::constant(1.0), standard_warps(2)[1], standard_warps(2)[4]}) {
    const auto omega = curvature_form(WarpedSpec(2, w), p);
    EXPECT_NEAR(omega(0, 1).component({0, 1}), -1.0, 1e-13) << w.name();
    EXPECT_NEAR(omega(1, 0).component({0, 1}), std::sin(1.1) * std::sin(1.1), 1e-13) << w.name();
  }
  const auto flat = curvature_form(WarpedSpec(2, WarpFunction::constant(1.0)), p);
  for (auto [i, j] : {std::pair{0, 2}, {1, 2}, {2, 0}, {2, 1}}) {
    EXPECT_LT(flat(i, j).max_magnitude(), 1e-14);
  }
}

TEST(CurvatureForm, SparsityAndZeroTrace) {
  for (int n = 1; n <= 2; ++n) {
    for (const auto& w : standard_warps(n)) {
      const WarpedSpec s(n, w);
      for (const auto& p : verify::random_chart_points(s, 23, 10)) {
        const auto omega = curvature_form(s, p);
        EXPECT_LT(pattern_violation(omega, curvature_pattern(n)), 1e-12) << w.name();
        EXPECT_LT(trace(omega).max_magnitude(), 1e-12);
      }
    }
  }
}

TEST(ChristoffelDot, EinsteinMetricsDoNotMove) {
  // Round S^3 written as S^1 x_{sin^2} S^2, and the round products.
  EXPECT_LT(max_abs(christoffel_dot(WarpedSpec(1, sin_squared()), {1.0, 0.7, 0.3})), 1e-12);
  EXPECT_LT(max_abs(christoffel_dot(WarpedSpec(1, WarpFunction::constant(1.0)), {0.2, 1.3, 2.0})),
            1e-12);
  EXPECT_LT(max_abs(christoffel_dot(WarpedSpec(2, WarpFunction::constant(1.0)), {0.8, 1.3, 2.0})),
            1e-12);
}

TEST(ChristoffelDot, MatchesFiniteDifference) {
  for (int n = 1; n <= 2; ++n) {
    for (const auto& w : standard_warps(n)) {
      const WarpedSpec s(n, w);
      EXPECT_LT(verify::christoffel_dot_fd_error(s, verify::random_chart_points(s, 29, 5)), 1e-4)
          << w.name();
    }
  }
}

TEST(ChristoffelDot, LiteralVariantDisagrees) {
  const WarpedSpec s(1, WarpFunction::trig(2.0, 1.0, {{K::sin, 0, 1}}));
  const ChartPoint p{0.9, 1.2, 0.4};
  const auto standard = christoffel_dot(s, p);
  const auto literal = christoffel_dot_as_printed(s, p);
  double diff = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) diff = std::max(diff, std::abs(standard[k][i][j] - literal[k][i][j]));
  EXPECT_GT(diff, 1e-3);
}

TEST(OmegaDot, Sparsity) {
  for (int n = 1; n <= 2; ++n) {
    for (const auto& w : standard_warps(n)) {
      const WarpedSpec s(n, w);
      for (const auto& p : verify::random_chart_points(s, 31, 10)) {
        const auto wd = omega_dot(s, p);
        EXPECT_LT(pattern_violation(wd, omega_dot_pattern(n)), 1e-12) << w.name();
        if (n == 1) {
          EXPECT_LT(wd(1, 2).max_magnitude(), 1e-12);
          EXPECT_LT(wd(2, 1).max_magnitude(), 1e-12);
        } else {
          for (auto [i, j] : {std::pair{0, 2}, {1, 2}, {2, 0}, {2, 1}}) {
            EXPECT_LT(std::abs(wd(i, j)[0]) + std::abs(wd(i, j)[1]), 1e-12);
          }
        }
      }
    }
  }
}

TEST(OmegaDot, SwappedThirdRowIsViolated) {
  const WarpedSpec s(1, WarpFunction::trig(3.0, -1.5, {{K::cos, 0, 2}}));
  const auto wd = omega_dot(s, {1.3, 1.0, 0.5});
  EXPECT_GT(pattern_violation(wd, omega_dot_pattern_swapped_n1()), 1e-3);
  EXPECT_LT(pattern_violation(wd, omega_dot_pattern(1)), 1e-12);
}

TEST(Exactness, PointResiduals) {
  const WarpedSpec one(1, WarpFunction::trig(2.0, 1.0, {{K::sin, 0, 1}}));
  const WarpedSpec two(2, WarpFunction::trig(2.0, 0.5, {{K::cos, 0, 1}}));
  const WarpedSpec product(2, WarpFunction::constant(1.0));
  for (const auto* s : {&one, &two, &product}) {
    for (const auto& p : verify::random_chart_points(*s, 37, 20)) {
      const auto r = exactness_residuals(*s, p);
      EXPECT_LT(std::abs(r.trace_product), 1e-8);
      EXPECT_LT(std::abs(r.trace_wedge), 1e-8);
    }
  }
}

TEST(GridScan, ResolutionIndependent) {
  const WarpedSpec s(1, WarpFunction::trig(2.0, 0.9, {{K::sin, 0, 1}}));
  const auto coarse = grid_scan(s, 4, 1);
  const auto fine = grid_scan(s, 32, 0);
  EXPECT_EQ(coarse.points, 64u);
  EXPECT_EQ(fine.points, 32768u);
  EXPECT_LT(fine.max_trace_product, 1e-8);
  EXPECT_LT(fine.max_trace_wedge, 1e-8);
  EXPECT_LE(fine.max_trace_wedge, std::max(coarse.max_trace_wedge, 1e-14));
  EXPECT_THROW(grid_scan(s, 3), std::invalid_argument);
}

TEST(GridScan, DeterministicAcrossJobCounts) {
  const WarpedSpec s(2, standard_warps(2)[2]);
  const auto a = grid_scan(s, 6, 1);
  const auto b = grid_scan(s, 6, 3);
  EXPECT_EQ(a.max_trace_wedge, b.max_trace_wedge);
  EXPECT_EQ(a.max_omega_dot_pattern_violation, b.max_omega_dot_pattern_violation);
  EXPECT_EQ(a.points, b.points);
}
