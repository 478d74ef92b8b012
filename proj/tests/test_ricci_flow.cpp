#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "csflow/oracles.hpp"
#include "csflow/ricci_flow.hpp"

using namespace csflow;
using berger::BergerParams;

TEST(OdeRhs, RoundSphereShrinks) {
  for (double v : flow::ode_rhs(BergerParams(1, 1, 1))) EXPECT_DOUBLE_EQ(v, -2.0);
}

TEST(NormalizedRhs, PreservesVolumeInstantaneously) {
  const BergerParams p(2.0, 1.0, 0.7);
  const auto r = flow::normalized_rhs(p);
  EXPECT_NEAR(r[0] / p[0] + r[1] / p[1] + r[2] / p[2], 0.0, 1e-13);
}

TEST(Integrate, RoundSphereClosedForm) {
  const double l0 = 1.4;
  const double t_end = 0.2 * l0 * l0 / 4.0;
  const auto traj = flow::integrate(BergerParams(l0, l0, l0), t_end, 1e-3, false);
  ASSERT_FALSE(traj.extinct);
  for (const auto& s : traj.states) {
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.params[i], oracle::round_sphere_lambda(l0, s.t), 1e-8);
  }
}

TEST(Integrate, FourthOrderConvergence) {
  const auto err = [](double h) {
    const auto traj = flow::integrate(BergerParams(1, 1, 1), 0.2, h, false);
    return std::abs(traj.states.back().params[0] - std::sqrt(1.0 - 0.8));
  };
  const double ratio = err(5e-3) / err(2.5e-3);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Integrate, TimesIncreaseByOneStep) {
  const auto traj = flow::integrate(BergerParams(1.2, 0.9, 1.0), 0.05, 0.004, false);
  ASSERT_GE(traj.states.size(), 2u);
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    EXPECT_GT(traj.states[n].t, traj.states[n - 1].t);
    EXPECT_LE(traj.states[n].t - traj.states[n - 1].t, 0.004 + 1e-15);
  }
  EXPECT_DOUBLE_EQ(traj.states.back().t, 0.05);
}

TEST(Integrate, DiagnosticsRecomputable) {
  const auto traj = flow::integrate(BergerParams(1.5, 1.0, 0.8), 0.02, 1e-3, false);
  for (const auto& s : traj.states) {
    const auto r = berger::ricci(s.params);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s.ricci[i], r[i]);
    EXPECT_EQ(s.cs_density, berger::cs_density(s.params));
  }
}

TEST(Integrate, ExtinctionStopsEarly) {
  const auto traj = flow::integrate(BergerParams(1, 1, 1), 0.3, 0.01, false);
  EXPECT_TRUE(traj.extinct);
  EXPECT_LT(traj.states.back().t, 0.3);
  for (const auto& s : traj.states) EXPECT_GT(s.params[0], flow::kExtinctionThreshold);
}

TEST(Integrate, RejectsBadStep) {
  EXPECT_THROW(flow::integrate(BergerParams(1, 1, 1), 0.1, 0.0, false), std::invalid_argument);
  EXPECT_THROW(flow::integrate(BergerParams(1, 1, 1), -1.0, 0.01, false), std::invalid_argument);
}

TEST(Integrate, NormalizedFlowRoundsOut) {
  const auto traj = flow::integrate(BergerParams(2, 1, 1), 10.0, 1e-3, true);
  ASSERT_FALSE(traj.extinct);
  const auto& last = traj.states.back().params;
  EXPECT_LT(flow::ratio_spread(last), 1e-6);
  // volume is invariant; RK4 drift over 10^4 steps is ~2e-9
  EXPECT_NEAR(last.product(), 2.0, 1e-8);
}

TEST(CsAlongFlow, RoundIntegralConstant) {
  const auto series = flow::cs_along_flow(flow::integrate(BergerParams(1, 1, 1), 0.2, 2.5e-3, false));
  for (const auto& s : series) EXPECT_NEAR(s.cs_integral / series.front().cs_integral, 1.0, 1e-9);
  EXPECT_NEAR(series.front().cs_integral, -8.0, 1e-12);
}

TEST(CsAlongFlow, BergerIntegralMovesAtPipelineRate) {
  // d/dt of the integral at t = 0 is the pipeline density times the volume.
  const BergerParams p(2, 1, 1);
  const auto central = [&](double h) {
    const auto fwd = flow::cs_along_flow(flow::integrate(p, h, h, false));
    BergerParams back = p;
    EXPECT_TRUE(flow::flow_step(p, -h, false, back));
    const double back_integral = berger::cs_density(back) * berger::volume(back);
    return (fwd.back().cs_integral - back_integral) / (2 * h);
  };
  const double rate = (4.0 * central(5e-5) - central(1e-4)) / 3.0;
  const double expected = berger::kPipelineToClosedForm * berger::tp1_dot_coefficient(p) * berger::volume(p);
  EXPECT_GT(std::abs(rate), 0.0);
  EXPECT_NEAR(rate / expected, 1.0, 1e-6);
}

TEST(CsAlongFlow, EmptyTrajectory) {
  EXPECT_TRUE(flow::cs_along_flow(flow::FlowTrajectory{}).empty());
}
