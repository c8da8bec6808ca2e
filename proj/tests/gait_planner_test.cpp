#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "thrustwalk/errors.hpp"
#include "thrustwalk/gait_planner.hpp"

namespace thrustwalk {
namespace {

// Recursive de Casteljau, independent of the Bernstein sums in the planner.
Vector3d de_casteljau(std::vector<Vector3d> pts, double s) {
  while (pts.size() > 1) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) pts[i] = (1.0 - s) * pts[i] + s * pts[i + 1];
    pts.pop_back();
  }
  return pts.front();
}

std::vector<Vector3d> points(const SwingCurve& c) { return {c.control_points.begin(), c.control_points.end()}; }

TEST(TrotSchedule, InitialPhaseAndPairs) {
  const GaitState g = trot_schedule(0.0, 0.3, 0.3);
  EXPECT_TRUE(g.stance_flags[0]);
  EXPECT_TRUE(g.stance_flags[3]);
  EXPECT_FALSE(g.stance_flags[1]);
  EXPECT_FALSE(g.stance_flags[2]);
  EXPECT_EQ(g.phase[0], 0.0);
  EXPECT_EQ(g.phase[3], 0.0);
}

TEST(TrotSchedule, Periodic) {
  for (double t : {0.0, 0.07, 0.15, 0.31, 0.44}) {
    const GaitState a = trot_schedule(t, 0.3, 0.3);
    const GaitState b = trot_schedule(t + 0.6, 0.3, 0.3);
    const GaitState c = trot_schedule(t + 6.0, 0.3, 0.3);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      EXPECT_EQ(a.stance_flags[leg], b.stance_flags[leg]);
      EXPECT_EQ(a.stance_flags[leg], c.stance_flags[leg]);
      EXPECT_NEAR(a.phase[leg], b.phase[leg], 1e-9);
      EXPECT_NEAR(a.phase[leg], c.phase[leg], 1e-9);
    }
  }
}

TEST(TrotSchedule, LinearPhaseAndExactlyTwoInStance) {
  const GaitState g = trot_schedule(0.15, 0.3, 0.3);
  EXPECT_NEAR(g.phase[0], 0.5, 1e-12);
  EXPECT_NEAR(g.phase[1], 0.5, 1e-12);  // swing pair is halfway through its swing
  for (int i = 0; i < 600; ++i) {
    const GaitState s = trot_schedule(i * 1e-3, 0.3, 0.3);
    EXPECT_EQ(s.stance_flags[0], s.stance_flags[3]);
    EXPECT_EQ(s.stance_flags[1], s.stance_flags[2]);
    EXPECT_NE(s.stance_flags[0], s.stance_flags[1]);
  }
  // Boundary rounding: 30 control ticks of 0.01 land exactly on the switch.
  double t = 0.0;
  for (int i = 0; i < 30; ++i) t += 0.01;
  EXPECT_FALSE(trot_schedule(t, 0.3, 0.3).stance_flags[0]);
  EXPECT_THROW(trot_schedule(0.0, 0.0, 0.3), std::invalid_argument);
}

TEST(Raibert, Examples) {
  const Vector3d p_ref(0.15, 0.1, 0.0);
  EXPECT_EQ(raibert_target(p_ref, Vector3d::Zero(), Vector3d::Zero(), 0.3, 0.03, 0.0), p_ref);
  const Vector3d v(0.2, 0, 0);
  EXPECT_LT((raibert_target(p_ref, v, v, 0.3, 0.03, 0.0) - (p_ref + Vector3d(0.03, 0, 0))).norm(), 1e-15);
  // 0.2 * 0.3 / 2 + 0.03 * (0.2 - 0.1) = 0.03 + 0.003
  EXPECT_LT((raibert_target(p_ref, v, Vector3d(0.1, 0, 0), 0.3, 0.03, 0.0) - (p_ref + Vector3d(0.033, 0, 0))).norm(),
            1e-15);
  EXPECT_EQ(raibert_target(Vector3d(0, 0, 0.4), v, v, 0.3, 0.03, 0.1).z(), 0.1);
}

TEST(Raibert, FeedbackIsAffine) {
  const Vector3d p_ref(0, 0, 0), vd(0.1, 0.05, 0);
  const Vector3d v1(0.3, -0.1, 0);
  const Vector3d v2 = vd + 2.0 * (v1 - vd);
  const Vector3d base = raibert_target(p_ref, vd, vd, 0.3, 0.03, 0.0);
  const Vector3d a = raibert_target(p_ref, v1, vd, 0.3, 0.03, 0.0) - base;
  const Vector3d b = raibert_target(p_ref, v2, vd, 0.3, 0.03, 0.0) - base;
  EXPECT_LT((b - 2.0 * a).norm(), 1e-15);
}

TEST(ClampToBeam, KeepsMarginFromEdge) {
  EXPECT_NEAR(clamp_to_beam(Vector3d(0, 0.08, 0.1), 0.0, 0.1, 0.01).y(), 0.04, 1e-15);
  EXPECT_NEAR(clamp_to_beam(Vector3d(0, -0.2, 0.1), 0.5, 0.1, 0.01).y(), 0.46, 1e-15);
  EXPECT_EQ(clamp_to_beam(Vector3d(1, 0.02, 0.1), 0.0, 0.1, 0.01), Vector3d(1, 0.02, 0.1));
  EXPECT_EQ(clamp_to_beam(Vector3d(0, 0.3, 0), 0.0, 0.01, 0.01).y(), 0.0);
}

TEST(ClampToReach, PullsTowardHipHorizontally) {
  const Vector3d hip(0, 0, 0);
  // max horizontal radius sqrt(0.3^2 - 0.25^2)
  const double r_max = std::sqrt(0.3 * 0.3 - 0.25 * 0.25);
  const Vector3d far(0.4, 0.3, 0.1);
  const Vector3d c = clamp_to_reach(far, hip, 0.25, 0.3);
  EXPECT_NEAR(c.head<2>().norm(), r_max, 1e-15);
  EXPECT_NEAR(c.x() / c.y(), 0.4 / 0.3, 1e-12);
  EXPECT_EQ(c.z(), 0.1);
  const Vector3d near(0.05, 0.02, 0.0);
  EXPECT_EQ(clamp_to_reach(near, hip, 0.25, 0.3), near);
  EXPECT_EQ(clamp_to_reach(far, Vector3d(1, 2, 0), 0.5, 0.3).head<2>(), Eigen::Vector2d(1, 2));
}

TEST(SwingCurve, ControlPoints) {
  const SwingCurve c = build_swing_curve(Vector3d::Zero(), Vector3d(0.1, 0, 0), 0.05);
  EXPECT_LT((c.control_points[2] - Vector3d(0.05, 0, 0.05)).norm(), 1e-15);
  EXPECT_EQ(c.control_points[0], c.control_points[1]);
  EXPECT_EQ(c.control_points[3], c.control_points[4]);
  EXPECT_THROW(build_swing_curve(Vector3d::Zero(), Vector3d::Zero(), 0.0), std::invalid_argument);

  const Vector3d a(0.2, -0.1, 0.1);
  const SwingCurve still = build_swing_curve(a, a, 0.04);
  for (double s : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    const Vector3d p = eval_swing(still, s).pos;
    EXPECT_NEAR(p.x(), a.x(), 1e-15);
    EXPECT_NEAR(p.y(), a.y(), 1e-15);
    EXPECT_GE(p.z(), a.z());
  }
}

TEST(SwingCurve, MatchesDeCasteljau) {
  const SwingCurve c = build_swing_curve(Vector3d(0.1, 0.2, 0.0), Vector3d(0.25, 0.18, 0.1), 0.05);
  const auto& p = c.control_points;
  EXPECT_LT((eval_swing(c, 0.5).pos - (5.0 * p[0] + 6.0 * p[2] + 5.0 * p[4]) / 16.0).norm(), 1e-15);
  for (double s : {0.25, 0.5, 0.8}) EXPECT_LT((eval_swing(c, s).pos - de_casteljau(points(c), s)).norm(), 1e-12);
}

TEST(SwingCurve, VelocityMatchesDifferences) {
  const SwingCurve c = build_swing_curve(Vector3d(0, 0, 0), Vector3d(0.12, -0.03, 0.02), 0.05);
  const double h = 1e-6;
  for (double s : {0.1, 0.4, 0.7}) {
    const Vector3d fd = (de_casteljau(points(c), s + h) - de_casteljau(points(c), s - h)) / (2 * h);
    EXPECT_LT((eval_swing(c, s).vel - fd).norm(), 1e-7);
  }
}

TEST(SwingCurve, EndpointsExactAndConvexHull) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.3, 0.3), ap(0.01, 0.1), ph(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector3d a(u(rng), u(rng), 0.1 * u(rng));
    const Vector3d b(u(rng), u(rng), 0.1 * u(rng));
    const SwingCurve c = build_swing_curve(a, b, ap(rng));
    const SwingSample s0 = eval_swing(c, 0.0);
    const SwingSample s1 = eval_swing(c, 1.0);
    ASSERT_EQ(s0.pos, a);
    ASSERT_EQ(s1.pos, b);
    ASSERT_EQ(s0.vel, Vector3d::Zero());
    ASSERT_EQ(s1.vel, Vector3d::Zero());
    Vector3d lo = c.control_points[0], hi = lo;
    for (const auto& p : c.control_points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vector3d p = eval_swing(c, ph(rng)).pos;
    ASSERT_TRUE((p.array() >= lo.array() - 1e-15).all() && (p.array() <= hi.array() + 1e-15).all());
  }
}

TEST(SwingCurve, PhaseOutOfRange) {
  const SwingCurve c = build_swing_curve(Vector3d::Zero(), Vector3d(0.1, 0, 0), 0.05);
  EXPECT_THROW(eval_swing(c, -1e-9), PhaseOutOfRange);
  EXPECT_THROW(eval_swing(c, 1.0 + 1e-9), PhaseOutOfRange);
  EXPECT_THROW(eval_swing(c, std::nan("")), PhaseOutOfRange);
}

}  // namespace
}  // namespace thrustwalk
