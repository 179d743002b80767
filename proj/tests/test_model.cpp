#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mwkit/model.hpp"

using namespace mwkit;

namespace {

constexpr double pi = std::numbers::pi;

// Random point at distance [1e-6, 1e3] from F, log-uniform.
CartesianState random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-pi, pi), logd(std::log(1e-6), std::log(1e3));
  const double d = std::exp(logd(rng)), a = ang(rng);
  return {1.0 + d * std::cos(a), d * std::sin(a)};
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_DOUBLE_EQ(normalize(Params(2, 1, 1)).params.omega(), 2.0);
  EXPECT_DOUBLE_EQ(normalize(Params(3, 2, 4)).params.omega(), 6.0);
  EXPECT_EQ(normalize(Params(0, 5, 2)).params.omega(), 0.0);
}

TEST(Normalize, ScaleAndInverse) {
  const auto n = normalize(Params(3, 2, 4));
  EXPECT_DOUBLE_EQ(n.scale.length, 4.0);
  EXPECT_DOUBLE_EQ(n.scale.time, 2.0);
  const Params back = denormalize(n.params, 2, 4);
  EXPECT_DOUBLE_EQ(back.omega(), 3.0);
  const CartesianState p{0.3, -0.7};
  const auto q = to_normalized(to_original(p, n.scale), n.scale);
  EXPECT_DOUBLE_EQ(q.x, p.x);
  EXPECT_DOUBLE_EQ(q.y, p.y);
}

TEST(Params, RejectsInvalid) {
  EXPECT_THROW((void)Params(-1, 1, 1), InvalidParameters);
  EXPECT_THROW((void)Params(1, 0, 1), InvalidParameters);
  EXPECT_THROW((void)Params(1, 1, -2), InvalidParameters);
  EXPECT_THROW((void)Params(NAN, 1, 1), InvalidParameters);
  EXPECT_THROW((void)NormalizedParams(INFINITY), InvalidParameters);
}

TEST(CartesianField, Examples) {
  for (double w : {0.0, 0.5, 2.0, 7.0}) {
    const auto f = vector_field_cartesian(NormalizedParams(w), {0, 0});
    EXPECT_DOUBLE_EQ(f.dx, 1.0);
    EXPECT_DOUBLE_EQ(f.dy, 0.0);
  }
  const auto f = vector_field_cartesian(NormalizedParams(1), {1, 1});
  EXPECT_DOUBLE_EQ(f.dx, -1.0);
  EXPECT_DOUBLE_EQ(f.dy, 0.0);
  EXPECT_THROW(vector_field_cartesian(NormalizedParams(1), {1, 0}), SingularAtFocus);
}

TEST(CartesianField, UnitSpeedWhenStill) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const auto p = random_point(rng);
    const auto f = vector_field_cartesian(NormalizedParams(0), p);
    EXPECT_NEAR(std::hypot(f.dx, f.dy), 1.0, 1e-14);
  }
}

TEST(PolarField, Examples) {
  const double tp = std::asin(0.5);
  const auto fp = vector_field_polar(NormalizedParams(2), {tp, std::cos(tp)});
  EXPECT_NEAR(fp.dtheta, 0.0, 1e-15);
  EXPECT_NEAR(fp.dr, 0.0, 1e-15);
  for (double w : {0.0, 0.5, 1.0, 3.0}) {
    const auto f = vector_field_polar(NormalizedParams(w), {pi / 2, 0});
    EXPECT_NEAR(f.dtheta, 0.0, 1e-15);
    EXPECT_EQ(f.dr, 0.0);
  }
  const auto f = vector_field_polar(NormalizedParams(1), {0, 1});
  EXPECT_DOUBLE_EQ(f.dtheta, 0.0);
  EXPECT_DOUBLE_EQ(f.dr, -1.0);
}

TEST(Charts, Examples) {
  const auto p = to_polar({0, 0});
  EXPECT_DOUBLE_EQ(p.theta, 0.0);
  EXPECT_DOUBLE_EQ(p.r, 1.0);
  const auto c = to_cartesian({pi / 2, 1});
  EXPECT_NEAR(c.x, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(c.y, 1.0);
  EXPECT_THROW(to_polar({1, 0}), SingularAtFocus);
}

TEST(RadialDerivative, Examples) {
  for (double th : {-1.2, -0.3, 0.0, 0.9, 1.5})
    EXPECT_NEAR(radial_derivative({th, std::cos(th)}), 0.0, 1e-15);
  EXPECT_NEAR(radial_derivative({pi / 2, 1}), -2.0, 1e-15);
  EXPECT_DOUBLE_EQ(radial_derivative({0, 0.5}), 0.5);
}

TEST(RadialDerivative, MatchesChainRule) {
  // z = x^2 + y^2 differentiated along the polar field, times r.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(-pi, pi), rr(0.01, 3.0), ww(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const PolarState s{th(rng), rr(rng)};
    const NormalizedParams np(ww(rng));
    const auto c = to_cartesian(s);
    const auto f = vector_field_cartesian(np, c);
    const double zdot = 2 * (c.x * f.dx + c.y * f.dy) * s.r;
    EXPECT_NEAR(radial_derivative(s), zdot, 1e-10 * (1 + std::abs(zdot)));
  }
}

TEST(Property, ChartRoundTrip) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10000; ++k) {
    const auto p = random_point(rng);
    const auto q = to_cartesian(to_polar(p));
    const double norm = std::hypot(p.x, p.y);
    ASSERT_LE(std::hypot(q.x - p.x, q.y - p.y), 1e-12 * (1 + norm)) << p.x << "," << p.y;
  }
}

TEST(Property, FieldConsistency) {
  // Chart Jacobian of (theta, r) -> (x, y): [[r sin, -cos], [r cos, sin]].
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ww(0.0, 20.0);
  for (int k = 0; k < 10000; ++k) {
    const auto c = random_point(rng);
    const NormalizedParams np(ww(rng));
    const auto s = to_polar(c);
    const auto f = vector_field_cartesian(np, c);
    const double st = std::sin(s.theta), ct = std::cos(s.theta);
    const double det = s.r;  // det of the chart Jacobian
    const double dth = (st * f.dx + ct * f.dy) / det;
    const double dr = (-s.r * ct * f.dx + s.r * st * f.dy) / det;
    const auto g = vector_field_polar(np, s);
    const double scale = std::hypot(g.dtheta, g.dr) + 1e-300;
    ASSERT_LE(std::hypot(dth * s.r - g.dtheta, dr * s.r - g.dr), 1e-10 * std::max(scale, 1.0));
  }
}

TEST(Property, RadialSignLaw) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(-pi, pi), rr(-3.0, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const PolarState s{th(rng), rr(rng)};
    const bool above = s.r > std::cos(s.theta) && s.r > 0.0;
    const double z = radial_derivative(s);
    if (above) {
      ASSERT_LT(z, 0.0);
    }
    if (z < 0.0) {
      ASSERT_TRUE(s.r > 0 ? s.r > std::cos(s.theta) : s.r < std::cos(s.theta));
    }
  }
}

TEST(Property, RadialDerivativeIgnoresOmega) {
  // The function takes no parameters; check against the field for several omegas.
  const PolarState s{0.4, 1.3};
  const auto c = to_cartesian(s);
  for (double w : {0.0, 1.0, 10.0}) {
    const auto f = vector_field_cartesian(NormalizedParams(w), c);
    EXPECT_NEAR(2 * (c.x * f.dx + c.y * f.dy) * s.r, radial_derivative(s), 1e-13);
  }
}

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(-pi, pi), rr(-2.0, 2.0), ww(0.0, 5.0);
  const double h = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const NormalizedParams np(ww(rng));
    const PolarState s{th(rng), rr(rng)};
    const Mat2 j = polar_jacobian(np, s);
    const auto a = vector_field_polar(np, {s.theta + h, s.r});
    const auto b = vector_field_polar(np, {s.theta - h, s.r});
    const auto c = vector_field_polar(np, {s.theta, s.r + h});
    const auto d = vector_field_polar(np, {s.theta, s.r - h});
    EXPECT_NEAR(j[0][0], (a.dtheta - b.dtheta) / (2 * h), 1e-7);
    EXPECT_NEAR(j[1][0], (a.dr - b.dr) / (2 * h), 1e-7);
    EXPECT_NEAR(j[0][1], (c.dtheta - d.dtheta) / (2 * h), 1e-7);
    EXPECT_NEAR(j[1][1], (c.dr - d.dr) / (2 * h), 1e-7);
  }
}

TEST(Geometry, Borders) {
  EXPECT_TRUE(geometry::in_G({0.5, 0.5}));
  EXPECT_FALSE(geometry::in_G({1.0, 0.5}));
  EXPECT_TRUE(geometry::in_C({0.5, 0.4}));
  EXPECT_FALSE(geometry::in_C({0.0, 0.4}));
  // Points on the polar borders land on the cartesian circles.
  for (double th : {-1.0, 0.0, 0.7}) {
    EXPECT_NEAR(geometry::z(to_cartesian({th, geometry::border_G_r(th)})), 1.0, 1e-14);
    const auto c = to_cartesian({th, geometry::border_C_r(th)});
    EXPECT_NEAR(std::hypot(c.x - 0.5, c.y), 0.5, 1e-14);
  }
  EXPECT_DOUBLE_EQ(geometry::border_G_slope(-pi / 2), 2.0);
  EXPECT_DOUBLE_EQ(geometry::border_C_slope(pi / 2), -1.0);
}
