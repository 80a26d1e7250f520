#include "cogmc/model.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cogmc;

namespace {

Topology collinear() {
  Topology t;
  t.x_P = Vec3(0, 0, 0);
  t.x_S = Vec3(0, 30, 0);
  t.y_P = Vec3(20, 0, 0);
  t.y_S = Vec3(40, 0, 0);
  t.a_P = 1;
  t.a_S = 1;
  return t;
}

double law_of_cosines(double side, double r_other, double phi) {
  return std::sqrt(side * side + r_other * r_other - 2 * side * r_other * std::cos(phi));
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("medium checks and half-life") {
  MediumParams m;
  CHECK_NOTHROW(m.check());
  CHECK(std::isinf(m.half_life()));
  m.mu = 0.5;
  CHECK(m.half_life() == doctest::Approx(std::log(2.0) / 0.5));
  m.D = 0;
  CHECK_THROWS_AS(m.check(), std::invalid_argument);
  m = MediumParams{};
  m.Tb = -1;
  CHECK_THROWS_AS(m.check(), std::invalid_argument);
  m = MediumParams{};
  m.mu = -0.1;
  CHECK_THROWS_AS(m.check(), std::invalid_argument);
}

TEST_CASE("collinear geometry, other receiver behind the target") {
  const TwoFarGeometry g = derive_geometry(collinear(), Link::Primary, Link::Primary);
  CHECK(g.phi == 0.0);
  CHECK(g.r_target == 20.0);
  CHECK(g.r_other == 40.0);
  CHECK(g.R_target_other == doctest::Approx(21.0).epsilon(1e-15));
}

TEST_CASE("collinear geometry, other receiver opposite") {
  Topology t = collinear();
  t.y_S = Vec3(-40, 0, 0);
  const TwoFarGeometry g = derive_geometry(t, Link::Primary, Link::Primary);
  CHECK(g.phi == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(g.R_target_other == doctest::Approx(59.0).epsilon(1e-15));
}

TEST_CASE("three-receiver reference layout distances") {
  Topology t;
  t.x_P = Vec3::Zero();
  t.x_S = Vec3(0, 40, 0);
  t.y_P = Vec3(-30, -20, 0);
  t.y_S = Vec3(25, 10, 0);
  t.a_P = 3;
  t.a_S = 5;
  const TwoFarGeometry g = derive_geometry(t, Link::Primary, Link::Primary);
  CHECK(g.r_target == doctest::Approx(std::sqrt(1300.0)).epsilon(1e-15));
  CHECK(g.r_other == doctest::Approx(std::sqrt(725.0)).epsilon(1e-15));
  CHECK(g.R_target_other ==
        doctest::Approx(law_of_cosines(g.r_target - 3, g.r_other, g.phi)).epsilon(1e-13));
  CHECK(g.R_other_target ==
        doctest::Approx(law_of_cosines(g.r_other - 5, g.r_target, g.phi)).epsilon(1e-13));
}

TEST_CASE("make_geometry accepts Eigen expressions") {
  const Vec3 base(1, 2, 3);
  const TwoFarGeometry a = make_geometry(base + Vec3(0, 0, 0), base + Vec3(20, 0, 0),
                                         2.0 * Vec3(20.5, 1, 1.5), 1.0, 1.0);
  const TwoFarGeometry b = make_geometry(Vec3(1, 2, 3), Vec3(21, 2, 3), Vec3(41, 2, 3), 1.0, 1.0);
  CHECK(a.R_target_other == doctest::Approx(b.R_target_other).epsilon(1e-15));
  CHECK(a.phi == doctest::Approx(b.phi));
  const Eigen::Vector3f xf(0, 0, 0), yf(20, 0, 0), of(40, 0, 0);
  CHECK(make_geometry(xf, yf, of, 1.0, 1.0).R_target_other == doctest::Approx(21.0));
}

TEST_CASE("hard topology errors") {
  Topology t = collinear();
  t.y_S = Vec3(21.5, 0, 0);
  CHECK_THROWS_AS(check_topology(t), std::invalid_argument);
  t = collinear();
  t.x_P = Vec3(20.5, 0, 0);
  CHECK_THROWS_AS(check_topology(t), std::invalid_argument);
  t = collinear();
  t.x_S = Vec3(19, 0, 0);  // exactly on the surface
  CHECK_THROWS_AS(check_topology(t), std::invalid_argument);
  t = collinear();
  t.a_P = -1;
  CHECK_THROWS_AS(check_topology(t), std::invalid_argument);
  t = collinear();
  t.a_P = 0;
  t.a_S = 0;
  CHECK_THROWS_AS(check_topology(t), std::invalid_argument);
  t = collinear();
  t.a_S = 0;
  CHECK_NOTHROW(check_topology(t));
  CHECK_THROWS_AS(derive_geometry(t, Link::Primary, Link::Secondary), std::invalid_argument);
}

TEST_CASE("validity report thresholds") {
  Topology t;
  t.x_P = Vec3(0, 0, 0);
  t.x_S = Vec3(0, -60, 0);
  t.y_P = Vec3(20, 0, 0);
  t.a_P = 5;
  t.a_S = 4;
  t.y_S = Vec3(20, 20, 0);  // separation 4 a_P
  ValidityReport r = validate_topology(t);
  CHECK(r.separation_ok);
  CHECK(r.all_ok());
  CHECK(r.messages.empty());

  t.y_S = Vec3(20, 10, 0);  // 2 max(a)
  r = validate_topology(t);
  CHECK_FALSE(r.separation_ok);
  CHECK_FALSE(r.messages.empty());

  t.y_S = Vec3(20, 20, 0);
  t.x_P = Vec3(10, 0, 0);  // 2 a_P from FAR_P
  r = validate_topology(t);
  CHECK_FALSE(r.far_field_ok[0][0]);
  CHECK(r.far_field_ok[0][1]);
  CHECK(r.far_field_ok[1][0]);
  CHECK_FALSE(r.all_ok());
  CHECK(validate_topology(t).messages == r.messages);
}

TEST_CASE("random topologies: ratio, relabeling, cosine round trip") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const Topology t = test::random_topology(rng);
    for (Link m : {Link::Primary, Link::Secondary}) {
      const TwoFarGeometry g = derive_geometry(t, m, Link::Primary);
      const TwoFarGeometry h = derive_geometry(t, m, Link::Secondary);
      REQUIRE(g.ratio() >= 0);
      REQUIRE(g.ratio() < 1);
      CHECK(g.phi >= 0);
      CHECK(g.phi <= std::numbers::pi);
      const TwoFarGeometry s = g.swapped();
      CHECK(s.r_target == h.r_target);
      CHECK(s.r_other == h.r_other);
      CHECK(s.R_target_other == h.R_target_other);
      CHECK(s.R_other_target == h.R_other_target);
      CHECK(s.a_target == h.a_target);
      CHECK(s.a_other == h.a_other);
      CHECK(h.phi == g.phi);
      // recover phi from the distance relation
      const double side = g.r_target - g.a_target;
      const double c = (side * side + g.r_other * g.r_other - g.R_target_other * g.R_target_other) /
                       (2 * side * g.r_other);
      const double phi = std::acos(std::clamp(c, -1.0, 1.0));
      if (g.phi > 1e-3 && g.phi < std::numbers::pi - 1e-3)
        CHECK(std::abs(phi - g.phi) <= 1e-12 * g.phi);
    }
  }
}

}
