#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogmc {

using Vec3 = Eigen::Vector3d;

/// Identifies a transmitter/receiver pair: the primary link has priority,
/// the secondary link runs the underlay transmit control.
enum class Link { Primary = 0, Secondary = 1 };

constexpr Link other(Link l) { return l == Link::Primary ? Link::Secondary : Link::Primary; }
constexpr int index(Link l) { return static_cast<int>(l); }
std::string_view name(Link l);

/// Diffusion medium. Units: um^2/s, 1/s, s.
struct MediumParams {
  double D = 100.0;
  double mu = 0.0;
  double Tb = 1.0;

  /// ln(2)/mu; +inf for a non-degrading medium.
  double half_life() const;
  void check() const;
};

/// Node placement in um. Receivers are fully absorbing spheres.
///
/// A receiver radius of exactly zero is accepted and means "no such
/// absorber"; it turns the two-receiver formulas into their single-sphere
/// counterparts and is used for degenerate cross-checks.
struct Topology {
  Vec3 x_P = Vec3::Zero();
  Vec3 x_S = Vec3::Zero();
  Vec3 y_P = Vec3::Zero();
  Vec3 y_S = Vec3::Zero();
  double a_P = 1.0;
  double a_S = 1.0;

  const Vec3& tx(Link m) const { return m == Link::Primary ? x_P : x_S; }
  const Vec3& rx(Link i) const { return i == Link::Primary ? y_P : y_S; }
  double radius(Link i) const { return i == Link::Primary ? a_P : a_S; }
  Vec3& tx(Link m) { return m == Link::Primary ? x_P : x_S; }

  /// Distance from the secondary transmitter to the primary receiver center.
  double r_SP() const { return (y_P - x_S).norm(); }
};

/// Hard topology errors: negative radii, both radii zero, overlapping
/// receivers, or a transmitter on/inside a receiver. Throws
/// std::invalid_argument.
void check_topology(const Topology& topo);

/// Distances and angle seen from one transmitter toward a target receiver in
/// the presence of the other receiver.
struct TwoFarGeometry {
  double r_target = 0;   // transmitter to target center
  double r_other = 0;    // transmitter to other center
  double R_target_other = 0;  // nearest point of target sphere to other center
  double R_other_target = 0;  // nearest point of other sphere to target center
  double phi = 0;        // angle between the two centers seen from the transmitter
  double a_target = 0;
  double a_other = 0;

  /// Geometric ratio of the reflection series, a_t a_o / (R_to R_ot); < 1.
  double ratio() const { return a_target * a_other / (R_target_other * R_other_target); }

  /// Path length of the n-th direct term (transmitter -> target after n
  /// round trips between the spheres).
  double direct_path(int n) const {
    return r_target - a_target + n * (R_other_target - a_target) + n * (R_target_other - a_other);
  }

  /// Path length of the n-th term that first visits the other sphere.
  double relay_path(int n) const {
    return r_other - a_other + (n + 1) * (R_other_target - a_target) +
           n * (R_target_other - a_other);
  }

  /// Coefficient a_t / r_t of the direct terms.
  double direct_weight() const { return a_target / r_target; }
  /// Coefficient a_t a_o / (r_o R_ot) of the relay terms.
  double relay_weight() const { return a_target * a_other / (r_other * R_other_target); }

  /// Same geometry with target and other receivers exchanged.
  TwoFarGeometry swapped() const;
};

/// Builds the geometry from raw positions. Accepts any Eigen 3-vector
/// expressions; the target radius must be positive and the other radius
/// non-negative.
template <typename DerivedX, typename DerivedT, typename DerivedO>
TwoFarGeometry make_geometry(const Eigen::MatrixBase<DerivedX>& x,
                             const Eigen::MatrixBase<DerivedT>& y_target,
                             const Eigen::MatrixBase<DerivedO>& y_other, double a_target,
                             double a_other) {
  const Vec3 to_target = (y_target - x).template cast<double>();
  const Vec3 to_other = (y_other - x).template cast<double>();
  TwoFarGeometry g;
  g.a_target = a_target;
  g.a_other = a_other;
  g.r_target = to_target.norm();
  g.r_other = to_other.norm();
  if (!(a_target > 0) || !(a_other >= 0))
    throw std::invalid_argument("receiver radii must satisfy a_target > 0, a_other >= 0");
  if (!(g.r_target > a_target) || !(g.r_other > a_other))
    throw std::invalid_argument("transmitter lies on or inside a receiver");
  if (!((y_target - y_other).template cast<double>().norm() > a_target + a_other))
    throw std::invalid_argument("receivers overlap");

  g.phi = std::atan2(to_target.cross(to_other).norm(), to_target.dot(to_other));
  const Vec3 nearest_target = x.template cast<double>() + (g.r_target - a_target) / g.r_target * to_target;
  const Vec3 nearest_other = x.template cast<double>() + (g.r_other - a_other) / g.r_other * to_other;
  g.R_target_other = (y_other.template cast<double>() - nearest_target).norm();
  g.R_other_target = (y_target.template cast<double>() - nearest_other).norm();
  return g;
}

/// Geometry for transmitter `tx` toward receiver `target`.
TwoFarGeometry derive_geometry(const Topology& topo, Link tx, Link target);

struct ValidityReport {
  // far_field_ok[m][i]: transmitter m is at least factor * a_i from receiver i.
  std::array<std::array<bool, 2>, 2> far_field_ok{{{true, true}, {true, true}}};
  bool separation_ok = true;
  std::vector<std::string> messages;

  bool all_ok() const;
};

/// Soft checks of the far-field regime in which the two-receiver
/// approximation is accurate. Never throws.
ValidityReport validate_topology(const Topology& topo, double factor = 3.0);

}  // namespace cogmc
