#pragma once

#include "cogmc/model.hpp"

#include <Eigen/Core>

namespace cogmc {

/// Truncation rule for the reflection series: stop at the first index whose
/// term bound drops below `tol`, or after `n_max` terms with `truncated` set.
struct SeriesControl {
  double tol = 1e-12;
  int n_max = 200;

  void check() const;
};

struct SeriesSum {
  double value = 0;
  int terms = 0;
  bool truncated = false;

  operator double() const { return value; }
};

/// Hitting probability of a single fully absorbing sphere of radius `a` at
/// center distance `r`: (a/r) erfc((r-a)/sqrt(4 D t)).
double p_single(double t, double a, double r, double D);

/// Probability that a molecule released at t=0 has been absorbed by the
/// target receiver by time t while the other receiver competes for it.
SeriesSum p_two_far(double t, const TwoFarGeometry& geom, double D, const SeriesControl& ctrl = {});

/// Time derivative of p_two_far. tau must be positive.
SeriesSum hitting_rate(double tau, const TwoFarGeometry& geom, double D,
                       const SeriesControl& ctrl = {});

/// p_two_far for molecules that degrade with rate mu (only non-degraded
/// molecules count). mu = 0 returns p_two_far exactly.
SeriesSum p_two_far_deg(double t, const TwoFarGeometry& geom, double D, double mu,
                        const SeriesControl& ctrl = {});

/// Fraction of molecules eventually absorbed by the target (t -> inf, mu = 0).
double p_two_far_inf(const TwoFarGeometry& geom);

/// Fraction of non-degraded molecules eventually absorbed by the target.
double p_two_far_deg_inf(const TwoFarGeometry& geom, double D, double mu);

/// Slotted channel for one transmitter -> receiver pair.
///
/// taps(k) is the probability that a molecule emitted at the start of a slot
/// is absorbed k slots later; p_cum(k) = taps(0) + ... + taps(k-1), so
/// taps.sum() == p_cum(L) holds by construction.
struct ChannelTaps {
  Eigen::VectorXd taps;
  Eigen::VectorXd p_cum;
  Link tx = Link::Primary;
  Link rx = Link::Primary;
  bool truncated = false;

  Eigen::Index size() const { return taps.size(); }
  double operator[](Eigen::Index k) const { return taps(k); }
};

ChannelTaps channel_taps(const TwoFarGeometry& geom, double D, double mu, double Tb, int L,
                         const SeriesControl& ctrl = {});

/// Taps for transmitter `tx` toward receiver `rx` of a topology.
ChannelTaps channel_taps(const Topology& topo, Link tx, Link rx, const MediumParams& medium, int L,
                         const SeriesControl& ctrl = {});

}  // namespace cogmc
