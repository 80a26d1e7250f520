#include "cogmc/hitting.hpp"

#include "cogmc/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cogmc {

namespace {

struct Term {
  double value;  // signed contribution of this index
  double bound;  // upper bound on |value|, nonincreasing in n
};

// Sums sum_n ratio^n * term(n) under the SeriesControl stopping rule.
// `tail_ok(n)` must hold before the bound may stop the summation.
template <typename TermFn, typename TailFn>
SeriesSum sum_series(double ratio, const SeriesControl& ctrl, TermFn term, TailFn tail_ok) {
  SeriesSum s;
  double weight = 1.0;
  for (int n = 0; n < ctrl.n_max; ++n) {
    const Term t = term(n);
    s.value += weight * t.value;
    s.terms = n + 1;
    if (weight * t.bound < ctrl.tol && tail_ok(n)) return s;
    weight *= ratio;
  }
  s.truncated = true;
  return s;
}

void check_geometry(const TwoFarGeometry& g) {
  if (!(g.a_target > 0) || !(g.a_other >= 0) || !(g.r_target > g.a_target) ||
      !(g.r_other > g.a_other))
    throw std::invalid_argument("invalid two-receiver geometry");
  const double ratio = g.ratio();
  if (!(ratio >= 0 && ratio < 1))
    throw std::domain_error("two-receiver geometry has series ratio >= 1");
}

void check_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(what);
}

// Probability that a 1-D first passage over distance x happens before t and
// before an exponential lifetime with rate mu ends.
double degraded_passage(double x, double t, double D, double mu) {
  const double a = x / std::sqrt(4.0 * D * t);
  const double b = std::sqrt(mu * t);
  // exp(2ab) erfc(a + b) = erfcx(a + b) exp(-a^2 - b^2)
  const double damp = std::exp(-(a * a + b * b));
  const double plus = special::erfcx(a + b) * damp;
  const double minus = (a >= b) ? special::erfcx(a - b) * damp
                                : special::erfc(a - b) * std::exp(-2.0 * a * b);
  return 0.5 * (plus + minus);
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

void SeriesControl::check() const {
  if (!(tol > 0)) throw std::invalid_argument("SeriesControl: tol must be positive");
  if (n_max < 1) throw std::invalid_argument("SeriesControl: n_max must be >= 1");
}

double p_single(double t, double a, double r, double D) {
  if (!(a > 0) || !(r > a)) throw std::invalid_argument("p_single: requires 0 < a < r");
  check_positive(D, "p_single: D must be positive");
  if (!(t >= 0)) throw std::invalid_argument("p_single: t must be non-negative");
  if (t == 0) return 0.0;
  return a / r * special::erfc((r - a) / std::sqrt(4.0 * D * t));
}

SeriesSum p_two_far(double t, const TwoFarGeometry& geom, double D, const SeriesControl& ctrl) {
  check_geometry(geom);
  check_positive(D, "p_two_far: D must be positive");
  ctrl.check();
  if (!(t >= 0)) throw std::invalid_argument("p_two_far: t must be non-negative");
  if (t == 0) return {};
  const double scale = 1.0 / std::sqrt(4.0 * D * t);
  const double wd = geom.direct_weight();
  const double wr = geom.relay_weight();
  SeriesSum s = sum_series(
      geom.ratio(), ctrl,
      [&](int n) {
        const double direct = wd * special::erfc(geom.direct_path(n) * scale);
        const double relay = wr * special::erfc(geom.relay_path(n) * scale);
        return Term{direct - relay, direct + relay};
      },
      [](int) { return true; });
  s.value = clamp_probability(s.value);
  return s;
}

SeriesSum hitting_rate(double tau, const TwoFarGeometry& geom, double D,
                       const SeriesControl& ctrl) {
  check_geometry(geom);
  check_positive(D, "hitting_rate: D must be positive");
  ctrl.check();
  if (!(tau > 0)) throw std::invalid_argument("hitting_rate: tau must be positive");
  const double four_d_tau = 4.0 * D * tau;
  const double norm = 1.0 / std::sqrt(std::numbers::pi * four_d_tau * tau * tau);
  // x exp(-x^2 / 4D tau) peaks at x = sqrt(2 D tau); past it the terms shrink.
  const double peak = std::sqrt(2.0 * D * tau);
  auto density = [&](double x) { return x * norm * std::exp(-x * x / four_d_tau); };
  const double wd = geom.direct_weight();
  const double wr = geom.relay_weight();
  SeriesSum s = sum_series(
      geom.ratio(), ctrl,
      [&](int n) {
        const double direct = wd * density(geom.direct_path(n));
        const double relay = wr * density(geom.relay_path(n));
        return Term{direct - relay, direct + relay};
      },
      [&](int n) { return geom.direct_path(n) >= peak; });
  s.value = std::max(s.value, 0.0);
  return s;
}

SeriesSum p_two_far_deg(double t, const TwoFarGeometry& geom, double D, double mu,
                        const SeriesControl& ctrl) {
  if (!(mu >= 0)) throw std::invalid_argument("p_two_far_deg: mu must be non-negative");
  if (mu == 0) return p_two_far(t, geom, D, ctrl);
  check_geometry(geom);
  check_positive(D, "p_two_far_deg: D must be positive");
  ctrl.check();
  if (!(t >= 0)) throw std::invalid_argument("p_two_far_deg: t must be non-negative");
  if (t == 0) return {};
  if (std::isinf(mu)) return {0.0, 1, false};
  const double wd = geom.direct_weight();
  const double wr = geom.relay_weight();
  SeriesSum s = sum_series(
      geom.ratio(), ctrl,
      [&](int n) {
        const double direct = wd * degraded_passage(geom.direct_path(n), t, D, mu);
        const double relay = wr * degraded_passage(geom.relay_path(n), t, D, mu);
        return Term{direct - relay, direct + relay};
      },
      [](int) { return true; });
  s.value = clamp_probability(s.value);
  return s;
}

double p_two_far_inf(const TwoFarGeometry& g) {
  check_geometry(g);
  const double R1 = g.R_target_other;
  const double R2 = g.R_other_target;
  return g.a_target * R1 / (R1 * R2 - g.a_target * g.a_other) *
         (R2 / g.r_target - g.a_other / g.r_other);
}

double p_two_far_deg_inf(const TwoFarGeometry& g, double D, double mu) {
  check_geometry(g);
  check_positive(D, "p_two_far_deg_inf: D must be positive");
  if (!(mu >= 0)) throw std::invalid_argument("p_two_far_deg_inf: mu must be non-negative");
  if (std::isinf(mu)) return 0.0;
  const double k = std::sqrt(mu / D);
  const double R1 = g.R_target_other;
  const double R2 = g.R_other_target;
  const double loop = R1 + R2 - g.a_target - g.a_other;
  const double denom = R1 * R2 - g.a_target * g.a_other * std::exp(-loop * k);
  const double direct = R2 / g.r_target * std::exp(-(g.r_target - g.a_target) * k);
  const double relay =
      g.a_other / g.r_other * std::exp(-(g.r_other - g.a_other + R2 - g.a_target) * k);
  return g.a_target * R1 / denom * (direct - relay);
}

ChannelTaps channel_taps(const TwoFarGeometry& geom, double D, double mu, double Tb, int L,
                         const SeriesControl& ctrl) {
  if (L < 1) throw std::invalid_argument("channel_taps: L must be >= 1");
  check_positive(Tb, "channel_taps: Tb must be positive");
  ChannelTaps out;
  out.taps.resize(L);
  out.p_cum.resize(L + 1);
  double prev = 0.0;  // running maximum keeps every tap non-negative
  out.p_cum(0) = 0.0;
  for (int k = 0; k < L; ++k) {
    const SeriesSum p = p_two_far_deg((k + 1) * Tb, geom, D, mu, ctrl);
    out.truncated = out.truncated || p.truncated;
    const double cur = std::max(prev, p.value);
    out.taps(k) = cur - prev;
    out.p_cum(k + 1) = out.p_cum(k) + out.taps(k);
    prev = cur;
  }
  return out;
}

ChannelTaps channel_taps(const Topology& topo, Link tx, Link rx, const MediumParams& medium, int L,
                         const SeriesControl& ctrl) {
  medium.check();
  ChannelTaps out =
      channel_taps(derive_geometry(topo, tx, rx), medium.D, medium.mu, medium.Tb, L, ctrl);
  out.tx = tx;
  out.rx = rx;
  return out;
}

}  // namespace cogmc
