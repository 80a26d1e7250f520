#include "cogmc/underlay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cogmc {

namespace {

// sum_{k=1}^{l-1} u_S[k] h[l-k], accumulated in increasing k.
double isi_sum(const Eigen::VectorXi& u, const ChannelTaps& taps, int l) {
  double s = 0.0;
  for (int k = 1; k < l; ++k) s += u(k - 1) * taps[l - k];
  return s;
}

// Largest budget allowed in slot l given the interference already queued
// from earlier slots. The result satisfies q1S * (queued + u h0) <= uM when
// evaluated in the same floating-point order as expected_cci.
long slot_budget(double queued, double h0, const TrafficModel& traffic,
                 const ControlParams& params) {
  if (!(h0 > 0)) return params.uL;
  const double room = std::max(params.uM / traffic.q1S - queued, 0.0);
  const double ideal = std::min(static_cast<double>(params.uL), room / h0);
  long u = static_cast<long>(std::floor(ideal));
  while (u > 0 && traffic.q1S * (queued + u * h0) > params.uM) --u;
  return u;
}

void check_horizon(const ChannelTaps& taps, int horizon) {
  if (horizon < 1) throw std::invalid_argument("schedule horizon must be >= 1");
  if (taps.size() < horizon) throw std::invalid_argument("taps do not cover the horizon");
}

}  // namespace

void TrafficModel::check() const {
  if (!(q1P > 0 && q1P <= 1) || !(q1S > 0 && q1S <= 1))
    throw std::invalid_argument("traffic: q1P and q1S must lie in (0, 1]");
}

void ControlParams::check() const {
  if (N < 0 || uL < 0 || !(uM >= 0))
    throw std::invalid_argument("control: N, uL, uM must be non-negative");
}

SlotSchedule transmit_budget(const ChannelTaps& taps_SP, const TrafficModel& traffic,
                             const ControlParams& params, int horizon) {
  traffic.check();
  params.check();
  check_horizon(taps_SP, horizon);
  SlotSchedule sched;
  sched.u_P = params.N;
  sched.u_S = Eigen::VectorXi::Zero(horizon);
  // queued(k - 1): interference at slot k from the budgets fixed so far,
  // accumulated in the same order as expected_cci.
  Eigen::VectorXd queued = Eigen::VectorXd::Zero(horizon);
  const double cap = params.uM / traffic.q1S;
  auto fits = [&](int l, long u) {
    for (int k = l; k <= horizon; ++k)
      if (traffic.q1S * (queued(k - 1) + u * taps_SP[k - l]) > params.uM) return false;
    return true;
  };
  for (int l = 1; l <= horizon; ++l) {
    // Slot l must also leave room in every later slot, otherwise a lag tap
    // larger than h[0] can push a later slot over uM even at zero budget.
    double ideal = static_cast<double>(params.uL);
    for (int k = l; k <= horizon; ++k) {
      const double h = taps_SP[k - l];
      if (h > 0) ideal = std::min(ideal, std::max(cap - queued(k - 1), 0.0) / h);
    }
    long u = static_cast<long>(std::floor(ideal));
    while (u > 0 && !fits(l, u)) --u;
    sched.u_S(l - 1) = static_cast<int>(u);
    for (int k = l + 1; k <= horizon; ++k) queued(k - 1) += u * taps_SP[k - l];
  }
  return sched;
}

long transmit_budget_no_isi(const ChannelTaps& taps_SP, const TrafficModel& traffic,
                            const ControlParams& params) {
  traffic.check();
  params.check();
  check_horizon(taps_SP, 1);
  return slot_budget(0.0, taps_SP[0], traffic, params);
}

long steady_state_bound(double p_inf_SP, const TrafficModel& traffic,
                        const ControlParams& params) {
  traffic.check();
  params.check();
  if (!(p_inf_SP >= 0 && p_inf_SP <= 1))
    throw std::invalid_argument("steady_state_bound: p_inf must be a probability");
  if (p_inf_SP == 0) return params.uL;
  const double bound = params.uM / (traffic.q1S * p_inf_SP);
  return static_cast<long>(std::floor(std::min(static_cast<double>(params.uL), bound)));
}

SlotSchedule uncontrolled_schedule(const ControlParams& params, int horizon) {
  params.check();
  if (horizon < 1) throw std::invalid_argument("schedule horizon must be >= 1");
  SlotSchedule sched;
  sched.u_P = params.N;
  sched.u_S = Eigen::VectorXi::Constant(horizon, static_cast<int>(params.uL));
  return sched;
}

double expected_cci(const SlotSchedule& schedule, const ChannelTaps& taps_SP,
                    const TrafficModel& traffic, int l) {
  if (l < 1 || l > schedule.horizon()) throw std::invalid_argument("expected_cci: slot out of range");
  check_horizon(taps_SP, l);
  return traffic.q1S * (isi_sum(schedule.u_S, taps_SP, l) + schedule.u_S(l - 1) * taps_SP[0]);
}

double expected_absorbed(Link rx, const SlotSchedule& schedule, const ChannelTaps& from_P,
                         const ChannelTaps& from_S, const TrafficModel& traffic, int l) {
  if (l < 1 || l > schedule.horizon())
    throw std::invalid_argument("expected_absorbed: slot out of range");
  check_horizon(from_P, l);
  check_horizon(from_S, l);
  if (from_P.tx != Link::Primary || from_S.tx != Link::Secondary || from_P.rx != rx ||
      from_S.rx != rx)
    throw std::invalid_argument("expected_absorbed: taps are not labelled P->rx and S->rx");
  const double primary = schedule.u_P * traffic.q1P * from_P.p_cum(l);
  return primary + traffic.q1S * (isi_sum(schedule.u_S, from_S, l) +
                                  schedule.u_S(l - 1) * from_S[0]);
}

ScheduleDiagnostics diagnose_schedule(const SlotSchedule& schedule, int window) {
  ScheduleDiagnostics d;
  const int n = schedule.horizon();
  if (n == 0) return d;
  const long last = schedule.u_S(n - 1);
  int start = n;
  while (start > 1 && schedule.u_S(start - 2) == last) --start;
  if (n - start + 1 >= std::min(window, n)) {
    d.settled = true;
    d.settle_slot = start;
    d.plateau = last;
  }
  const int tail = std::min(window, n - 1);
  if (tail >= 3) {
    int flips = 0;
    long prev_diff = 0;
    for (int k = n - tail; k < n; ++k) {
      const long diff = schedule.u_S(k) - schedule.u_S(k - 1);
      if (diff != 0 && prev_diff != 0 && (diff > 0) != (prev_diff > 0)) ++flips;
      if (diff != 0) prev_diff = diff;
    }
    d.oscillating = flips >= tail / 2;
  }
  return d;
}

}  // namespace cogmc
