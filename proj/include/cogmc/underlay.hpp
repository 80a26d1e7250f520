#pragma once

#include "cogmc/hitting.hpp"
#include "cogmc/model.hpp"

#include <Eigen/Core>

namespace cogmc {

/// Per-slot probabilities of sending bit 1 on each link.
struct TrafficModel {
  double q1P = 0.5;
  double q1S = 0.5;

  double q1(Link m) const { return m == Link::Primary ? q1P : q1S; }
  double q0(Link m) const { return 1.0 - q1(m); }
  void check() const;
};

/// N: primary emission per bit-1 slot. uL: secondary emission cap.
/// uM: allowed expected interference at the primary receiver (molecules).
struct ControlParams {
  long N = 300;
  long uL = 300;
  double uM = 5.0;

  void check() const;
};

/// Emission counts for slots 1..horizon. u_S(l-1) is the secondary budget of
/// slot l; the primary always emits u_P.
struct SlotSchedule {
  Eigen::VectorXi u_S;
  long u_P = 0;

  int horizon() const { return static_cast<int>(u_S.size()); }
  /// Secondary budget of slot l (1-based).
  long secondary(int l) const { return u_S(l - 1); }
  /// Emission of transmitter m in slot l (1-based).
  long emission(Link m, int l) const { return m == Link::Primary ? u_P : secondary(l); }
};

/// Secondary budgets that keep the expected interference at the primary
/// receiver at or below uM in every slot up to the horizon, computed slot by
/// slot from the budgets already assigned. Each budget is also capped so that
/// it leaves room in every later slot of the horizon; for taps that do not
/// increase with lag this cap never binds. Without any positive tap every
/// budget is uL.
SlotSchedule transmit_budget(const ChannelTaps& taps_SP, const TrafficModel& traffic,
                             const ControlParams& params, int horizon);

/// Budget for an ISI-free channel: floor(min(uL, uM / (q1S h_SP[0]))).
long transmit_budget_no_isi(const ChannelTaps& taps_SP, const TrafficModel& traffic,
                            const ControlParams& params);

/// Upper bound on the long-run secondary budget given the eventual hitting
/// fraction of the secondary -> primary pair.
long steady_state_bound(double p_inf_SP, const TrafficModel& traffic, const ControlParams& params);

/// Schedule with the secondary emitting uL every slot (no transmit control).
SlotSchedule uncontrolled_schedule(const ControlParams& params, int horizon);

/// Expected number of secondary molecules absorbed at the primary receiver in
/// slot l: q1S * sum_{k<=l} u_S[k] h_SP[l-k].
double expected_cci(const SlotSchedule& schedule, const ChannelTaps& taps_SP,
                    const TrafficModel& traffic, int l);

/// Expected total absorptions at receiver `rx` in slot l. `from_P` and
/// `from_S` are the taps of each transmitter toward `rx`.
double expected_absorbed(Link rx, const SlotSchedule& schedule, const ChannelTaps& from_P,
                         const ChannelTaps& from_S, const TrafficModel& traffic, int l);

/// Reported, never asserted: whether the tail of a schedule has settled or
/// keeps alternating.
struct ScheduleDiagnostics {
  bool settled = false;
  int settle_slot = 0;     // first slot of the constant tail, if settled
  long plateau = 0;        // tail value, if settled
  bool oscillating = false;  // sign of successive differences keeps flipping in the tail
};

ScheduleDiagnostics diagnose_schedule(const SlotSchedule& schedule, int window = 10);

}  // namespace cogmc
