#pragma once

#include "cogmc/hitting.hpp"
#include "cogmc/underlay.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cogmc {

/// Molecules of the current slot of the detected link: Binomial(u, h) when
/// bit 1 was sent, nothing otherwise.
struct BinomialTerm {
  long u = 0;
  double h = 0;
};

/// An earlier or cross-link emission: with probability q1 the transmitter
/// sent u molecules, each arriving with probability h.
struct MixtureTerm {
  double q1 = 0.5;
  long u = 0;
  double h = 0;
};

/// Molecule count observed by one receiver in slot l, as the sum of
/// independent components: the current slot, l-1 same-link ISI terms
/// (lags 1..l-1), and l cross-link terms (lags 0..l-1).
struct ObservationModel {
  double q1 = 0.5;  // prior of bit 1 on the detected link
  BinomialTerm current;
  std::vector<MixtureTerm> isi;
  std::vector<MixtureTerm> cci;

  int slot() const { return static_cast<int>(isi.size()) + 1; }
  long support() const;  // largest possible count
  void check() const;
};

/// Assembles the observation model of receiver `rx` in slot l from the
/// schedule and the taps toward `rx`: `same_link` from its own transmitter,
/// `cross_link` from the other one.
ObservationModel build_observation_model(Link rx, const SlotSchedule& schedule,
                                         const ChannelTaps& same_link,
                                         const ChannelTaps& cross_link,
                                         const TrafficModel& traffic, int l);

/// pe0: P(decide 1 | bit 0). pe1: P(decide 0 | bit 1). pe = q0 pe0 + q1 pe1.
/// The receiver decides 1 iff the count is >= eta.
struct BerResult {
  double pe0 = 0;
  double pe1 = 0;
  double pe = 0;
};

class ComplexityLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of weak compositions enumerated by ber_exact.
double exact_enumeration_size(int components, long eta_int);

/// Error probabilities from the derivatives of the count's probability
/// generating function, expanded with the general Leibniz rule over all
/// weak compositions of n < ceil(eta). Throws ComplexityLimitError past
/// 1e8 compositions; use ber_convolution_oracle there.
BerResult ber_exact(const ObservationModel& model, double eta);

/// Same quantities from the explicitly convolved count PMFs.
BerResult ber_convolution_oracle(const ObservationModel& model, double eta);

/// Closed form for eta = 1 and equiprobable bits on the detected link.
double ber_corollary_eta1(const ObservationModel& model);

/// Closed form for a channel whose same-link taps beyond lag 0 vanish.
BerResult ber_no_isi(const ObservationModel& model, double eta);

struct ThresholdChoice {
  double eta = 1;
  double lambda0 = 0;  // mean count under bit 0 (Poisson approximation)
  double lambda1 = 0;
  bool grid_fallback = false;
};

/// Log-likelihood-ratio threshold under a Poisson approximation of the
/// count. Falls back to an integer grid search when the ratio test is
/// undefined (lambda0 == 0 or lambda1 == lambda0) or yields eta <= 0.
ThresholdChoice suboptimal_threshold(const ObservationModel& model);

struct GridOptimum {
  long eta = 1;
  BerResult ber;
};

/// Integer threshold in [lo, hi] minimizing pe (first minimizer on ties).
GridOptimum optimal_integer_threshold(const ObservationModel& model, long lo = 1, long hi = 50);

struct McBerResult {
  BerResult estimate;
  double sigma0 = 0, sigma1 = 0, sigma = 0;  // binomial standard errors
  double ci0 = 0, ci1 = 0, ci = 0;           // 95% half-widths
  std::uint64_t n0 = 0, n1 = 0, trials = 0;
};

/// Monte Carlo draw of the observation model and decision rule.
McBerResult mc_link_ber(const ObservationModel& model, double eta, std::uint64_t trials,
                        std::uint64_t seed, unsigned threads = 0);

}  // namespace cogmc
