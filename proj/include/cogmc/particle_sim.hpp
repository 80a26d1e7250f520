#pragma once

#include "cogmc/model.hpp"

#include <cstdint>
#include <vector>

namespace cogmc {

/// Brownian-particle oracle settings.
///
/// Results depend only on (topology, medium, seed, n_particles, batch_size,
/// dt, t_max, n_time_bins, coarse_stepping); the thread count never changes
/// them.
struct SimConfig {
  double dt = 1e-4;
  std::uint64_t n_particles = 100000;
  double t_max = 1.0;
  std::uint64_t seed = 0;
  int n_time_bins = 10;
  std::uint64_t batch_size = 2048;
  /// Merge consecutive Gaussian steps while the particle is so far from every
  /// receiver that none of the skipped step boundaries could fall inside one
  /// (probability below 1e-12 per merged jump).
  bool coarse_stepping = true;
  unsigned threads = 0;  // 0: hardware concurrency

  void check() const;
  std::uint64_t n_steps() const;
};

struct SimResult {
  std::vector<double> bin_end;  // right edge of each time bin, s
  // Cumulative absorptions by the end of each bin.
  std::vector<std::uint64_t> hits_target;
  std::vector<std::uint64_t> hits_other;
  std::uint64_t degraded = 0;
  std::uint64_t alive = 0;
  std::uint64_t n_particles = 0;

  double cdf_target(std::size_t bin) const;
  double cdf_other(std::size_t bin) const;
  /// 95% normal-approximation binomial half-width of cdf_target(bin).
  double ci_target(std::size_t bin) const;
  double ci_other(std::size_t bin) const;
  /// Binomial standard error of cdf_target(bin).
  double sigma_target(std::size_t bin) const;
  double sigma_other(std::size_t bin) const;
};

/// Releases n_particles molecules from transmitter `tx` and tracks them until
/// absorption by either receiver, degradation, or t_max. `target` selects
/// which receiver is reported as hits_target.
SimResult simulate_two_far(const Topology& topo, Link tx, Link target, const MediumParams& medium,
                           const SimConfig& cfg);

struct SlotHistogram {
  std::vector<double> target;  // fraction absorbed by target during slot k
  std::vector<double> other;
  std::uint64_t n_particles = 0;

  double sum_target() const;
};

/// Empirical counterpart of channel_taps: per-slot first-hit fractions for
/// L slots of length Tb. cfg.t_max and cfg.n_time_bins are replaced by
/// L * Tb and L.
SlotHistogram simulate_first_hit_histogram(const Topology& topo, Link tx, Link target,
                                           const MediumParams& medium, SimConfig cfg, double Tb,
                                           int L);

double binomial_sigma(double p, std::uint64_t n);

}  // namespace cogmc
