#include "cogmc/particle_sim.hpp"

#include "cogmc/detail/batches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cogmc {

namespace {

constexpr std::uint32_t kParticleStream = 0x7061u;

// A merged jump of k steps is allowed while sqrt(k) * sigma <= d / kJumpSafety,
// d being the distance to the nearest receiver surface. By the reflection
// principle the chance that any skipped boundary lands inside a receiver is
// at most 12 * Q(kJumpSafety / sqrt(3)) < 1e-12.
constexpr double kJumpSafety = 13.0;

struct Sphere {
  Vec3 center;
  double radius;
  double radius2;
};

struct BatchCounts {
  std::vector<std::uint64_t> target;
  std::vector<std::uint64_t> other;
  std::uint64_t degraded = 0;
  std::uint64_t alive = 0;
};

}  // namespace

void SimConfig::check() const {
  if (!(dt > 0)) throw std::invalid_argument("SimConfig: dt must be positive");
  if (n_particles < 1) throw std::invalid_argument("SimConfig: n_particles must be >= 1");
  if (!(t_max >= dt)) throw std::invalid_argument("SimConfig: t_max must be >= dt");
  if (n_time_bins < 1) throw std::invalid_argument("SimConfig: n_time_bins must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("SimConfig: batch_size must be >= 1");
}

std::uint64_t SimConfig::n_steps() const {
  return static_cast<std::uint64_t>(std::floor(t_max / dt + 1e-9));
}

double binomial_sigma(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double SimResult::cdf_target(std::size_t bin) const {
  return static_cast<double>(hits_target.at(bin)) / static_cast<double>(n_particles);
}
double SimResult::cdf_other(std::size_t bin) const {
  return static_cast<double>(hits_other.at(bin)) / static_cast<double>(n_particles);
}
double SimResult::sigma_target(std::size_t bin) const {
  return binomial_sigma(cdf_target(bin), n_particles);
}
double SimResult::sigma_other(std::size_t bin) const {
  return binomial_sigma(cdf_other(bin), n_particles);
}
double SimResult::ci_target(std::size_t bin) const { return 1.96 * sigma_target(bin); }
double SimResult::ci_other(std::size_t bin) const { return 1.96 * sigma_other(bin); }

SimResult simulate_two_far(const Topology& topo, Link tx, Link target, const MediumParams& medium,
                           const SimConfig& cfg) {
  check_topology(topo);
  medium.check();
  cfg.check();

  const std::array<Sphere, 2> spheres{
      Sphere{topo.rx(target), topo.radius(target), topo.radius(target) * topo.radius(target)},
      Sphere{topo.rx(other(target)), topo.radius(other(target)),
             topo.radius(other(target)) * topo.radius(other(target))}};
  const Vec3 origin = topo.tx(tx);
  const double sigma = std::sqrt(2.0 * medium.D * cfg.dt);
  const std::uint64_t n_steps = cfg.n_steps();
  const int n_bins = cfg.n_time_bins;
  const double bins_per_step = cfg.dt * n_bins / cfg.t_max;

  auto bin_of = [&](std::uint64_t step) {
    const double pos = static_cast<double>(step) * bins_per_step;
    const auto b = static_cast<long long>(std::ceil(pos - 1e-9)) - 1;
    return static_cast<std::size_t>(std::clamp<long long>(b, 0, n_bins - 1));
  };

  const std::uint64_t n_batches = (cfg.n_particles + cfg.batch_size - 1) / cfg.batch_size;
  auto run_batch = [&](std::uint64_t batch) {
    auto rng = detail::batch_engine(cfg.seed, batch, kParticleStream);
    std::normal_distribution<double> gauss;
    std::exponential_distribution<double> lifetime_dist(medium.mu > 0 ? medium.mu : 1.0);
    BatchCounts counts;
    counts.target.assign(n_bins, 0);
    counts.other.assign(n_bins, 0);
    const std::uint64_t first = batch * cfg.batch_size;
    const std::uint64_t last = std::min(cfg.n_particles, first + cfg.batch_size);
    for (std::uint64_t p = first; p < last; ++p) {
      const double lifetime =
          medium.mu > 0 ? lifetime_dist(rng) : std::numeric_limits<double>::infinity();
      Vec3 pos = origin;
      std::uint64_t step = 0;
      bool finished = false;
      while (step < n_steps) {
        std::array<double, 2> dist{};
        double gap = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 2; ++s) {
          dist[s] = (pos - spheres[s].center).norm();
          if (spheres[s].radius > 0) gap = std::min(gap, dist[s] - spheres[s].radius);
        }
        std::uint64_t k = 1;
        if (cfg.coarse_stepping) {
          const double reach = gap / (kJumpSafety * sigma);
          if (reach > 1.5) {
            const auto kmax = static_cast<std::uint64_t>(std::min(reach * reach, 1e15));
            k = std::clamp<std::uint64_t>(kmax, 1, n_steps - step);
          }
        }
        const double s = k == 1 ? sigma : sigma * std::sqrt(static_cast<double>(k));
        pos += s * Vec3(gauss(rng), gauss(rng), gauss(rng));
        step += k;
        if (static_cast<double>(step) * cfg.dt > lifetime) {
          ++counts.degraded;
          finished = true;
          break;
        }
        std::array<bool, 2> inside{};
        for (int sp = 0; sp < 2; ++sp)
          inside[sp] = spheres[sp].radius > 0 &&
                       (pos - spheres[sp].center).squaredNorm() <= spheres[sp].radius2;
        if (inside[0] || inside[1]) {
          int hit = inside[0] ? 0 : 1;
          if (inside[0] && inside[1]) hit = dist[0] <= dist[1] ? 0 : 1;
          (hit == 0 ? counts.target : counts.other)[bin_of(step)]++;
          finished = true;
          break;
        }
      }
      if (!finished) ++counts.alive;
    }
    return counts;
  };

  const auto batches = detail::run_batches<BatchCounts>(n_batches, cfg.threads, run_batch);

  SimResult res;
  res.n_particles = cfg.n_particles;
  res.bin_end.resize(n_bins);
  res.hits_target.assign(n_bins, 0);
  res.hits_other.assign(n_bins, 0);
  for (int b = 0; b < n_bins; ++b) res.bin_end[b] = cfg.t_max * (b + 1) / n_bins;
  for (const auto& c : batches) {
    for (int b = 0; b < n_bins; ++b) {
      res.hits_target[b] += c.target[b];
      res.hits_other[b] += c.other[b];
    }
    res.degraded += c.degraded;
    res.alive += c.alive;
  }
  std::partial_sum(res.hits_target.begin(), res.hits_target.end(), res.hits_target.begin());
  std::partial_sum(res.hits_other.begin(), res.hits_other.end(), res.hits_other.begin());
  return res;
}

double SlotHistogram::sum_target() const {
  return std::accumulate(target.begin(), target.end(), 0.0);
}

SlotHistogram simulate_first_hit_histogram(const Topology& topo, Link tx, Link target,
                                           const MediumParams& medium, SimConfig cfg, double Tb,
                                           int L) {
  if (L < 1 || !(Tb > 0)) throw std::invalid_argument("first-hit histogram: need L >= 1, Tb > 0");
  if (L * Tb > cfg.t_max * (1 + 1e-12))
    throw std::invalid_argument("first-hit histogram: L * Tb exceeds t_max");
  cfg.t_max = L * Tb;
  cfg.n_time_bins = L;
  const SimResult r = simulate_two_far(topo, tx, target, medium, cfg);
  SlotHistogram h;
  h.n_particles = r.n_particles;
  const double n = static_cast<double>(r.n_particles);
  std::uint64_t prev_t = 0, prev_o = 0;
  for (int k = 0; k < L; ++k) {
    h.target.push_back(static_cast<double>(r.hits_target[k] - prev_t) / n);
    h.other.push_back(static_cast<double>(r.hits_other[k] - prev_o) / n);
    prev_t = r.hits_target[k];
    prev_o = r.hits_other[k];
  }
  return h;
}

}  // namespace cogmc
