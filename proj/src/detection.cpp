#include "cogmc/detection.hpp"

#include "cogmc/detail/batches.hpp"
#include "cogmc/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cogmc {

namespace {

constexpr double kMaxCompositions = 1e8;
constexpr long kMaxSupport = 1000000;
constexpr std::uint32_t kLinkStream = 0x6265u;

void check_probability(double p, const char* what) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument(what);
}

long threshold_count(double eta) {
  if (!(eta > 0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive and finite");
  return static_cast<long>(std::ceil(eta));
}

// u (u-1) ... (u-k+1)
double falling_factorial(long u, long k) {
  double f = 1.0;
  for (long j = 0; j < k; ++j) f *= static_cast<double>(u - j);
  return f;
}

// k-th derivative at v = 0 of (1 + h (v - 1))^u.
double binomial_pgf_derivative(long u, double h, long k) {
  if (k > u) return 0.0;
  return std::pow(1.0 - h, static_cast<double>(u - k)) * std::pow(h, static_cast<double>(k)) *
         falling_factorial(u, k);
}

// k-th derivative at v = 0 of q0 + q1 (1 + h (v - 1))^u.
double mixture_pgf_derivative(const MixtureTerm& t, long k) {
  return (k == 0 ? 1.0 - t.q1 : 0.0) + t.q1 * binomial_pgf_derivative(t.u, t.h, k);
}

// One PGF factor: derivatives 0..max_order at v = 0, plus the order above
// which every derivative vanishes.
struct Factor {
  std::vector<double> deriv;
  long cap;
};

Factor make_factor(long u, long max_order, auto derivative) {
  Factor f;
  f.cap = std::min(u, max_order);
  for (long k = 0; k <= f.cap; ++k) f.deriv.push_back(derivative(k));
  return f;
}

// sum over weak compositions n_0 + ... + n_{K-1} = n with n_k <= cap_k of
// prod_k deriv_k[n_k] / n_k!.
class LeibnizExpansion {
 public:
  explicit LeibnizExpansion(std::vector<Factor> factors, long max_order)
      : factors_(std::move(factors)), inv_fact_(max_order + 1, 1.0) {
    for (long j = 1; j <= max_order; ++j) inv_fact_[j] = inv_fact_[j - 1] / static_cast<double>(j);
  }

  double compositions_of(long n) const { return recurse(0, n); }

 private:
  double recurse(std::size_t idx, long remaining) const {
    const Factor& f = factors_[idx];
    if (idx + 1 == factors_.size()) {
      if (remaining > f.cap) return 0.0;
      return f.deriv[remaining] * inv_fact_[remaining];
    }
    double sum = 0.0;
    const long top = std::min(remaining, f.cap);
    for (long k = 0; k <= top; ++k) {
      const double here = f.deriv[k] * inv_fact_[k];
      if (here == 0.0) continue;
      sum += here * recurse(idx + 1, remaining - k);
    }
    return sum;
  }

  std::vector<Factor> factors_;
  std::vector<double> inv_fact_;
};

// PMF of Binomial(u, h), built outward from the mode and normalized.
std::vector<double> binomial_pmf(long u, double h) {
  std::vector<double> p(u + 1, 0.0);
  if (h <= 0.0) {
    p[0] = 1.0;
    return p;
  }
  if (h >= 1.0) {
    p[u] = 1.0;
    return p;
  }
  const long mode = std::min(u, static_cast<long>(std::floor((u + 1) * h)));
  const double odds = h / (1.0 - h);
  p[mode] = 1.0;
  for (long k = mode; k < u; ++k)
    p[k + 1] = p[k] * static_cast<double>(u - k) / static_cast<double>(k + 1) * odds;
  for (long k = mode; k > 0; --k)
    p[k - 1] = p[k] * static_cast<double>(k) / static_cast<double>(u - k + 1) / odds;
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> mixture_pmf(const MixtureTerm& t) {
  std::vector<double> p = binomial_pmf(t.u, t.h);
  for (double& v : p) v *= t.q1;
  p[0] += 1.0 - t.q1;
  return p;
}

// Convolution truncated to the first `keep` entries.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t keep) {
  const std::size_t n = std::min(keep, a.size() + b.size() - 1);
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), n - i);
    for (std::size_t j = 0; j < jmax; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

double lower_cdf(const std::vector<double>& pmf, long upto) {
  double s = 0.0;
  for (long k = 0; k <= upto && k < static_cast<long>(pmf.size()); ++k) s += pmf[k];
  return s;
}

BerResult combine(double q1, double pe0, double pe1) {
  return {pe0, pe1, (1.0 - q1) * pe0 + q1 * pe1};
}

// Derivatives 0..max_order at v = 0 of the product of the cross-link PGFs,
// by repeated two-factor Leibniz products.
std::vector<double> cci_derivatives(const std::vector<MixtureTerm>& cci, long max_order) {
  std::vector<double> acc(max_order + 1, 0.0);
  acc[0] = 1.0;
  for (const MixtureTerm& t : cci) {
    std::vector<double> d(max_order + 1);
    for (long k = 0; k <= max_order; ++k) d[k] = mixture_pgf_derivative(t, k);
    std::vector<double> next(max_order + 1, 0.0);
    for (long n = 0; n <= max_order; ++n) {
      double binom = 1.0;  // C(n, k)
      for (long k = 0; k <= n; ++k) {
        next[n] += binom * acc[n - k] * d[k];
        binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

long ObservationModel::support() const {
  long s = current.u;
  for (const auto& t : isi) s += t.u;
  for (const auto& t : cci) s += t.u;
  return s;
}

void ObservationModel::check() const {
  if (!(q1 > 0 && q1 <= 1)) throw std::invalid_argument("observation: q1 must lie in (0, 1]");
  if (current.u < 0) throw std::invalid_argument("observation: negative emission count");
  check_probability(current.h, "observation: tap outside [0, 1]");
  if (cci.size() != isi.size() + 1)
    throw std::invalid_argument("observation: need l-1 ISI terms and l cross-link terms");
  for (const auto* group : {&isi, &cci}) {
    for (const MixtureTerm& t : *group) {
      if (t.u < 0) throw std::invalid_argument("observation: negative emission count");
      check_probability(t.h, "observation: tap outside [0, 1]");
      check_probability(t.q1, "observation: prior outside [0, 1]");
    }
  }
}

ObservationModel build_observation_model(Link rx, const SlotSchedule& schedule,
                                         const ChannelTaps& same_link,
                                         const ChannelTaps& cross_link,
                                         const TrafficModel& traffic, int l) {
  traffic.check();
  if (l < 1 || l > schedule.horizon()) throw std::invalid_argument("observation: slot out of range");
  if (same_link.size() < l || cross_link.size() < l)
    throw std::invalid_argument("observation: taps do not cover the slot");
  if (same_link.tx != rx || same_link.rx != rx || cross_link.tx != other(rx) ||
      cross_link.rx != rx)
    throw std::invalid_argument("observation: taps are labelled for a different link");
  const Link self = rx;
  const Link peer = other(rx);
  ObservationModel m;
  m.q1 = traffic.q1(self);
  m.current = {schedule.emission(self, l), same_link[0]};
  for (int r = 1; r < l; ++r)
    m.isi.push_back({traffic.q1(self), schedule.emission(self, l - r), same_link[r]});
  for (int s = 0; s < l; ++s)
    m.cci.push_back({traffic.q1(peer), schedule.emission(peer, l - s), cross_link[s]});
  return m;
}

double exact_enumeration_size(int components, long eta_int) {
  // sum_{n < eta} C(n + K - 1, K - 1)  ==  C(eta + K - 1, K)
  double c = 1.0;
  for (int j = 1; j <= components; ++j)
    c = c * static_cast<double>(eta_int - 1 + j) / static_cast<double>(j);
  return c;
}

BerResult ber_exact(const ObservationModel& model, double eta) {
  model.check();
  const long m = threshold_count(eta);
  const int components = 2 * model.slot();
  if (exact_enumeration_size(components, m) > kMaxCompositions)
    throw ComplexityLimitError("ber_exact: composition count exceeds 1e8; use the convolution oracle");
  const long order = m - 1;

  std::vector<Factor> interference;
  for (const auto* group : {&model.isi, &model.cci})
    for (const MixtureTerm& t : *group)
      interference.push_back(
          make_factor(t.u, order, [&](long k) { return mixture_pgf_derivative(t, k); }));

  std::vector<Factor> with_current;
  with_current.push_back(make_factor(model.current.u, order, [&](long k) {
    return binomial_pgf_derivative(model.current.u, model.current.h, k);
  }));
  with_current.insert(with_current.end(), interference.begin(), interference.end());

  const LeibnizExpansion bit1(std::move(with_current), order);
  const LeibnizExpansion bit0(std::move(interference), order);
  double sum1 = 0.0, sum0 = 0.0;
  for (long n = 0; n <= order; ++n) {
    sum1 += bit1.compositions_of(n);
    sum0 += bit0.compositions_of(n);
  }
  return combine(model.q1, 1.0 - sum0, sum1);
}

BerResult ber_convolution_oracle(const ObservationModel& model, double eta) {
  model.check();
  const long m = threshold_count(eta);
  if (model.support() > kMaxSupport)
    throw std::length_error("ber_convolution_oracle: count support exceeds 1e6");
  const auto keep = static_cast<std::size_t>(std::min(m, model.support() + 1));

  std::vector<double> interference{1.0};
  for (const auto* group : {&model.isi, &model.cci})
    for (const MixtureTerm& t : *group) interference = convolve(interference, mixture_pmf(t), keep);
  const std::vector<double> with_current =
      convolve(interference, binomial_pmf(model.current.u, model.current.h), keep);

  const double cdf1 = lower_cdf(with_current, m - 1);
  const double cdf0 = lower_cdf(interference, m - 1);
  return combine(model.q1, 1.0 - cdf0, cdf1);
}

double ber_corollary_eta1(const ObservationModel& model) {
  model.check();
  if (model.q1 != 0.5) throw std::invalid_argument("ber_corollary_eta1: requires q1 = 1/2");
  double no_interference = 1.0;
  for (const MixtureTerm& t : model.isi) no_interference *= mixture_pgf_derivative(t, 0);
  for (const MixtureTerm& t : model.cci) no_interference *= mixture_pgf_derivative(t, 0);
  const double silent = binomial_pgf_derivative(model.current.u, model.current.h, 0);
  return 0.5 * (1.0 + no_interference * (silent - 1.0));
}

BerResult ber_no_isi(const ObservationModel& model, double eta) {
  model.check();
  for (const MixtureTerm& t : model.isi)
    if (t.h != 0.0 && t.u != 0)
      throw std::invalid_argument("ber_no_isi: same-link taps beyond lag 0 must vanish");
  const long m = threshold_count(eta);
  const long order = m - 1;
  const std::vector<double> cci = cci_derivatives(model.cci, order);
  double sum1 = 0.0, sum0 = 0.0;
  double inv_fact = 1.0;  // 1/n!
  for (long n = 0; n <= order; ++n) {
    if (n > 0) inv_fact /= static_cast<double>(n);
    double inner = 0.0;
    double binom = 1.0;  // C(n, k)
    for (long k = 0; k <= n; ++k) {
      inner += binom * binomial_pgf_derivative(model.current.u, model.current.h, n - k) * cci[k];
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    sum1 += inv_fact * inner;
    sum0 += inv_fact * cci[n];
  }
  return combine(model.q1, 1.0 - sum0, sum1);
}

ThresholdChoice suboptimal_threshold(const ObservationModel& model) {
  model.check();
  ThresholdChoice c;
  for (const auto* group : {&model.isi, &model.cci})
    for (const MixtureTerm& t : *group) c.lambda0 += t.q1 * static_cast<double>(t.u) * t.h;
  const double signal = static_cast<double>(model.current.u) * model.current.h;
  c.lambda1 = signal + c.lambda0;
  if (c.lambda0 > 0 && c.lambda1 > c.lambda0) {
    c.eta = (std::log((1.0 - model.q1) / model.q1) + signal) / std::log(c.lambda1 / c.lambda0);
    if (c.eta > 0 && std::isfinite(c.eta)) return c;
  }
  c.grid_fallback = true;
  const long hi = std::max<long>(50, model.support() + 1);
  c.eta = static_cast<double>(optimal_integer_threshold(model, 1, hi).eta);
  return c;
}

GridOptimum optimal_integer_threshold(const ObservationModel& model, long lo, long hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("threshold grid must satisfy 1 <= lo <= hi");
  GridOptimum best;
  best.ber.pe = std::numeric_limits<double>::infinity();
  for (long eta = lo; eta <= hi; ++eta) {
    const BerResult r = ber_convolution_oracle(model, static_cast<double>(eta));
    if (r.pe < best.ber.pe) best = {eta, r};
  }
  return best;
}

McBerResult mc_link_ber(const ObservationModel& model, double eta, std::uint64_t trials,
                        std::uint64_t seed, unsigned threads) {
  model.check();
  threshold_count(eta);
  if (trials < 1) throw std::invalid_argument("mc_link_ber: trials must be >= 1");
  constexpr std::uint64_t kBatch = 65536;
  struct Counts {
    std::uint64_t n0 = 0, n1 = 0, err0 = 0, err1 = 0;
  };
  std::vector<MixtureTerm> interference = model.isi;
  interference.insert(interference.end(), model.cci.begin(), model.cci.end());

  const std::uint64_t n_batches = (trials + kBatch - 1) / kBatch;
  auto batches = detail::run_batches<Counts>(n_batches, threads, [&](std::uint64_t b) {
    auto rng = detail::batch_engine(seed, b, kLinkStream);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::binomial_distribution<long> current(model.current.u, model.current.h);
    std::vector<std::binomial_distribution<long>> comps;
    for (const MixtureTerm& t : interference) comps.emplace_back(t.u, t.h);
    Counts c;
    const std::uint64_t n = std::min(kBatch, trials - b * kBatch);
    for (std::uint64_t i = 0; i < n; ++i) {
      const bool bit = unif(rng) < model.q1;
      long count = bit ? current(rng) : 0;
      for (std::size_t k = 0; k < interference.size(); ++k)
        if (unif(rng) < interference[k].q1) count += comps[k](rng);
      const bool decided = static_cast<double>(count) >= eta;
      if (bit) {
        ++c.n1;
        c.err1 += decided ? 0 : 1;
      } else {
        ++c.n0;
        c.err0 += decided ? 1 : 0;
      }
    }
    return c;
  });

  Counts total;
  for (const Counts& c : batches) {
    total.n0 += c.n0;
    total.n1 += c.n1;
    total.err0 += c.err0;
    total.err1 += c.err1;
  }
  McBerResult r;
  r.trials = trials;
  r.n0 = total.n0;
  r.n1 = total.n1;
  r.estimate.pe0 = total.n0 ? static_cast<double>(total.err0) / static_cast<double>(total.n0) : 0.0;
  r.estimate.pe1 = total.n1 ? static_cast<double>(total.err1) / static_cast<double>(total.n1) : 0.0;
  r.estimate.pe = static_cast<double>(total.err0 + total.err1) / static_cast<double>(trials);
  r.sigma0 = binomial_sigma(r.estimate.pe0, total.n0);
  r.sigma1 = binomial_sigma(r.estimate.pe1, total.n1);
  r.sigma = binomial_sigma(r.estimate.pe, trials);
  r.ci0 = 1.96 * r.sigma0;
  r.ci1 = 1.96 * r.sigma1;
  r.ci = 1.96 * r.sigma;
  return r;
}

}  // namespace cogmc
