#include "cogmc/detection.hpp"
#include "cogmc/particle_sim.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cogmc;

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

ObservationModel random_model(std::mt19937_64& rng, int l, long u_max) {
  std::uniform_int_distribution<long> count(0, u_max);
  std::uniform_real_distribution<double> prob(0.0, 0.4);
  std::uniform_real_distribution<double> prior(0.1, 0.9);
  ObservationModel m;
  m.q1 = prior(rng);
  m.current = {count(rng), prob(rng)};
  for (int r = 1; r < l; ++r) m.isi.push_back({m.q1, count(rng), prob(rng)});
  const double peer = prior(rng);
  for (int s = 0; s < l; ++s) m.cci.push_back({peer, count(rng), prob(rng)});
  return m;
}

double binomial_cdf(long u, double h, long k) {
  double s = 0;
  for (long j = 0; j <= k && j <= u; ++j)
    s += std::exp(std::lgamma(u + 1.0) - std::lgamma(j + 1.0) - std::lgamma(u - j + 1.0)) *
         std::pow(h, j) * std::pow(1 - h, u - j);
  return s;
}

ChannelTaps labelled(Link tx, Link rx, std::vector<double> v) {
  ChannelTaps c;
  c.tx = tx;
  c.rx = rx;
  c.taps = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  c.p_cum = Eigen::VectorXd::Zero(c.taps.size() + 1);
  for (Eigen::Index k = 0; k < c.taps.size(); ++k) c.p_cum(k + 1) = c.p_cum(k) + c.taps(k);
  return c;
}

}  // namespace

TEST_SUITE("detection") {

TEST_CASE("observation model layout") {
  SlotSchedule s;
  s.u_P = 300;
  s.u_S.resize(3);
  s.u_S << 50, 40, 30;
  const ChannelTaps pp = labelled(Link::Primary, Link::Primary, {0.2, 0.1, 0.05});
  const ChannelTaps sp = labelled(Link::Secondary, Link::Primary, {0.03, 0.02, 0.01});
  const ObservationModel m = build_observation_model(Link::Primary, s, pp, sp, {0.4, 0.6}, 3);
  CHECK(m.slot() == 3);
  CHECK(m.q1 == 0.4);
  CHECK(m.current.u == 300);
  CHECK(m.current.h == 0.2);
  REQUIRE(m.isi.size() == 2);
  CHECK(m.isi[0].h == 0.1);
  CHECK(m.isi[1].h == 0.05);
  CHECK(m.isi[0].q1 == 0.4);
  REQUIRE(m.cci.size() == 3);
  CHECK(m.cci[0].u == 30);  // lag 0: this slot's secondary emission
  CHECK(m.cci[0].h == 0.03);
  CHECK(m.cci[2].u == 50);
  CHECK(m.cci[2].h == 0.01);
  CHECK(m.cci[1].q1 == 0.6);
  CHECK(m.support() == 300 * 3 + 120);

  const ObservationModel ms = build_observation_model(
      Link::Secondary, s, labelled(Link::Secondary, Link::Secondary, {0.2, 0.1, 0.05}),
      labelled(Link::Primary, Link::Secondary, {0.03, 0.02, 0.01}), {0.4, 0.6}, 3);
  CHECK(ms.current.u == 30);
  CHECK(ms.isi[0].u == 40);
  CHECK(ms.cci[0].u == 300);
  CHECK(ms.q1 == 0.6);
  CHECK_THROWS_AS(build_observation_model(Link::Primary, s, sp, pp, {}, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_observation_model(Link::Primary, s, pp, sp, {}, 4), std::invalid_argument);
}

TEST_CASE("nothing arrives") {
  ObservationModel m;
  m.q1 = 0.3;
  m.current = {100, 0.0};
  m.isi = {{0.3, 100, 0.0}};
  m.cci = {{0.5, 50, 0.0}, {0.5, 50, 0.0}};
  for (auto f : {ber_exact, ber_convolution_oracle, ber_no_isi}) {
    const BerResult r = f(m, 1.0);
    CHECK(r.pe1 == 1.0);
    CHECK(r.pe0 == 0.0);
    CHECK(r.pe == doctest::Approx(0.3));
  }
  m.q1 = 0.5;
  m.isi[0].q1 = 0.5;
  CHECK(ber_corollary_eta1(m) == doctest::Approx(0.5));
  const McBerResult mc = mc_link_ber(m, 1.0, 10000, 1, 1);
  CHECK(mc.estimate.pe1 == 1.0);
  CHECK(mc.estimate.pe0 == 0.0);
}

TEST_CASE("single binomial") {
  ObservationModel m;
  m.q1 = 0.5;
  m.current = {25, 0.13};
  m.cci = {{0.5, 0, 0.3}};
  const BerResult r = ber_exact(m, 1.0);
  CHECK(r.pe1 == doctest::Approx(std::pow(0.87, 25)).epsilon(1e-14));
  CHECK(r.pe0 == 0.0);
  CHECK(ber_corollary_eta1(m) == doctest::Approx(0.5 * std::pow(0.87, 25)).epsilon(1e-14));
  for (long k = 1; k <= 8; ++k) {
    const BerResult c = ber_convolution_oracle(m, static_cast<double>(k));
    CHECK(c.pe1 == doctest::Approx(binomial_cdf(25, 0.13, k - 1)).epsilon(1e-13));
  }
}

TEST_CASE("real-valued thresholds act as their ceiling") {
  std::mt19937_64 rng(4);
  const ObservationModel m = random_model(rng, 2, 20);
  const BerResult a = ber_convolution_oracle(m, 2.3);
  const BerResult b = ber_convolution_oracle(m, 3.0);
  CHECK(a.pe == b.pe);
  CHECK(ber_exact(m, 2.3).pe == ber_exact(m, 3.0).pe);
  CHECK_THROWS_AS(ber_exact(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ber_convolution_oracle(m, -1.0), std::invalid_argument);
}

TEST_CASE("exact enumeration agrees with convolution") {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int l = 1; l <= 3; ++l) {
    for (int trial = 0; trial < 60; ++trial) {
      const ObservationModel m = random_model(rng, l, 30);
      for (int eta = 1; eta <= 6; ++eta) {
        const BerResult e = ber_exact(m, eta);
        const BerResult c = ber_convolution_oracle(m, eta);
        INFO("l=" << l << " eta=" << eta);
        CHECK(rel_diff(e.pe1, c.pe1) <= 1e-12);
        CHECK(rel_diff(1 - e.pe0, 1 - c.pe0) <= 1e-12);
        CHECK(e.pe >= std::min(e.pe0, e.pe1) - 1e-15);
        CHECK(e.pe <= std::max(e.pe0, e.pe1) + 1e-15);
        ++checked;
      }
    }
  }
  CHECK(checked == 1080);
}

TEST_CASE("composition counts and the complexity cap") {
  // n < 3 over 4 parts: 1 + 4 + 10
  CHECK(exact_enumeration_size(4, 3) == 15.0);
  CHECK(exact_enumeration_size(2, 1) == 1.0);
  ObservationModel m;
  m.current = {1000, 0.5};
  for (int r = 1; r < 10; ++r) m.isi.push_back({0.5, 1000, 0.1});
  for (int s = 0; s < 10; ++s) m.cci.push_back({0.5, 1000, 0.1});
  CHECK_THROWS_AS(ber_exact(m, 200.0), ComplexityLimitError);
  CHECK_NOTHROW(ber_convolution_oracle(m, 200.0));
}

TEST_CASE("eta = 1 closed form") {
  std::mt19937_64 rng(8);
  for (int l = 1; l <= 4; ++l) {
    for (int trial = 0; trial < 25; ++trial) {
      ObservationModel m = random_model(rng, l, 40);
      m.q1 = 0.5;
      for (auto& t : m.isi) t.q1 = 0.5;
      CHECK(rel_diff(ber_corollary_eta1(m), ber_exact(m, 1.0).pe) <= 1e-12);
      CHECK(rel_diff(ber_corollary_eta1(m), ber_convolution_oracle(m, 1.0).pe) <= 1e-12);
    }
  }
  std::mt19937_64 r2(1);
  ObservationModel m = random_model(r2, 2, 10);
  m.q1 = 0.4;
  CHECK_THROWS_AS(ber_corollary_eta1(m), std::invalid_argument);
}

TEST_CASE("ISI-free closed form") {
  std::mt19937_64 rng(10);
  for (int l = 1; l <= 3; ++l) {
    for (int trial = 0; trial < 25; ++trial) {
      ObservationModel m = random_model(rng, l, 30);
      for (auto& t : m.isi) t.h = 0.0;
      for (int eta = 1; eta <= 6; ++eta) {
        const BerResult a = ber_no_isi(m, eta);
        const BerResult e = ber_exact(m, eta);
        const BerResult c = ber_convolution_oracle(m, eta);
        CHECK(rel_diff(a.pe1, e.pe1) <= 1e-12);
        CHECK(rel_diff(1 - a.pe0, 1 - e.pe0) <= 1e-12);
        CHECK(rel_diff(a.pe1, c.pe1) <= 1e-12);
      }
    }
  }
  std::mt19937_64 r2(2);
  ObservationModel bad = random_model(r2, 2, 10);
  bad.isi[0] = {0.5, 10, 0.2};
  CHECK_THROWS_AS(ber_no_isi(bad, 2.0), std::invalid_argument);
}

TEST_CASE("threshold monotonicity") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const ObservationModel m = random_model(rng, 3, 60);
    double prev1 = -1, prev0 = 2;
    for (int eta = 1; eta <= 40; ++eta) {
      const BerResult r = ber_convolution_oracle(m, eta);
      CHECK(r.pe1 >= prev1 - 1e-15);
      CHECK(r.pe0 <= prev0 + 1e-15);
      prev1 = r.pe1;
      prev0 = r.pe0;
    }
  }
}

TEST_CASE("adding ISI never helps at eta = 1") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    ObservationModel m = random_model(rng, 2, 40);
    m.q1 = 0.5;
    m.isi[0].q1 = 0.5;
    ObservationModel clean = m;
    clean.isi[0].h = 0.0;
    CHECK(ber_corollary_eta1(m) >= ber_corollary_eta1(clean) - 1e-15);
  }
}

TEST_CASE("sub-optimal threshold") {
  ObservationModel m;
  m.q1 = 0.5;
  m.current = {100, 0.1};  // signal 10
  m.isi = {{0.5, 40, 0.25}};
  m.cci = {{0.5, 0, 0.1}, {0.5, 0, 0.1}};  // lambda0 = 5
  ThresholdChoice c = suboptimal_threshold(m);
  CHECK_FALSE(c.grid_fallback);
  CHECK(c.lambda0 == doctest::Approx(5.0));
  CHECK(c.lambda1 == doctest::Approx(15.0));
  m.isi = {{0.5, 40, 0.5}};  // lambda0 = 10 = signal
  c = suboptimal_threshold(m);
  CHECK(c.eta == doctest::Approx(10.0 / std::log(2.0)));
  m.isi = {{0.5, 100, 0.1 / (std::exp(1.0) - 1) * 2}};  // lambda1 = e lambda0
  c = suboptimal_threshold(m);
  CHECK(c.eta == doctest::Approx(10.0));

  ObservationModel silent;
  silent.q1 = 0.5;
  silent.current = {50, 0.2};
  silent.cci = {{0.5, 0, 0.0}};
  c = suboptimal_threshold(silent);
  CHECK(c.grid_fallback);
  CHECK(c.eta == optimal_integer_threshold(silent, 1, 51).eta);
}

TEST_CASE("integer grid optimum") {
  std::mt19937_64 rng(14);
  const ObservationModel m = random_model(rng, 2, 30);
  const GridOptimum g = optimal_integer_threshold(m, 1, 30);
  for (int eta = 1; eta <= 30; ++eta) CHECK(ber_convolution_oracle(m, eta).pe >= g.ber.pe);
  CHECK_THROWS_AS(optimal_integer_threshold(m, 0, 5), std::invalid_argument);
}

TEST_CASE("Monte Carlo agrees and repeats") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const ObservationModel m = random_model(rng, 3, 30);
    const double eta = 1 + trial;
    const BerResult e = ber_convolution_oracle(m, eta);
    const McBerResult mc = mc_link_ber(m, eta, 200000, 1000 + trial, 2);
    CHECK(std::abs(mc.estimate.pe - e.pe) <= 3 * binomial_sigma(e.pe, mc.trials) + 1e-12);
    CHECK(mc.n0 + mc.n1 == mc.trials);
    const McBerResult again = mc_link_ber(m, eta, 200000, 1000 + trial, 1);
    CHECK(again.estimate.pe == mc.estimate.pe);
    CHECK(again.estimate.pe0 == mc.estimate.pe0);
  }
  std::mt19937_64 r2(3);
  CHECK_THROWS_AS(mc_link_ber(random_model(r2, 1, 5), 1.0, 0, 1), std::invalid_argument);
}

}
