#include "splitbell/correlators.hpp"
#include "splitbell/error.hpp"
#include "splitbell/evolution.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace splitbell;

namespace {

double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

// G by enumerating every pair of loss counts
double G_enumerated(int k, int l, double g) {
  double s = 0.0;
  for (int n = 0; n <= k; ++n)
    for (int m = 0; m <= l; ++m) {
      const double w = binom(k, n) * std::pow(g, k - n) * std::pow(1 - g, n) * binom(l, m) *
                       std::pow(g, l - m) * std::pow(1 - g, m);
      s += w * sign_binned((k - n) - (l - m));
    }
  return s;
}

ProbabilityTable mixture(const TruncationConfig& cfg, std::initializer_list<std::pair<FockLabel, double>> parts) {
  std::vector<double> p(cfg.dimension(), 0.0);
  for (const auto& [l, w] : parts) p[index_of(l, cfg)] += w;
  return ProbabilityTable(cfg, std::move(p));
}

ProbabilityTable random_table(const TruncationConfig& cfg, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(0.3, 1.0);
  std::vector<double> p(cfg.dimension());
  double s = 0.0;
  for (auto& x : p) s += (x = gamma(rng));
  for (auto& x : p) x /= s;
  return ProbabilityTable(cfg, std::move(p));
}

}  // namespace

TEST_SUITE("correlators") {

TEST_CASE("table validation") {
  const TruncationConfig cfg(1);
  CHECK_THROWS_AS(ProbabilityTable(cfg, std::vector<double>(3, 0.0)), RangeError);
  std::vector<double> p(cfg.dimension(), 0.0);
  p[0] = 1.5;
  p[1] = -0.5;
  CHECK_THROWS_AS(ProbabilityTable(cfg, p), RangeError);
  p.assign(cfg.dimension(), 0.0);
  p[0] = 0.9;
  CHECK_THROWS_AS(ProbabilityTable(cfg, p), RangeError);
  p[0] = std::nan("");
  CHECK_THROWS_AS(ProbabilityTable(cfg, p), RangeError);
}

TEST_CASE("vacuum table") {
  const TruncationConfig cfg(3);
  const auto t = probability_table(StateVector::vacuum(cfg), 0.4, 1.2);
  CHECK(t.at({0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(correlator_II(t) == 1.0);
  CHECK_THROWS_AS(correlator_I(t), UndefinedCorrelator);
  CHECK_THROWS_AS(correlator_III(t), UndefinedCorrelator);
  const auto ch = ch_probabilities(t);
  CHECK(ch.all_all == 0.0);
  CHECK(ch.pp + ch.pm + ch.mp + ch.mm == 0.0);
}

TEST_CASE("point tables") {
  const TruncationConfig cfg(2);
  const auto bell = ProbabilityTable::point(cfg, {1, 0, 0, 1});
  CHECK(correlator_I(bell) == -1.0);
  CHECK(correlator_II(bell) == -1.0);
  CHECK(correlator_III(bell) == -1.0);
  CHECK(correlator_I(ProbabilityTable::point(cfg, {1, 1, 1, 1})) == 0.0);
  CHECK(correlator_II(ProbabilityTable::point(cfg, {1, 1, 2, 0})) == 1.0);
  CHECK(sign_binned(0) == 1);
  CHECK(sign_binned(-3) == -1);

  const auto ch = ch_probabilities(bell);
  CHECK(ch.pm == 1.0);
  CHECK(ch.all_all == 1.0);
  CHECK(ch.plus_all == 1.0);
  CHECK(ch.all_minus == 1.0);
  CHECK(ch.pp + ch.mp + ch.mm == 0.0);
  CHECK(ch.minus_all + ch.all_plus == 0.0);
}

TEST_CASE("coincidence correlator ignores vacuum weight") {
  const TruncationConfig cfg(2);
  for (double eps : {1e-6, 0.01, 0.2}) {
    const auto t = mixture(cfg, {{{0, 0, 0, 0}, 1 - 2 * eps}, {{1, 0, 0, 1}, eps}, {{0, 1, 1, 0}, eps}});
    CHECK(correlator_III(t) == doctest::Approx(-1.0).epsilon(1e-14));
  }
}

TEST_CASE("periodicity of the readout rotation") {
  const TruncationConfig cfg(12);
  const auto s = prepare_bell_state({0.3, 1.0}, cfg).state;
  const auto t = probability_table(s, 0.5, 0.2);
  const auto half = probability_table(s, 0.5 + std::numbers::pi / 2, 0.2);
  const auto full = probability_table(s, 0.5 + std::numbers::pi, 0.2);
  double swapped = 0.0, same = 0.0, clipped = 0.0;
  for (std::size_t i = 0; i < cfg.dimension(); ++i) {
    const auto l = label_of(i, cfg);
    const double d_full = std::abs(full.probs()[i] - t.probs()[i]);
    const double d_half = std::abs(half.probs()[i] - t.at({l.l_a, l.k_a, l.k_b, l.l_b}));
    // sectors clipped by the ceiling are not closed under the rotation
    if (l.n_a() <= cfg.k_cut()) {
      same = std::max(same, d_full);
      swapped = std::max(swapped, d_half);
    } else {
      clipped = std::max({clipped, d_full, d_half});
    }
  }
  CHECK(same < 1e-12);
  CHECK(swapped < 1e-12);
  CHECK(clipped < 1e-6);
}

TEST_CASE("Kraus amplitudes") {
  CHECK(kraus_amplitude(4, 0, 0.7) == doctest::Approx(std::pow(0.7, 2.0)));
  CHECK(kraus_amplitude(1, 1, 0.7) == doctest::Approx(std::sqrt(0.3)));
  CHECK(kraus_amplitude(2, 3, 0.7) == 0.0);
  for (double g : {0.0, 0.3, 0.9, 1.0})
    for (int k = 0; k <= 20; ++k) {
      double s = 0.0;
      for (int n = 0; n <= k; ++n) s += kraus_amplitude(k, n, g) * kraus_amplitude(k, n, g);
      REQUIRE(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("G and H factors") {
  for (int k = 0; k <= 5; ++k)
    for (int l = 0; l <= 5; ++l) CHECK(G_factor(k, l, 1.0) == sign_binned(k - l));
  const double g = 0.37;
  CHECK(G_factor(0, 1, g) == doctest::Approx(1 - 2 * g).epsilon(1e-14));
  CHECK(G_factor(1, 1, g) == doctest::Approx(g * g + (1 - g) * (1 - g)).epsilon(1e-14));
  for (double gg : {0.05, 0.5, 0.9})
    for (int k = 0; k <= 10; ++k)
      for (int l = 0; l <= 10; ++l)
        REQUIRE(std::abs(G_factor(k, l, gg) - G_enumerated(k, l, gg)) < 1e-12);
  CHECK(H_factor(0, 0, 0.3) == 1.0);
  CHECK(H_factor(0, 0, 1.0) == 1.0);
  CHECK(H_factor(2, 0, 1.0) == 0.0);
  CHECK(H_factor(2, 1, 0.9) == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("loss leaves the normalized-average correlator unchanged") {
  const TruncationConfig cfg(12);
  const auto s = prepare_bell_state({0.2, 1.0}, cfg).state;
  const auto t = probability_table(s, 3 * std::numbers::pi / 8, std::numbers::pi / 4);
  const double ideal = correlator_I(t);
  CHECK(correlator_I_loss(t, LossModel::loss(0.7)) == ideal);
  CHECK(correlator_I_loss(t, LossModel::loss(0.5)) == correlator_I_loss(t, LossModel::ideal()));
  CHECK(correlator_I_loss(ProbabilityTable::point(cfg, {1, 0, 0, 1}), LossModel::loss(0.3)) == -1.0);
}

TEST_CASE("lossless limits") {
  const TruncationConfig cfg(3);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5; ++i) {
    const auto t = random_table(cfg, rng);
    CHECK(correlator_II_loss(t, LossModel::ideal()) == correlator_II(t));
    CHECK(correlator_III_loss(t, LossModel::ideal()) == correlator_III(t));
    const auto same = lossy_probability_table(t, LossModel::ideal());
    CHECK(same.probs() == t.probs());
  }
  for (double g : {1.0, 0.4, 0.0})
    CHECK(correlator_II_loss(ProbabilityTable::point(cfg, {0, 0, 0, 0}), LossModel::loss(g)) == 1.0);
}

TEST_CASE("coincidence correlator under loss, single Bell pair") {
  const TruncationConfig cfg(2);
  const auto bell = ProbabilityTable::point(cfg, {1, 0, 0, 1});
  // four loss outcomes: both kept (-1), one lost each side (excluded), both lost (excluded)
  CHECK(correlator_III_loss(bell, LossModel::loss(0.5)) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(correlator_III(lossy_probability_table(bell, LossModel::loss(0.5))) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_THROWS_AS(correlator_III_loss(bell, LossModel::loss(0.0)), UndefinedCorrelator);
}

TEST_CASE("lossy table of a single atom") {
  const TruncationConfig cfg(2);
  const auto t = lossy_probability_table(ProbabilityTable::point(cfg, {1, 0, 0, 0}), LossModel::loss(0.6));
  CHECK(t.at({1, 0, 0, 0}) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(t.at({0, 0, 0, 0}) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(t.total() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("closed-form loss correlators match the lossy-table oracle") {
  const TruncationConfig cfg(5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto t = random_table(cfg, rng);
    const auto loss = LossModel::loss(u(rng));
    const auto lossy = lossy_probability_table(t, loss);
    CHECK(std::abs(correlator_II_loss(t, loss) - correlator_II(lossy)) < 1e-10);
    CHECK(std::abs(correlator_III_loss(t, loss) - correlator_III(lossy)) < 1e-10);
  }
}

TEST_CASE("detector inefficiency matches loss exactly") {
  const TruncationConfig cfg(4);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const auto t = random_table(cfg, rng);
    CHECK(correlator_I_detector(t, 0.8) == correlator_I_loss(t, LossModel::loss(0.8)));
    CHECK(correlator_II_detector(t, 0.8) == correlator_II_loss(t, LossModel::loss(0.8)));
    CHECK(correlator_III_detector(t, 0.8) == correlator_III_loss(t, LossModel::loss(0.8)));
    CHECK(correlator_II_detector(t, 1.0) == correlator_II(t));
    CHECK(correlator_III_detector(t, 1.0) == correlator_III(t));
  }
}

TEST_CASE("loss model validation") {
  CHECK_THROWS_AS(LossModel::loss(1.2).validate(), RangeError);
  CHECK_THROWS_AS(LossModel::detector(-0.1).validate(), RangeError);
  CHECK_NOTHROW(LossModel::loss(0.0).validate());
}

}
