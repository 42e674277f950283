#include "splitbell/bell.hpp"
#include "splitbell/error.hpp"
#include "splitbell/exacthamiltonian.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace splitbell;

TEST_SUITE("exacthamiltonian") {

TEST_CASE("basis sizes and ordering") {
  CHECK(NumberConservedBasis(2).size() == 21);
  const NumberConservedBasis b(10);
  CHECK(b.size() == 3003);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& o = b.occupations(i);
    int sum = 0;
    for (int n : o) sum += n;
    REQUIRE(sum == 10);
    REQUIRE(b.index_of(o) == i);
    if (i > 0) REQUIRE(b.occupations(i - 1) < o);
  }
  CHECK(b.occupations(0) == OccupationLabel6{0, 0, 0, 0, 0, 10});
  CHECK_FALSE(b.find({1, 0, 0, 0, 0, 0}).has_value());
  CHECK_THROWS_AS(b.index_of({1, 0, 0, 0, 0, 0}), RangeError);
  CHECK_THROWS_AS(NumberConservedBasis(1), RangeError);
}

TEST_CASE("spin-changing collision generator") {
  const int n = 10;
  const NumberConservedBasis b(n);
  const auto g = gen_exact_scc(b, SccScope::Global);
  CHECK(g.is_hermitian());
  const auto from = b.index_of({0, 0, n, 0, 0, 0});
  const auto to = b.index_of({1, 1, n - 2, 0, 0, 0});
  CHECK(g.element(to, from).real() == doctest::Approx(std::sqrt(n * (n - 1.0)) / n).epsilon(1e-14));
  CHECK(gen_exact_scc(b, SccScope::A).is_hermitian());
  CHECK(gen_exact_scc(b, SccScope::B).is_hermitian());
  CHECK(gen_split6(b).is_hermitian());
  CHECK(commutator_norm(gen_exact_scc(b, SccScope::A), gen_exact_scc(b, SccScope::B)) == 0.0);
}

TEST_CASE("splitting the condensate is binomial") {
  const int n = 10;
  const auto b = std::make_shared<NumberConservedBasis>(n);
  std::vector<Amplitude> psi(b->size());
  psi[b->index_of({0, 0, n, 0, 0, 0})] = 1.0;
  const auto out = evolve(psi, gen_split6(*b), std::numbers::pi / 4);
  double norm2 = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double p = std::norm(out[b->index_of({0, 0, n - k, 0, 0, k})]);
    const double expected = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) / 1024.0;
    CHECK(p == doctest::Approx(expected).epsilon(1e-8));
    norm2 += p;
  }
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("r = 0 leaves the side modes empty") {
  const auto s = prepare_full(0.0, 10);
  const auto t = reduced_probability_table(s, 0.3, 0.9);
  CHECK(t.at({0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reduced_boundary_mass(s) == 0.0);
}

TEST_CASE("first-order pair population") {
  const auto s = prepare_full(0.05, 10);
  const auto m = reduced_sector_marginal(s);
  CHECK(m.at({1, 1}) == doctest::Approx(0.0045).epsilon(0.2));
  CHECK(m.at({1, 1}) == doctest::Approx(0.004478).epsilon(1e-3));
  double odd = 0.0, total = 0.0;
  for (const auto& [k, p] : m) {
    total += p;
    if ((k.n_a - k.n_b) % 2 != 0) odd += p;
  }
  CHECK(odd < 1e-10);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(s.norm_drift) < 1e-8);
}

TEST_CASE("reduced tables are normalized and parity-clean at larger r") {
  const auto s = prepare_full(0.4, 8);
  const auto t = reduced_probability_table(s, 1.0, 0.2);
  CHECK(t.total() == doctest::Approx(1.0).epsilon(1e-10));
  double odd = 0.0;
  for (std::size_t i = 0; i < t.probs().size(); ++i) {
    const auto l = label_of(i, t.config());
    if ((l.n_a() - l.n_b()) % 2 != 0) odd += t.probs()[i];
  }
  CHECK(odd < 1e-10);
}

TEST_CASE("exact and approximate models agree at small r") {
  FullHamSpec spec;
  spec.r_values = {0.1};
  spec.approaches = {Approach::III};
  const auto exact = fullham_sweep(spec);
  REQUIRE(exact.size() == 1);
  CHECK(exact[0].atoms == 10);
  CHECK(exact[0].k_cut == 10);
  const auto approx = chsh_value({0.1, 1.0}, BellAngles::optimal(), Approach::III, LossModel::ideal(),
                                 TruncationConfig(12));
  CHECK(std::abs(exact[0].B - approx.B) / approx.B < 0.05);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(prepare_full(0.1, 3), RangeError);
  CHECK_THROWS_AS(prepare_full(-0.1, 10), RangeError);
  FullHamSpec spec;
  spec.r_values = {0.1};
  spec.atoms = 2;
  CHECK_THROWS_AS(spec.validate(), RangeError);
}

}
