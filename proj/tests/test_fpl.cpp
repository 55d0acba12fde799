#include <doctest.h>

#include <cmath>

#include "experts/adversary.hpp"
#include "experts/error.hpp"
#include "experts/fpl.hpp"
#include "experts/hedge.hpp"
#include "oracles.hpp"

using namespace experts;

TEST_CASE("follow the leader picks the lowest index on ties") {
  CHECK(ftl_choose(std::vector<double>{0.5, 0.5}).index == 0);
  CHECK(ftl_choose(std::vector<double>{1.0, 0.5, 2.0}).index == 1);
  CHECK_THROWS_AS(ftl_choose(std::vector<double>{}), DomainError);
}

TEST_CASE("the leader alternates on the alternating sequence") {
  FtlKillerAdversary adv;
  FtlForecaster ftl;
  const auto recs = run_game(ftl, adv, 40, RngStream(0));
  const auto ref = oracle::ftl_on_killer(40);
  for (std::size_t t = 0; t < recs.size(); ++t) {
    CHECK(recs[t].chosen.index == ref.leaders[t]);
    if (t >= 2) CHECK(recs[t].chosen != recs[t - 1].chosen);
  }
}

TEST_CASE("one expert ignores the noise") {
  RngStream rng(1);
  LossHistory h(1);
  h.append(std::vector<double>{3.0});
  for (int i = 0; i < 100; ++i)
    CHECK(fpl_choose(h, {PerturbationSpec::gumbel(5.0)}, rng).index == 0);
}

TEST_CASE("two experts with exponential noise") {
  const auto d = fpl_distribution(std::vector<double>{0.0, 1.0},
                                  {PerturbationSpec::exponential(1.0)}, 1'000'000, RngStream(31));
  CHECK(std::abs(d[1] - oracle::kHalfExpMinus1) <= 0.005);
}

TEST_CASE("monte carlo distribution") {
  SUBCASE("symmetric noise on a tie") {
    for (auto spec : {PerturbationSpec::uniform(1.0), PerturbationSpec::exponential(1.0),
                      PerturbationSpec::gumbel(1.0)}) {
      const auto d = fpl_distribution(std::vector<double>{2.0, 2.0}, {spec}, 1'000'000, RngStream(4));
      CHECK(std::abs(d[0] - 0.5) <= 0.005);
      CHECK(std::abs(d[1] - 0.5) <= 0.005);
    }
  }
  SUBCASE("gumbel against the softmax") {
    const auto d = fpl_distribution(std::vector<double>{0.0, 1.0, 2.0},
                                    {PerturbationSpec::gumbel(1.0)}, 1'000'000, RngStream(5));
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(d[i] - oracle::kSoftmax012[i]) <= 0.005);
  }
  SUBCASE("a single draw is one-hot") {
    const auto d = fpl_distribution(std::vector<double>{0.0, 0.1, 0.2},
                                    {PerturbationSpec::uniform(1.0)}, 1, RngStream(6));
    int ones = 0;
    for (double p : d.probs()) {
      CHECK((p == 0.0 || p == 1.0));
      ones += p == 1.0;
    }
    CHECK(ones == 1);
  }
  SUBCASE("zero samples is an error") {
    CHECK_THROWS_AS(fpl_distribution(std::vector<double>{0.0}, {PerturbationSpec::uniform(1.0)},
                                     0, RngStream(0)),
                    DomainError);
  }
  SUBCASE("threaded and inline paths agree on chunking") {
    // Above the inline threshold the work is spread over threads; the
    // result must not depend on scheduling.
    const std::vector<double> L{0.0, 0.4, 0.9, 1.3};
    const auto a = fpl_distribution(L, {PerturbationSpec::exponential(0.8)}, 400'000, RngStream(9));
    const auto b = fpl_distribution(L, {PerturbationSpec::exponential(0.8)}, 400'000, RngStream(9));
    CHECK(a == b);
  }
}

TEST_CASE("gumbel closed form") {
  const auto d = fpl_exact_distribution_gumbel(std::vector<double>{0.0, 1.0, 2.0}, 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(d[i] == doctest::Approx(oracle::kSoftmax012[i]).epsilon(1e-14));
  for (double c : {0.0, 0.7, 3.0}) {
    const auto e = fpl_exact_distribution_gumbel(std::vector<double>{0.0, c}, 2.0);
    CHECK(e[1] == doctest::Approx(std::exp(-c / 2) / (1 + std::exp(-c / 2))).epsilon(1e-14));
  }
  const auto u = fpl_exact_distribution_gumbel(std::vector<double>{4.0, 4.0, 4.0}, 0.3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(u[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("exact mode refuses what it cannot compute") {
  UniformAdversary adv(3, 0.0, 1.0);
  FplForecaster f({PerturbationSpec::exponential(1.0)}, DistributionMode::Exact);
  CHECK_THROWS_AS(run_game(f, adv, 3, RngStream(0)), ConfigError);
  CHECK(has_exact_distribution({PerturbationSpec::exponential(1.0)}, 2));
  CHECK(has_exact_distribution({PerturbationSpec::gumbel(1.0)}, 6));
  CHECK_FALSE(has_exact_distribution({PerturbationSpec::gumbel(1.0, 0.0, NoiseSign::Add)}, 3));
}

TEST_CASE("fixed noise plays one perturbed leader for the whole game") {
  FplParams p{PerturbationSpec::uniform(4.0), false};
  FplForecaster f(p, DistributionMode::Exact);
  UniformAdversary adv(3, 0.0, 1.0);
  const auto recs = run_game(f, adv, 30, RngStream(12));
  for (const auto& r : recs) CHECK(r.distribution[r.chosen.index] == 1.0);
}

TEST_SUITE("property") {
  TEST_CASE("a common shift leaves the perturbed argmin alone") {
    std::mt19937_64 gen(40);
    std::uniform_real_distribution<double> shift(-100.0, 100.0);
    for (auto spec : {PerturbationSpec::uniform(2.0), PerturbationSpec::exponential(0.5),
                      PerturbationSpec::gumbel(1.5)}) {
      for (int trial = 0; trial < 300; ++trial) {
        auto L = oracle::random_table(gen, 1, 2 + trial % 5, 6.0).front();
        // Losses on a 1/1024 grid and integer shifts keep the shifted totals
        // exact, so only rounding of total minus noise could flip a choice.
        for (auto& x : L) x = std::round(x * 1024.0) / 1024.0;
        const double k = std::round(shift(gen));
        auto shifted = L;
        for (auto& x : shifted) x += k;
        LossHistory a = LossHistory::from_cumulative(L);
        LossHistory b = LossHistory::from_cumulative(shifted);
        RngStream r1(trial), r2(trial);
        for (int d = 0; d < 20; ++d)
          CHECK(fpl_choose(a, {spec}, r1) == fpl_choose(b, {spec}, r2));
      }
    }
  }

  TEST_CASE("zero noise is follow the leader") {
    std::mt19937_64 gen(41);
    RngStream rng(0);
    for (int trial = 0; trial < 500; ++trial) {
      auto rows = oracle::random_table(gen, 1 + trial % 4, 1 + trial % 7, 3.0);
      // integer-valued rows make ties common
      if (trial % 2) for (auto& r : rows) for (auto& x : r) x = std::floor(x);
      const auto h = LossHistory::from_rows(rows.front().size(), rows);
      for (auto sign : {NoiseSign::Subtract, NoiseSign::Add}) {
        const FplParams p{PerturbationSpec::zero(sign)};
        CHECK(fpl_choose(h, p, rng) == ftl_choose(h));
        CHECK(*fpl_exact_distribution(h.cumulative(), p) ==
              ChoiceDistribution::one_hot(h.experts(), ftl_choose(h)));
      }
    }
  }

  TEST_CASE("sampled gumbel leader matches hedge") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 1 + trial % 6;
      const auto L = oracle::random_table(gen, 1, n, 10.0).front();
      for (double beta : {0.5, 1.0, 2.0}) {
        const auto sampled = fpl_distribution(L, {PerturbationSpec::gumbel(1.0 / beta)},
                                              1'000'000, RngStream(1000 + trial));
        const auto ref = oracle::softmax(L, beta);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(sampled[i] - ref[i]) <= 0.005);
      }
    }
  }

  TEST_CASE("follow the leader loses on the alternating sequence") {
    for (std::size_t m : {5u, 50u, 500u}) {
      FtlKillerAdversary adv;
      FtlForecaster ftl;
      const auto recs = run_game(ftl, adv, 2 * m + 1, RngStream(0));
      double paid = 0.0;
      for (const auto& r : recs) paid += r.algorithm_cost;
      const auto totals = expert_totals(recs);
      CHECK(paid >= 2.0 * m - 1.0);
      CHECK(std::min(totals[0], totals[1]) <= m + 0.5);
    }
  }
}
