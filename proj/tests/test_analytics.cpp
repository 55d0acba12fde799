#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "experts/adversary.hpp"
#include "experts/analytics.hpp"
#include "experts/error.hpp"
#include "oracles.hpp"

using namespace experts;

namespace {

struct Zeros final : Adversary {
  std::size_t expert_count() const override { return 2; }
  std::vector<double> losses(std::size_t, std::span<const ExpertId>, RngStream&) override {
    return {0.0, 0.0};
  }
};

AlgorithmDescriptor fpl_desc(PerturbationSpec p) {
  AlgorithmDescriptor d;
  d.kind = AlgorithmKind::PerturbedLeader;
  d.fpl.perturbation = p;
  return d;
}

}  // namespace

TEST_CASE("weighted majority bound values") {
  for (double g : {0.1, 0.5, 0.9}) CHECK(weighted_majority_bound(0.0, 1, g) == 0.0);
  CHECK(weighted_majority_bound(10.0, 4, 0.5) ==
        doctest::Approx(oracle::kWeightedMajority_10_4_half).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_majority_bound(1.0, 2, 1.0), DomainError);
  CHECK_THROWS_AS(weighted_majority_bound(1.0, 0, 0.5), DomainError);
}

TEST_CASE("perturbed leader bound values") {
  BoundParams bp{2.0, 1.0, 2.0, 2, 100};
  CHECK(fpl_bound(5.0, 0.1, bp) == doctest::Approx(45.0).epsilon(1e-14));
  BoundParams zero{0.0, 0.0, 0.0, 1, 0};
  CHECK(fpl_bound(3.5, 1.0, zero) == 3.5);
  CHECK_THROWS_AS(fpl_bound(1.0, 1.5, bp), DomainError);
  CHECK_THROWS_AS(fpl_bound(1.0, 0.0, bp), DomainError);
}

TEST_CASE("multiplicative bound values") {
  BoundParams bp{2.0, 1.0, 1.0, 1, 10};
  CHECK(fpl_star_bound(10.0, 2.0, bp) == 34.0);
  CHECK(fpl_star_bound(0.0, 0.5, bp) == 4.0 * 1.0 * 2.0 * 1.0 / 0.5);
  // n enters only through 1 + ln n
  BoundParams e = bp;
  e.n = 3;
  const double ratio = fpl_star_bound(0.0, 1.0, e) / fpl_star_bound(0.0, 1.0, bp);
  CHECK(ratio == doctest::Approx(1.0 + std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(fpl_star_bound(-1.0, 1.0, bp), DomainError);
}

TEST_CASE("all-zero losses satisfy every bound with zero regret") {
  Zeros adv;
  for (const auto& d : {fpl_desc(PerturbationSpec::exponential(0.5)),
                        AlgorithmDescriptor{AlgorithmKind::Hedge}}) {
    auto f = make_forecaster(d);
    const auto recs = run_game(*f, adv, 20, RngStream(1));
    const auto rep = check_run_against_bounds(recs, d, simplex_bound_params(recs));
    CHECK(rep.regret == 0.0);
    CHECK_FALSE(rep.bounds_checked.empty());
    for (const auto& b : rep.bounds_checked) CHECK(b.satisfied);
  }
}

TEST_CASE("bound sweeps on small instances") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    BernoulliAdversary adv({0.5, 0.5, 0.3, 0.7});
    AlgorithmDescriptor d{AlgorithmKind::WeightedMajority};
    d.gamma = 0.5;
    auto f = make_forecaster(d);
    const auto recs = run_game(*f, adv, 200, RngStream(seed));
    const BoundKind wm[] = {BoundKind::WeightedMajority};
    const auto rep = check_run_against_bounds(recs, d, simplex_bound_params(recs), wm);
    CHECK(rep.bounds_checked.at(0).satisfied);
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    FtlKillerAdversary adv;
    const auto d = fpl_desc(PerturbationSpec::exponential(0.05));
    auto f = make_forecaster(d);
    const auto recs = run_game(*f, adv, 100, RngStream(seed));
    const BoundKind pl[] = {BoundKind::PerturbedLeader};
    const auto rep = check_run_against_bounds(recs, d, simplex_bound_params(recs), pl);
    CHECK(rep.bounds_checked.at(0).satisfied);
  }
}

TEST_CASE("equivalence verifier") {
  SUBCASE("single expert histories match exactly") {
    std::vector<LossHistory> hs{LossHistory::from_cumulative({3.0}),
                                LossHistory::from_cumulative({0.0})};
    const auto rep = verify_gumbel_hedge_equivalence(hs, 1.0, 1000, 0.005, RngStream(1));
    CHECK(rep.passed);
    CHECK(rep.max_sampled_deviation == 0.0);
    CHECK(rep.max_exact_deviation == 0.0);
  }
  SUBCASE("a mismatched scale is caught") {
    std::vector<LossHistory> hs{LossHistory::from_cumulative({0.0, 1.0})};
    const auto rep = verify_gumbel_hedge_equivalence(hs, 1.0, 1'000'000, 0.005, RngStream(2), 2.0);
    CHECK_FALSE(rep.passed);
    CHECK(rep.max_exact_deviation == doctest::Approx(oracle::kLogisticHalfGapAt1).epsilon(1e-12));
    CHECK(rep.max_sampled_deviation > 0.1);
  }
}

TEST_CASE("corpus is deterministic and in range") {
  const auto a = make_history_corpus(50, 6, 10.0, 20240601);
  const auto b = make_history_corpus(50, 6, 10.0, 20240601);
  REQUIRE(a.size() == 50);
  std::set<std::size_t> sizes;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].experts() >= 1);
    CHECK(a[k].experts() <= 6);
    sizes.insert(a[k].experts());
    for (std::size_t i = 0; i < a[k].experts(); ++i) {
      CHECK(a[k].cumulative(i) >= 0.0);
      CHECK(a[k].cumulative(i) <= 10.0);
      CHECK(a[k].cumulative(i) == b[k].cumulative(i));
    }
  }
  CHECK(sizes.size() == 6);
}

TEST_SUITE("property") {
  TEST_CASE("weighted majority bound grows with mistakes and experts") {
    for (double g : {0.25, 0.5, 0.75}) {
      double prev = -1.0;
      for (double m = 0.0; m <= 50.0; m += 0.5) {
        const double v = weighted_majority_bound(m, 4, g);
        CHECK(v >= prev);
        prev = v;
      }
      prev = -1.0;
      for (std::size_t n = 1; n <= 64; ++n) {
        const double v = weighted_majority_bound(7.0, n, g);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }

  TEST_CASE("perturbed leader bound is convex in eps with the expected minimizer") {
    for (const BoundParams bp : {BoundParams{2.0, 1.0, 2.0, 2, 100}, BoundParams{2.0, 1.0, 1.0, 4, 1000},
                                 BoundParams{2.0, 0.5, 3.0, 8, 200}}) {
      const int N = 100000;
      const double h = 1.0 / N;
      double best_eps = 0.0, best_v = INFINITY;
      std::vector<double> v(N);
      for (int k = 1; k <= N; ++k) {
        v[k - 1] = fpl_bound(10.0, k * h, bp);
        if (v[k - 1] < best_v) {
          best_v = v[k - 1];
          best_eps = k * h;
        }
      }
      for (int k = 1; k + 1 < N; ++k)
        CHECK(v[k - 1] + v[k + 1] - 2 * v[k] >= -1e-9 * std::abs(v[k]));
      CHECK(std::abs(best_eps - fpl_best_eps(bp)) <= h);
      CHECK(std::abs(fpl_best_eps(bp) - std::sqrt(bp.D / (bp.R * bp.A * bp.T))) <= 1e-15);
    }
  }

  TEST_CASE("equivalence verifier passes on the pinned corpus") {
    const auto corpus = make_history_corpus(50, 6, 10.0, 20240601);
    const auto rep = verify_gumbel_hedge_equivalence(corpus, 1.0, 1'000'000, 0.005,
                                                     RngStream(20240601));
    CHECK(rep.passed);
    CHECK(rep.max_sampled_deviation < 0.005);
    CHECK(rep.max_exact_deviation <= kExactEquivalenceTolerance);
  }

  TEST_CASE("requested bounds that do not apply raise") {
    BernoulliAdversary bern({0.5, 0.5});
    UniformAdversary unif(2, 0.0, 1.0);
    const auto hedge = AlgorithmDescriptor{AlgorithmKind::Hedge};
    auto f = make_forecaster(hedge);
    const auto binary = run_game(*f, bern, 10, RngStream(0));
    const auto real = run_game(*f, unif, 10, RngStream(0));

    const BoundKind wm[] = {BoundKind::WeightedMajority};
    const BoundKind pl[] = {BoundKind::PerturbedLeader};
    const BoundKind star[] = {BoundKind::PerturbedLeaderStar};
    CHECK_THROWS_AS(check_run_against_bounds(real, hedge, simplex_bound_params(real), wm),
                    ConfigError);
    CHECK_THROWS_AS(check_run_against_bounds(binary, hedge, simplex_bound_params(binary), pl),
                    ConfigError);
    const auto gumbel = fpl_desc(PerturbationSpec::gumbel(1.0));
    CHECK_THROWS_AS(check_run_against_bounds(binary, gumbel, simplex_bound_params(binary), pl),
                    ConfigError);
    CHECK_THROWS_AS(check_run_against_bounds(binary, gumbel, simplex_bound_params(binary), star),
                    ConfigError);
    const auto wide = fpl_desc(PerturbationSpec::exponential(2.0));
    CHECK_THROWS_AS(check_run_against_bounds(binary, wide, simplex_bound_params(binary), pl),
                    ConfigError);
    UniformAdversary negative(2, -1.0, 1.0);
    auto e = make_forecaster(fpl_desc(PerturbationSpec::exponential(0.5)));
    const auto neg = run_game(*e, negative, 10, RngStream(0));
    CHECK_THROWS_AS(check_run_against_bounds(neg, fpl_desc(PerturbationSpec::exponential(0.5)),
                                             simplex_bound_params(neg), star),
                    ConfigError);
  }
}
