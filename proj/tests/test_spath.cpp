#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dags.hpp"
#include "experts/error.hpp"
#include "experts/fpl.hpp"
#include "experts/hedge.hpp"
#include "experts/spath.hpp"
#include "oracles.hpp"

using namespace experts;

namespace {

EdgeGraph parallel(double c0 = 0.0, double c1 = 0.0) {
  return EdgeGraph(2, {{0, 1}, {0, 1}}, 0, 1, {c0, c1});
}

EdgeGraph parse_text(const std::string& s) {
  std::istringstream in(s);
  return EdgeGraph::parse(in);
}

}  // namespace

TEST_CASE("graph construction errors") {
  CHECK_THROWS_AS(EdgeGraph(2, {{0, 1}}, 0, 0), GraphError);
  CHECK_THROWS_AS(EdgeGraph(2, {{0, 2}}, 0, 1), GraphError);
  CHECK_THROWS_AS(EdgeGraph(3, {{0, 1}}, 0, 2), GraphError);
  CHECK_THROWS_AS(EdgeGraph(2, {{0, 1}}, 0, 1, {NAN}), DataError);
  auto g = parallel();
  CHECK_THROWS_AS(g.add_times(std::vector<double>{1.0, -1.0}), DataError);
  CHECK_THROWS_AS(g.add_times(std::vector<double>{1.0}), DataError);
}

TEST_CASE("edge list parsing") {
  const auto g = parse_text("# diamond\ns s\nt t\ns a 1\ns b 2\na t 2\nb t 2\n");
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 4);
  CHECK(g.labels().at(g.source()) == "s");
  CHECK(g.labels().at(g.sink()) == "t");
  CHECK(g.cumulative()[1] == 2.0);
  CHECK_THROWS(parse_text("s a\na b\n"));
  CHECK_THROWS(parse_text("s a\nt b\na\n"));
  CHECK_THROWS(parse_text("s a\nt b\na b x\n"));
}

TEST_CASE("small graphs") {
  RngStream rng(0);
  SUBCASE("single edge") {
    EdgeGraph g(2, {{0, 1}}, 0, 1);
    for (int i = 0; i < 10; ++i)
      CHECK(perturbed_shortest_path(g, PerturbationSpec::exponential(1.0, NoiseSign::Add), rng)
                .edges == std::vector<std::size_t>{0});
  }
  SUBCASE("diamond") {
    const auto g = parse_text("s s\nt t\ns a 1\ns b 2\na t 2\nb t 2\n");
    const auto p = shortest_path(g, g.cumulative());
    CHECK(p.edges == std::vector<std::size_t>{0, 2});
    CHECK(p.weight == 3.0);
    CHECK(brute_force_best_path(g) == p);
  }
  SUBCASE("a single path") {
    EdgeGraph g(4, {{2, 3}, {0, 1}, {1, 2}}, 0, 3, {1, 1, 1});
    CHECK(shortest_path(g, g.cumulative()).edges == std::vector<std::size_t>{1, 2, 0});
  }
  SUBCASE("ties go to the smallest edge ids") {
    const auto g = parallel(1.0, 1.0);
    CHECK(shortest_path(g, g.cumulative()).edges == std::vector<std::size_t>{0});
    CHECK(brute_force_best_path(g).edges == std::vector<std::size_t>{0});
  }
}

TEST_CASE("noise conventions on paths") {
  RngStream rng(1);
  EdgeGraph cyclic(3, {{0, 1}, {1, 0}, {1, 2}}, 0, 2);
  CHECK_FALSE(cyclic.is_acyclic());
  CHECK_THROWS_AS(perturbed_shortest_path(cyclic, PerturbationSpec::gumbel(1.0, 0.0, NoiseSign::Add), rng),
                  ConfigError);
  CHECK_THROWS_AS(perturbed_shortest_path(cyclic, PerturbationSpec::exponential(1.0), rng),
                  ConfigError);
  // nonnegative noise works with cycles
  CHECK(perturbed_shortest_path(cyclic, PerturbationSpec::exponential(1.0, NoiseSign::Add), rng)
            .edges == std::vector<std::size_t>{0, 2});
}

TEST_CASE("two parallel edges follow the exponential pair law") {
  const double eps = 1.0, c = 1.0;
  const auto g = parallel(0.0, c);
  RngStream rng(77);
  const int N = 1'000'000;
  int second = 0;
  for (int i = 0; i < N; ++i)
    second += perturbed_shortest_path(g, PerturbationSpec::exponential(eps, NoiseSign::Add), rng)
                  .edges.front() == 1;
  CHECK(std::abs(static_cast<double>(second) / N - 0.5 * std::exp(-eps * c)) <= 0.005);
}

TEST_CASE("enumeration guard") {
  // 2^k paths through a chain of parallel pairs
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < 12; ++v) {
    edges.push_back({v, v + 1});
    edges.push_back({v, v + 1});
  }
  EdgeGraph g(13, edges, 0, 12);
  CHECK_THROWS_AS(brute_force_best_path(g, 1000), CapacityError);
  CHECK(brute_force_best_path(g).edges.size() == 12);
}

TEST_CASE("online game on the alternating sequence") {
  const auto g = parallel();
  SUBCASE("all times zero") {
    const auto rep = run_online_path_game(g, PerturbationSpec::exponential(0.1, NoiseSign::Add),
                                          table_time_source({{0, 0}, {0, 0}, {0, 0}}), 3, RngStream(0));
    CHECK(rep.regret == 0.0);
  }
  SUBCASE("zero noise pays nearly every round") {
    for (std::size_t T : {11u, 100u, 1000u}) {
      const auto rep = run_online_path_game(g, PerturbationSpec::zero(NoiseSign::Add),
                                            ftl_killer_time_source(), T, RngStream(0));
      CHECK(rep.total_paid >= T - 2.0);
      CHECK(rep.best_path.weight <= T / 2.0 + 1.0);
    }
  }
  SUBCASE("tuned exponential noise stays within the perturbed leader bound") {
    const std::size_t T = 1000;
    // two disjoint single-edge paths: D = 2, R = 1, A = 1
    const double eps = std::sqrt(2.0 / T);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto rep = run_online_path_game(g, PerturbationSpec::exponential(eps, NoiseSign::Add),
                                            ftl_killer_time_source(), T, RngStream(seed));
      CHECK(rep.total_paid <= rep.best_path.weight + eps * T + 2.0 / eps);
    }
  }
  SUBCASE("a short time table is an error") {
    CHECK_THROWS_AS(run_online_path_game(g, PerturbationSpec::zero(NoiseSign::Add),
                                         table_time_source({{0, 1}}), 2, RngStream(0)),
                    DataError);
  }
}

TEST_SUITE("property") {
  TEST_CASE("zero-noise path equals the brute-force best path") {
    std::mt19937_64 gen(60);
    RngStream rng(0);
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = dags::random_dag(gen, trial % 2 == 0);
      const auto fast = perturbed_shortest_path(g, PerturbationSpec::zero(NoiseSign::Add), rng);
      const auto slow = brute_force_best_path(g);
      CHECK(fast.edges == slow.edges);
      CHECK(slow.weight == dags::min_path_weight(g));
    }
  }

  TEST_CASE("total paid is the sum of per-round path times") {
    std::mt19937_64 gen(61);
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = dags::random_dag(gen, false);
      const auto rep = run_online_path_game(
          g, PerturbationSpec::uniform(2.0, NoiseSign::Add),
          uniform_time_source(g.edge_count(), 0.0, 1.0), 50, RngStream(trial));
      double total = 0.0;
      for (const auto& r : rep.rounds) {
        double s = 0.0;
        for (auto e : r.path) s += r.times.at(e);
        CHECK(s == r.paid);
        total += s;
      }
      CHECK(total == rep.total_paid);
      CHECK(rep.regret == rep.total_paid - rep.best_path.weight);
    }
  }

  TEST_CASE("per-edge gumbel noise on parallel edges is the expert law") {
    std::mt19937_64 gen(62);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
      const double c0 = u(gen), c1 = u(gen), s = 0.5 + u(gen) / 2;
      const auto g = parallel(c0, c1);
      const auto spec = PerturbationSpec::gumbel(s, 0.0, NoiseSign::Add);
      RngStream a(trial), b(trial);
      for (int d = 0; d < 50; ++d) {
        const auto path = perturbed_shortest_path(g, spec, a);
        const double n0 = sample(spec, b), n1 = sample(spec, b);
        const std::vector<double> cum{c0, c1}, noise{n0, n1};
        CHECK(path.edges.front() == perturbed_argmin(cum, noise, NoiseSign::Add).index);
      }
    }
    const auto g = parallel(0.0, 1.0);
    RngStream rng(63);
    const int N = 1'000'000;
    int second = 0;
    for (int i = 0; i < N; ++i)
      second += perturbed_shortest_path(g, PerturbationSpec::gumbel(1.0, 0.0, NoiseSign::Add), rng)
                    .edges.front() == 1;
    CHECK(std::abs(static_cast<double>(second) / N - hedge_pair_probability(1.0, 1.0)) <= 0.005);
  }

  TEST_CASE("perturbed leader beats the leader on the embedded sequence") {
    const auto g = parallel();
    const std::size_t T = 1000;
    const auto ftl = run_online_path_game(g, PerturbationSpec::zero(NoiseSign::Add),
                                          ftl_killer_time_source(), T, RngStream(1));
    const auto fpl = run_online_path_game(g, PerturbationSpec::exponential(std::sqrt(2.0 / T), NoiseSign::Add),
                                          ftl_killer_time_source(), T, RngStream(1));
    CHECK(ftl.regret_trajectory.back() > 0.4 * T);
    CHECK(fpl.regret_trajectory.back() < 0.25 * T);
  }
}
