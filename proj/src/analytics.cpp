#include "experts/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "experts/error.hpp"
#include "experts/hedge.hpp"

namespace experts {

namespace {

constexpr double kBoundSlack = 1e-9;

bool all_losses_binary(std::span<const RoundRecord> records) {
  for (const auto& r : records)
    for (double l : r.losses)
      if (l != 0.0 && l != 1.0) return false;
  return true;
}

bool all_losses_nonnegative(std::span<const RoundRecord> records) {
  for (const auto& r : records)
    for (double l : r.losses)
      if (l < 0.0) return false;
  return true;
}

/// Inapplicability reason, or empty when the bound's hypotheses hold.
std::string why_inapplicable(BoundKind bound, std::span<const RoundRecord> records,
                             const AlgorithmDescriptor& algo) {
  const auto& noise = algo.fpl.perturbation;
  switch (bound) {
    case BoundKind::WeightedMajority:
      if (algo.kind != AlgorithmKind::Hedge && algo.kind != AlgorithmKind::WeightedMajority)
        return "weighted-majority bound applies to hedge or weighted majority only";
      if (!all_losses_binary(records)) return "weighted-majority bound requires every loss in {0,1}";
      return {};
    case BoundKind::PerturbedLeader:
      if (algo.kind != AlgorithmKind::PerturbedLeader)
        return "fpl bound applies to follow-the-perturbed-leader only";
      if (!algo.fpl.fresh_noise_each_round)
        return "fpl bound requires fresh noise every round";
      if (noise.family != NoiseFamily::Uniform && noise.family != NoiseFamily::Exponential)
        return "fpl bound requires uniform or exponential noise";
      if ((noise.family == NoiseFamily::Uniform ? 1.0 / noise.scale : noise.scale) > 1.0)
        return "fpl bound requires eps <= 1";
      return {};
    case BoundKind::PerturbedLeaderStar:
      if (algo.kind != AlgorithmKind::PerturbedLeader)
        return "fpl-star bound applies to follow-the-perturbed-leader only";
      if (!algo.fpl.fresh_noise_each_round)
        return "fpl-star bound requires fresh noise every round";
      if (noise.family != NoiseFamily::Exponential)
        return "fpl-star bound requires exponential noise";
      if (!all_losses_nonnegative(records)) return "fpl-star bound requires nonnegative losses";
      return {};
  }
  return "unknown bound";
}

}  // namespace

BoundParams simplex_bound_params(std::span<const RoundRecord> records) {
  BoundParams bp;
  bp.D = 2.0;
  bp.T = records.size();
  bp.n = records.empty() ? 1 : records.front().losses.size();
  for (const auto& r : records) {
    double l1 = 0.0;
    for (double l : r.losses) {
      bp.R = std::max(bp.R, std::abs(l));
      l1 += std::abs(l);
    }
    bp.A = std::max(bp.A, l1);
  }
  return bp;
}

double weighted_majority_bound(double m, std::size_t n, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw DomainError(fmt::format("weighted-majority bound: gamma must lie in (0,1), got {}", gamma));
  if (!(m >= 0.0)) throw DomainError("weighted-majority bound: m must be nonnegative");
  if (n == 0) throw DomainError("weighted-majority bound: n must be positive");
  return (m * std::log(1.0 / gamma) + std::log(static_cast<double>(n))) / (1.0 - gamma);
}

double fpl_bound(double mincost, double eps, const BoundParams& bp) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw DomainError(fmt::format("fpl bound: eps must lie in (0,1], got {}", eps));
  return mincost + eps * bp.R * bp.A * static_cast<double>(bp.T) + bp.D / eps;
}

double fpl_best_eps(const BoundParams& bp) {
  const double rat = bp.R * bp.A * static_cast<double>(bp.T);
  if (rat <= 0.0) return 1.0;
  return std::min(1.0, std::sqrt(bp.D / rat));
}

double fpl_star_bound(double mincost, double eps, const BoundParams& bp) {
  if (!(mincost >= 0.0))
    throw DomainError("fpl-star bound: requires nonnegative costs (mincost >= 0)");
  if (!(eps > 0.0)) throw DomainError("fpl-star bound: eps must be positive");
  return (1.0 + eps) * mincost +
         4.0 * bp.A * bp.D * (1.0 + std::log(static_cast<double>(bp.n))) / eps;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::WeightedMajority: return "weighted-majority";
    case BoundKind::PerturbedLeader: return "fpl";
    case BoundKind::PerturbedLeaderStar: return "fpl-star";
  }
  return "?";
}

BoundKind parse_bound_kind(const std::string& name) {
  for (auto k : {BoundKind::WeightedMajority, BoundKind::PerturbedLeader,
                 BoundKind::PerturbedLeaderStar})
    if (to_string(k) == name) return k;
  throw ConfigError(fmt::format("unknown bound '{}'", name));
}

std::string to_string(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::FollowTheLeader: return "ftl";
    case AlgorithmKind::Hedge: return "hedge";
    case AlgorithmKind::WeightedMajority: return "rwm";
    case AlgorithmKind::PerturbedLeader: return "fpl";
  }
  return "?";
}

AlgorithmKind parse_algorithm_kind(const std::string& name) {
  for (auto k : {AlgorithmKind::FollowTheLeader, AlgorithmKind::Hedge,
                 AlgorithmKind::WeightedMajority, AlgorithmKind::PerturbedLeader})
    if (to_string(k) == name) return k;
  throw ConfigError(fmt::format("unknown algorithm '{}'", name));
}

std::string AlgorithmDescriptor::label() const {
  switch (kind) {
    case AlgorithmKind::FollowTheLeader: return "ftl";
    case AlgorithmKind::Hedge: return fmt::format("hedge(beta={})", beta);
    case AlgorithmKind::WeightedMajority: return fmt::format("rwm(gamma={})", gamma);
    case AlgorithmKind::PerturbedLeader: {
      const auto& p = fpl.perturbation;
      return fmt::format("fpl-{}(scale={}{}{})", to_string(p.family), p.scale,
                         p.sign == NoiseSign::Add ? ",add" : "",
                         fpl.fresh_noise_each_round ? "" : ",fixed");
    }
  }
  return "?";
}

std::unique_ptr<Forecaster> make_forecaster(const AlgorithmDescriptor& desc) {
  switch (desc.kind) {
    case AlgorithmKind::FollowTheLeader:
      return std::make_unique<FtlForecaster>();
    case AlgorithmKind::Hedge:
      return std::make_unique<HedgeForecaster>(HedgeParams{desc.beta});
    case AlgorithmKind::WeightedMajority:
      return std::make_unique<WeightedMajorityForecaster>(desc.gamma);
    case AlgorithmKind::PerturbedLeader:
      return std::make_unique<FplForecaster>(desc.fpl, desc.mode, desc.samples);
  }
  throw ConfigError("unhandled algorithm kind");
}

std::vector<double> regret_trajectory(std::span<const RoundRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  if (records.empty()) return out;
  std::vector<double> totals(records.front().losses.size(), 0.0);
  double expected = 0.0;
  for (const auto& r : records) {
    expected += r.expected_cost;
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += r.losses.at(i);
    out.push_back(expected - *std::min_element(totals.begin(), totals.end()));
  }
  return out;
}

std::vector<BoundKind> applicable_bounds(std::span<const RoundRecord> records,
                                         const AlgorithmDescriptor& algo) {
  std::vector<BoundKind> out;
  for (auto k : {BoundKind::WeightedMajority, BoundKind::PerturbedLeader,
                 BoundKind::PerturbedLeaderStar})
    if (why_inapplicable(k, records, algo).empty()) out.push_back(k);
  return out;
}

RegretReport check_run_against_bounds(std::span<const RoundRecord> records,
                                      const AlgorithmDescriptor& algo,
                                      const BoundParams& bp,
                                      std::span<const BoundKind> requested) {
  if (records.empty()) throw DomainError("check_run_against_bounds: no records");

  RegretReport rep;
  for (const auto& r : records) rep.algorithm_expected_cost += r.expected_cost;
  const auto totals = expert_totals(records);
  const auto best = std::min_element(totals.begin(), totals.end());
  rep.best_expert = ExpertId(static_cast<std::size_t>(best - totals.begin()));
  rep.best_expert_cost = *best;
  rep.regret_trajectory = regret_trajectory(records);
  rep.regret = rep.regret_trajectory.back();

  for (BoundKind kind : requested) {
    if (auto why = why_inapplicable(kind, records, algo); !why.empty()) {
      throw ConfigError(fmt::format("{} requested for {}: {}", to_string(kind),
                                    algo.label(), why));
    }
    BoundCheck chk;
    chk.name = to_string(kind);
    const auto& noise = algo.fpl.perturbation;
    switch (kind) {
      case BoundKind::WeightedMajority:
        chk.parameter = algo.kind == AlgorithmKind::Hedge ? std::exp(-algo.beta) : algo.gamma;
        chk.value = weighted_majority_bound(rep.best_expert_cost, bp.n, chk.parameter);
        break;
      case BoundKind::PerturbedLeader:
        // Uniform noise of width w corresponds to eps = 1/w; exponential
        // noise of rate eps is used directly.
        chk.parameter = noise.family == NoiseFamily::Uniform ? 1.0 / noise.scale : noise.scale;
        chk.value = fpl_bound(rep.best_expert_cost, chk.parameter, bp);
        break;
      case BoundKind::PerturbedLeaderStar:
        // Noise rate r corresponds to eps = 2·A·r.
        chk.parameter = 2.0 * bp.A * noise.scale;
        if (chk.parameter > 0.0) {
          chk.value = fpl_star_bound(rep.best_expert_cost, chk.parameter, bp);
        } else {
          // A = 0: every loss is zero; take the eps -> 0 limit of the
          // additive term, 2·D·(1 + ln n)/r.
          chk.value = rep.best_expert_cost +
                      2.0 * bp.D * (1.0 + std::log(static_cast<double>(bp.n))) / noise.scale;
        }
        break;
    }
    chk.satisfied = rep.algorithm_expected_cost <= chk.value + kBoundSlack;
    rep.bounds_checked.push_back(std::move(chk));
  }
  return rep;
}

RegretReport check_run_against_bounds(std::span<const RoundRecord> records,
                                      const AlgorithmDescriptor& algo,
                                      const BoundParams& bp) {
  const auto kinds = applicable_bounds(records, algo);
  return check_run_against_bounds(records, algo, bp, kinds);
}

EquivalenceReport verify_gumbel_hedge_equivalence(
    std::span<const LossHistory> histories, double beta, std::size_t samples,
    double tol, const RngStream& rng, std::optional<double> gumbel_scale) {
  HedgeParams hp{beta};
  hp.validate();
  EquivalenceReport rep;
  rep.beta = beta;
  rep.gumbel_scale = gumbel_scale.value_or(1.0 / beta);
  rep.samples = samples;
  rep.tolerance = tol;
  rep.seed = rng.seed();
  rep.stream_id = rng.stream_id();
  rep.passed = true;

  const FplParams params{PerturbationSpec::gumbel(rep.gumbel_scale), true};
  for (std::size_t k = 0; k < histories.size(); ++k) {
    const auto& h = histories[k];
    const auto hedge = hedge_distribution(h, hp);
    const auto exact = fpl_exact_distribution_gumbel(h, rep.gumbel_scale);
    const auto sampled =
        fpl_distribution(h, params, samples, rng.substream(k, Purpose::MonteCarlo));

    EquivalenceCase c;
    c.index = k;
    c.n = h.experts();
    for (std::size_t i = 0; i < c.n; ++i) {
      c.sampled_deviation = std::max(c.sampled_deviation, std::abs(sampled[i] - hedge[i]));
      c.exact_deviation = std::max(c.exact_deviation, std::abs(exact[i] - hedge[i]));
    }
    c.passed = c.sampled_deviation <= tol && c.exact_deviation <= kExactEquivalenceTolerance;
    rep.max_sampled_deviation = std::max(rep.max_sampled_deviation, c.sampled_deviation);
    rep.max_exact_deviation = std::max(rep.max_exact_deviation, c.exact_deviation);
    rep.passed = rep.passed && c.passed;
    rep.cases.push_back(c);
  }
  return rep;
}

std::vector<LossHistory> make_history_corpus(std::size_t count, std::size_t max_n,
                                             double max_loss, std::uint64_t seed) {
  if (max_n == 0) throw DomainError("corpus: max_n must be positive");
  RngStream root(seed, static_cast<std::uint64_t>(Purpose::Corpus));
  std::vector<LossHistory> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    RngStream rng = root.substream(k);
    const std::size_t n = 1 + rng.next_u64() % max_n;
    const std::size_t rounds = 1 + rng.next_u64() % 5;
    const double per_round = max_loss / static_cast<double>(rounds);
    LossHistory h(n);
    std::vector<double> row(n);
    for (std::size_t r = 0; r < rounds; ++r) {
      for (double& x : row) x = per_round * rng.uniform01();
      h.append(row);
    }
    out.push_back(std::move(h));
  }
  return out;
}

nlohmann::json to_json(const BoundParams& bp) {
  return {{"D", bp.D}, {"R", bp.R}, {"A", bp.A}, {"n", bp.n}, {"T", bp.T}};
}

nlohmann::json to_json(const RegretReport& r) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : r.bounds_checked) {
    bounds.push_back({{"name", b.name},
                      {"value", b.value},
                      {"parameter", b.parameter},
                      {"satisfied", b.satisfied}});
  }
  return {{"algorithm_expected_cost", r.algorithm_expected_cost},
          {"best_expert_cost", r.best_expert_cost},
          {"best_expert", r.best_expert.index},
          {"regret", r.regret},
          {"regret_trajectory", r.regret_trajectory},
          {"bounds_checked", bounds}};
}

nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"index", c.index},
                     {"n", c.n},
                     {"sampled_deviation", c.sampled_deviation},
                     {"exact_deviation", c.exact_deviation},
                     {"passed", c.passed}});
  }
  return {{"beta", r.beta},
          {"gumbel_scale", r.gumbel_scale},
          {"samples", r.samples},
          {"tolerance", r.tolerance},
          {"seed", r.seed},
          {"stream_id", r.stream_id},
          {"max_sampled_deviation", r.max_sampled_deviation},
          {"max_exact_deviation", r.max_exact_deviation},
          {"passed", r.passed},
          {"cases", cases}};
}

}  // namespace experts
