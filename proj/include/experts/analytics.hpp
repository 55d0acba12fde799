#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "experts/core.hpp"
#include "experts/fpl.hpp"

namespace experts {

/// Constants of the linear-cost perturbed-leader bounds.
///   D >= |d - d'|_1 over decisions, R >= |d·s| over decisions and cost
///   vectors, A >= |s|_1 over cost vectors.
struct BoundParams {
  double D = 2.0;
  double R = 0.0;
  double A = 0.0;
  std::size_t n = 1;
  std::size_t T = 0;
};

/// Bound constants for an expert game whose decisions are simplex vertices:
/// D = 2, R = max |loss|, A = max_t Σ_i |loss_t,i|.
BoundParams simplex_bound_params(std::span<const RoundRecord> records);

/// (m·ln(1/gamma) + ln n) / (1 − gamma), the weighted-majority guarantee on
/// 0/1 losses. gamma is the per-mistake weight multiplier, not a learning
/// rate. Throws DomainError unless 0 < gamma < 1, m >= 0 and n >= 1.
double weighted_majority_bound(double m, std::size_t n, double gamma);

/// mincost + eps·R·A·T + D/eps. Throws DomainError unless eps ∈ (0, 1].
double fpl_bound(double mincost, double eps, const BoundParams& bp);

/// The eps minimizing fpl_bound, sqrt(D / (R·A·T)), capped at 1.
double fpl_best_eps(const BoundParams& bp);

/// (1 + eps)·mincost + 4·A·D·(1 + ln n)/eps. Throws DomainError if
/// mincost < 0 or eps <= 0.
double fpl_star_bound(double mincost, double eps, const BoundParams& bp);

enum class BoundKind { WeightedMajority, PerturbedLeader, PerturbedLeaderStar };

/// "weighted-majority", "fpl", "fpl-star".
std::string to_string(BoundKind k);
BoundKind parse_bound_kind(const std::string& name);

enum class AlgorithmKind { FollowTheLeader, Hedge, WeightedMajority, PerturbedLeader };

std::string to_string(AlgorithmKind k);
/// Accepts "ftl", "hedge", "rwm", "fpl".
AlgorithmKind parse_algorithm_kind(const std::string& name);

/// Complete description of a forecaster, enough to build it and to decide
/// which guarantees apply to its runs.
struct AlgorithmDescriptor {
  AlgorithmKind kind = AlgorithmKind::Hedge;
  double beta = 1.0;   // Hedge learning rate
  double gamma = 0.5;  // weighted-majority multiplier
  FplParams fpl;
  DistributionMode mode = DistributionMode::Exact;
  std::size_t samples = FplForecaster::kDefaultSamples;

  std::string label() const;
  friend bool operator==(const AlgorithmDescriptor&, const AlgorithmDescriptor&) = default;
};

std::unique_ptr<Forecaster> make_forecaster(const AlgorithmDescriptor& desc);

struct BoundCheck {
  std::string name;
  double value = 0.0;
  /// The bound's free parameter as evaluated (gamma or eps).
  double parameter = 0.0;
  bool satisfied = false;
};

struct RegretReport {
  double algorithm_expected_cost = 0.0;
  double best_expert_cost = 0.0;
  ExpertId best_expert;
  double regret = 0.0;
  std::vector<double> regret_trajectory;
  std::vector<BoundCheck> bounds_checked;
};

/// Cumulative regret after each round against the best expert of that prefix.
std::vector<double> regret_trajectory(std::span<const RoundRecord> records);

/// Bounds whose hypotheses hold for this run.
std::vector<BoundKind> applicable_bounds(std::span<const RoundRecord> records,
                                         const AlgorithmDescriptor& algo);

/// Regret summary plus each requested bound evaluated against the expected
/// cost; satisfied means cost <= bound + 1e-9.
///
/// A bound whose hypotheses fail for this run raises ConfigError naming the
/// hypothesis; it is never reported as satisfied.
RegretReport check_run_against_bounds(std::span<const RoundRecord> records,
                                      const AlgorithmDescriptor& algo,
                                      const BoundParams& bp,
                                      std::span<const BoundKind> requested);
/// Same, checking every applicable bound.
RegretReport check_run_against_bounds(std::span<const RoundRecord> records,
                                      const AlgorithmDescriptor& algo,
                                      const BoundParams& bp);

struct EquivalenceCase {
  std::size_t index = 0;
  std::size_t n = 0;
  /// max_i |sampled FPL − Hedge|.
  double sampled_deviation = 0.0;
  /// max_i |closed-form FPL − Hedge|.
  double exact_deviation = 0.0;
  bool passed = false;
};

struct EquivalenceReport {
  double beta = 1.0;
  double gumbel_scale = 1.0;
  std::size_t samples = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<EquivalenceCase> cases;
  double max_sampled_deviation = 0.0;
  double max_exact_deviation = 0.0;
  bool passed = false;
};

inline constexpr double kExactEquivalenceTolerance = 1e-12;

/// For each history compares Hedge(beta) with FPL under subtractive
/// Gumbel(0, gumbel_scale) noise, both sampled (`samples` draws, history k
/// using rng.substream(k, Purpose::MonteCarlo)) and in closed form.
/// gumbel_scale defaults to 1/beta, the matched setting. A case passes when
/// the sampled deviation is within `tol` and the closed form within
/// kExactEquivalenceTolerance.
EquivalenceReport verify_gumbel_hedge_equivalence(
    std::span<const LossHistory> histories, double beta, std::size_t samples,
    double tol, const RngStream& rng, std::optional<double> gumbel_scale = {});

/// Deterministic corpus: expert counts uniform on [1, max_n], 1 to 5 rounds of
/// nonnegative losses with every cumulative loss in [0, max_loss].
std::vector<LossHistory> make_history_corpus(std::size_t count, std::size_t max_n,
                                             double max_loss, std::uint64_t seed);

nlohmann::json to_json(const BoundParams& bp);
nlohmann::json to_json(const RegretReport& report);
nlohmann::json to_json(const EquivalenceReport& report);

}  // namespace experts
