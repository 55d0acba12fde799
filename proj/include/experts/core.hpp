#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "experts/rng.hpp"

namespace experts {

/// Index of an expert in [0, n).
struct ExpertId {
  std::size_t index = 0;

  constexpr ExpertId() = default;
  constexpr explicit ExpertId(std::size_t i) : index(i) {}
  friend constexpr auto operator<=>(ExpertId, ExpertId) = default;
};

/// Per-round and cumulative losses of n experts after t rounds.
///
/// Rows are appended one round at a time; cumulative()[i] is the column sum
/// of expert i. Every stored value is finite.
class LossHistory {
 public:
  explicit LossHistory(std::size_t n);

  /// History whose single round has the given losses, so cumulative() equals
  /// `cumulative`. Convenient for evaluating a selection law at a fixed
  /// cumulative-loss vector.
  static LossHistory from_cumulative(std::vector<double> cumulative);
  static LossHistory from_rows(std::size_t n,
                               const std::vector<std::vector<double>>& rows);

  /// Throws DataError on a width mismatch or a non-finite entry.
  void append(std::span<const double> losses);

  std::size_t experts() const noexcept { return n_; }
  std::size_t rounds() const noexcept { return rounds_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }
  double cumulative(std::size_t i) const { return cumulative_.at(i); }
  /// Losses of round `r` (0-based).
  std::span<const double> row(std::size_t r) const;

 private:
  std::size_t n_;
  std::size_t rounds_ = 0;
  std::vector<double> per_round_;  // row-major, rounds_ x n_
  std::vector<double> cumulative_;
};

/// Probability vector over experts. Entries are nonnegative and sum to 1
/// within 1e-9.
class ChoiceDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Validates; throws DomainError if an entry is negative or non-finite or
  /// the sum is off by more than kSumTolerance.
  explicit ChoiceDistribution(std::vector<double> probs);

  static ChoiceDistribution uniform(std::size_t n);
  static ChoiceDistribution one_hot(std::size_t n, ExpertId chosen);

  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Inverse-CDF draw for u in [0, 1).
  ExpertId sample(double u) const;
  /// Σ probs[i]·losses[i].
  double expectation(std::span<const double> losses) const;

  friend bool operator==(const ChoiceDistribution&,
                         const ChoiceDistribution&) = default;

 private:
  std::vector<double> probs_;
};

struct RoundRecord {
  std::size_t t = 0;  // 1-based round index
  ChoiceDistribution distribution = ChoiceDistribution::uniform(1);
  ExpertId chosen;
  std::vector<double> losses;
  double algorithm_cost = 0.0;  // losses[chosen]
  double expected_cost = 0.0;   // distribution · losses

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

/// An online algorithm over n experts.
///
/// At round t the game loop calls distribution() with the history of rounds
/// 1..t-1, then choose() to draw the played expert. Both receive a stream
/// private to (round, purpose).
class Forecaster {
 public:
  virtual ~Forecaster() = default;

  virtual std::string name() const = 0;

  /// Fixed expert count if the forecaster is bound to one.
  virtual std::optional<std::size_t> expert_count() const { return std::nullopt; }

  /// Called once before round 1. Resets any internal state.
  virtual void start(std::size_t n, const RngStream& game_rng);

  virtual ChoiceDistribution distribution(const LossHistory& history,
                                          RngStream& rng) = 0;

  /// Default: inverse-CDF sample from `dist`.
  virtual ExpertId choose(const LossHistory& history,
                          const ChoiceDistribution& dist, RngStream& rng);
};

/// Loss generator. losses() sees the algorithm's past choices only, never
/// the current round's distribution or randomness.
class Adversary {
 public:
  virtual ~Adversary() = default;

  virtual std::size_t expert_count() const = 0;
  /// Rewind replayable state before a new game.
  virtual void reset() {}
  /// Losses for round t (1-based); past_choices has t-1 entries.
  virtual std::vector<double> losses(std::size_t t,
                                     std::span<const ExpertId> past_choices,
                                     RngStream& rng) = 0;
};

/// Plays T rounds. Round t uses rng.substream(t, purpose) for each purpose,
/// so results do not depend on evaluation order.
///
/// Throws ConfigError if T == 0 or expert counts disagree, DataError naming
/// the round if the adversary emits a non-finite loss.
std::vector<RoundRecord> run_game(Forecaster& forecaster, Adversary& adversary,
                                  std::size_t T, const RngStream& rng);

/// Σ_t expected_cost(t) − min_i Σ_t losses_t[i]. Throws DomainError if empty.
double regret(std::span<const RoundRecord> records);

/// Column sums of the loss vectors in `records`.
std::vector<double> expert_totals(std::span<const RoundRecord> records);

}  // namespace experts
