#include "experts/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "experts/error.hpp"

namespace experts {

LossHistory::LossHistory(std::size_t n) : n_(n), cumulative_(n, 0.0) {
  if (n == 0) throw ConfigError("LossHistory: expert count must be positive");
}

LossHistory LossHistory::from_cumulative(std::vector<double> cumulative) {
  LossHistory h(cumulative.size());
  h.append(cumulative);
  return h;
}

LossHistory LossHistory::from_rows(std::size_t n,
                                   const std::vector<std::vector<double>>& rows) {
  LossHistory h(n);
  for (const auto& r : rows) h.append(r);
  return h;
}

void LossHistory::append(std::span<const double> losses) {
  if (losses.size() != n_) {
    throw DataError(fmt::format("round {}: expected {} losses, got {}",
                                rounds_ + 1, n_, losses.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (!std::isfinite(losses[i])) {
      throw DataError(fmt::format("round {}: non-finite loss for expert {}",
                                  rounds_ + 1, i));
    }
  }
  per_round_.insert(per_round_.end(), losses.begin(), losses.end());
  for (std::size_t i = 0; i < n_; ++i) cumulative_[i] += losses[i];
  ++rounds_;
}

std::span<const double> LossHistory::row(std::size_t r) const {
  if (r >= rounds_) throw DomainError("LossHistory::row out of range");
  return std::span<const double>(per_round_).subspan(r * n_, n_);
}

ChoiceDistribution::ChoiceDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("empty choice distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw DomainError(fmt::format("invalid probability {}", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw DomainError(fmt::format("probabilities sum to {}, not 1", sum));
  }
}

ChoiceDistribution ChoiceDistribution::uniform(std::size_t n) {
  return ChoiceDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ChoiceDistribution ChoiceDistribution::one_hot(std::size_t n, ExpertId chosen) {
  std::vector<double> p(n, 0.0);
  p.at(chosen.index) = 1.0;
  return ChoiceDistribution(std::move(p));
}

ExpertId ChoiceDistribution::sample(double u) const {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] <= 0.0) continue;
    last_positive = i;
    acc += probs_[i];
    if (u < acc) return ExpertId(i);
  }
  // u landed in the rounding slack above the accumulated sum.
  return ExpertId(last_positive);
}

double ChoiceDistribution::expectation(std::span<const double> losses) const {
  if (losses.size() != probs_.size()) {
    throw DomainError("expectation: width mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) s += probs_[i] * losses[i];
  return s;
}

void Forecaster::start(std::size_t, const RngStream&) {}

ExpertId Forecaster::choose(const LossHistory&, const ChoiceDistribution& dist,
                            RngStream& rng) {
  return dist.sample(rng.uniform01());
}

std::vector<RoundRecord> run_game(Forecaster& forecaster, Adversary& adversary,
                                  std::size_t T, const RngStream& rng) {
  if (T == 0) throw ConfigError("run_game: T must be at least 1");
  const std::size_t n = adversary.expert_count();
  if (auto fixed = forecaster.expert_count(); fixed && *fixed != n) {
    throw ConfigError(fmt::format(
        "forecaster '{}' expects {} experts but the adversary has {}",
        forecaster.name(), *fixed, n));
  }

  adversary.reset();
  forecaster.start(n, rng);

  LossHistory history(n);
  std::vector<ExpertId> choices;
  choices.reserve(T);
  std::vector<RoundRecord> records;
  records.reserve(T);

  for (std::size_t t = 1; t <= T; ++t) {
    RngStream adv_rng = rng.substream(t, Purpose::Adversary);
    std::vector<double> losses = adversary.losses(t, choices, adv_rng);
    if (losses.size() != n) {
      throw ConfigError(fmt::format(
          "round {}: adversary emitted {} losses for {} experts", t,
          losses.size(), n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(losses[i])) {
        throw DataError(fmt::format(
            "round {}: adversary emitted non-finite loss for expert {}", t, i));
      }
    }

    RngStream dist_rng = rng.substream(t, Purpose::Forecast);
    ChoiceDistribution dist = forecaster.distribution(history, dist_rng);
    if (dist.size() != n) {
      throw ConfigError(fmt::format(
          "round {}: forecaster '{}' returned {} probabilities for {} experts",
          t, forecaster.name(), dist.size(), n));
    }
    RngStream choice_rng = rng.substream(t, Purpose::Choice);
    const ExpertId chosen = forecaster.choose(history, dist, choice_rng);

    RoundRecord rec;
    rec.t = t;
    rec.chosen = chosen;
    rec.algorithm_cost = losses.at(chosen.index);
    rec.expected_cost = dist.expectation(losses);
    rec.distribution = std::move(dist);
    rec.losses = std::move(losses);

    history.append(rec.losses);
    choices.push_back(chosen);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<double> expert_totals(std::span<const RoundRecord> records) {
  if (records.empty()) return {};
  std::vector<double> totals(records.front().losses.size(), 0.0);
  for (const auto& r : records) {
    if (r.losses.size() != totals.size()) {
      throw DataError(fmt::format("round {}: inconsistent loss width", r.t));
    }
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += r.losses[i];
  }
  return totals;
}

double regret(std::span<const RoundRecord> records) {
  if (records.empty()) throw DomainError("regret: no records");
  double expected = 0.0;
  for (const auto& r : records) expected += r.expected_cost;
  const auto totals = expert_totals(records);
  return expected - *std::min_element(totals.begin(), totals.end());
}

}  // namespace experts
