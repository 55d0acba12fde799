#include "experts/hedge.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "experts/error.hpp"

namespace experts {

void HedgeParams::validate() const {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw ConfigError(fmt::format("hedge beta must be finite and positive, got {}", beta));
  }
}

ChoiceDistribution hedge_distribution(std::span<const double> cumulative,
                                      const HedgeParams& params) {
  params.validate();
  if (cumulative.empty()) throw DomainError("hedge_distribution: no experts");
  for (double l : cumulative) {
    if (!std::isfinite(l)) throw DataError("hedge_distribution: non-finite cumulative loss");
  }
  const double lo = *std::min_element(cumulative.begin(), cumulative.end());
  std::vector<double> w(cumulative.size());
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-params.beta * (cumulative[i] - lo));
    z += w[i];
  }
  // z >= 1 because the leader contributes exp(0).
  for (double& x : w) x /= z;
  return ChoiceDistribution(std::move(w));
}

ChoiceDistribution hedge_distribution(const LossHistory& history,
                                      const HedgeParams& params) {
  return hedge_distribution(history.cumulative(), params);
}

double hedge_pair_probability(double c, double beta) {
  const double e = std::exp(-beta * c);
  return e / (1.0 + e);
}

HedgeForecaster::HedgeForecaster(HedgeParams params) : params_(params) {
  params_.validate();
}

std::string HedgeForecaster::name() const {
  return fmt::format("hedge(beta={})", params_.beta);
}

ChoiceDistribution HedgeForecaster::distribution(const LossHistory& history,
                                                 RngStream&) {
  return hedge_distribution(history, params_);
}

WeightedMajorityForecaster::WeightedMajorityForecaster(double gamma)
    : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError(fmt::format("weighted majority gamma must lie in (0,1), got {}", gamma));
  }
}

std::string WeightedMajorityForecaster::name() const {
  return fmt::format("rwm(gamma={})", gamma_);
}

void WeightedMajorityForecaster::start(std::size_t n, const RngStream&) {
  weights_.assign(n, 1.0 / static_cast<double>(n));
  consumed_ = 0;
}

ChoiceDistribution WeightedMajorityForecaster::distribution(
    const LossHistory& history, RngStream&) {
  if (weights_.size() != history.experts() || consumed_ > history.rounds()) {
    start(history.experts(), RngStream(0));
  }
  for (; consumed_ < history.rounds(); ++consumed_) {
    const auto row = history.row(consumed_);
    double z = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      weights_[i] *= std::pow(gamma_, row[i]);
      z += weights_[i];
    }
    for (double& w : weights_) w /= z;
  }
  return ChoiceDistribution(weights_);
}

}  // namespace experts
