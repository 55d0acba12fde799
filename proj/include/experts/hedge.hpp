#pragma once

#include <optional>
#include <vector>

#include "experts/core.hpp"

namespace experts {

/// Learning rate of the exponential weighted average forecaster.
struct HedgeParams {
  double beta = 1.0;

  /// Throws DomainError unless beta is finite and positive.
  void validate() const;
};

/// probs[i] = e^{-β L_i} / Σ_k e^{-β L_k} over the cumulative losses L.
/// Exponentiation happens after subtracting min_k L_k, so long horizons do
/// not underflow.
ChoiceDistribution hedge_distribution(const LossHistory& history,
                                      const HedgeParams& params);
ChoiceDistribution hedge_distribution(std::span<const double> cumulative,
                                      const HedgeParams& params);

/// Probability that the trailing expert of a pair, behind by c >= 0, is
/// picked: e^{-βc} / (1 + e^{-βc}). Lies in (0, 0.5].
double hedge_pair_probability(double c, double beta);

class HedgeForecaster final : public Forecaster {
 public:
  explicit HedgeForecaster(HedgeParams params);

  std::string name() const override;
  ChoiceDistribution distribution(const LossHistory& history,
                                  RngStream& rng) override;
  const HedgeParams& params() const noexcept { return params_; }

 private:
  HedgeParams params_;
};

/// Randomized weighted majority: keeps explicit weights and multiplies each
/// by gamma^{loss} as rounds arrive, renormalizing every round. For 0/1 losses
/// this coincides with Hedge at beta = ln(1/gamma).
class WeightedMajorityForecaster final : public Forecaster {
 public:
  /// gamma must lie in (0, 1); throws DomainError otherwise.
  explicit WeightedMajorityForecaster(double gamma);

  std::string name() const override;
  void start(std::size_t n, const RngStream& game_rng) override;
  ChoiceDistribution distribution(const LossHistory& history,
                                  RngStream& rng) override;

  double gamma() const noexcept { return gamma_; }

 private:
  double gamma_;
  std::vector<double> weights_;
  std::size_t consumed_ = 0;
};

}  // namespace experts
