#pragma once

#include <optional>
#include <span>
#include <vector>

#include "experts/core.hpp"
#include "experts/perturbation.hpp"

namespace experts {

struct FplParams {
  PerturbationSpec perturbation;
  /// Draw new noise every round. When false, one noise vector is drawn at
  /// the start of the game and reused.
  bool fresh_noise_each_round = true;

  friend bool operator==(const FplParams&, const FplParams&) = default;
};

/// argmin_i cumulative[i], lowest index on ties.
ExpertId ftl_choose(const LossHistory& history);
ExpertId ftl_choose(std::span<const double> cumulative);

/// argmin_i (cumulative[i] ∓ noise[i]) per `sign`, lowest index on ties.
ExpertId perturbed_argmin(std::span<const double> cumulative,
                          std::span<const double> noise, NoiseSign sign);

/// Draws one noise value per expert (in index order) and returns the
/// perturbed leader.
ExpertId fpl_choose(const LossHistory& history, const FplParams& params,
                    RngStream& rng);

/// Empirical selection law of fpl_choose over `samples` independent draws.
///
/// Work is split into `fanout` chunks, chunk k drawing from
/// rng.substream(k, Purpose::MonteCarlo); the result depends only on
/// (rng, samples, fanout), not on thread scheduling. Entries are counts
/// divided by `samples`.
ChoiceDistribution fpl_distribution(std::span<const double> cumulative,
                                    const FplParams& params, std::size_t samples,
                                    const RngStream& rng, std::size_t fanout = 8);
ChoiceDistribution fpl_distribution(const LossHistory& history,
                                    const FplParams& params, std::size_t samples,
                                    const RngStream& rng, std::size_t fanout = 8);

/// Exact selection law of FPL with Gumbel(0, scale) noise under the subtract
/// convention: Hedge with beta = 1/scale.
ChoiceDistribution fpl_exact_distribution_gumbel(const LossHistory& history,
                                                 double scale);
ChoiceDistribution fpl_exact_distribution_gumbel(std::span<const double> cumulative,
                                                 double scale);

/// Whether fpl_exact_distribution can answer for n experts: a single expert,
/// zero noise, subtractive Gumbel noise, or any continuous family with n = 2.
bool has_exact_distribution(const FplParams& params, std::size_t n);

/// Exact selection law where a closed form exists, otherwise nullopt.
std::optional<ChoiceDistribution> fpl_exact_distribution(
    std::span<const double> cumulative, const FplParams& params);

class FtlForecaster final : public Forecaster {
 public:
  std::string name() const override { return "ftl"; }
  ChoiceDistribution distribution(const LossHistory& history,
                                  RngStream& rng) override;
};

enum class DistributionMode { Exact, MonteCarlo };

/// Follow the perturbed leader.
///
/// choose() always plays an actual perturbed draw. distribution() reports
/// the law used for expected-cost accounting: the closed form in Exact mode,
/// a Monte Carlo estimate otherwise. With fixed noise the law of the run,
/// conditional on the drawn noise, is a point mass.
class FplForecaster final : public Forecaster {
 public:
  static constexpr std::size_t kDefaultSamples = 100000;

  /// Throws ConfigError on an invalid perturbation.
  FplForecaster(FplParams params, DistributionMode mode,
                std::size_t samples = kDefaultSamples);

  std::string name() const override;
  /// Throws ConfigError if Exact mode is requested where no closed form
  /// exists for n experts.
  void start(std::size_t n, const RngStream& game_rng) override;
  ChoiceDistribution distribution(const LossHistory& history,
                                  RngStream& rng) override;
  ExpertId choose(const LossHistory& history, const ChoiceDistribution& dist,
                  RngStream& rng) override;

  const FplParams& params() const noexcept { return params_; }
  DistributionMode mode() const noexcept { return mode_; }

 private:
  FplParams params_;
  DistributionMode mode_;
  std::size_t samples_;
  std::vector<double> fixed_noise_;
};

}  // namespace experts
