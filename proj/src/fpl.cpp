#include "experts/fpl.hpp"

#include <algorithm>
#include <future>

#include <fmt/format.h>

#include "experts/error.hpp"
#include "experts/hedge.hpp"

namespace experts {

ExpertId ftl_choose(std::span<const double> cumulative) {
  if (cumulative.empty()) throw DomainError("ftl_choose: no experts");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cumulative.size(); ++i) {
    if (cumulative[i] < cumulative[best]) best = i;
  }
  return ExpertId(best);
}

ExpertId ftl_choose(const LossHistory& history) {
  return ftl_choose(history.cumulative());
}

ExpertId perturbed_argmin(std::span<const double> cumulative,
                          std::span<const double> noise, NoiseSign sign) {
  if (cumulative.empty() || noise.size() != cumulative.size()) {
    throw DomainError("perturbed_argmin: width mismatch");
  }
  const double s = sign == NoiseSign::Subtract ? -1.0 : 1.0;
  std::size_t best = 0;
  double best_v = cumulative[0] + s * noise[0];
  for (std::size_t i = 1; i < cumulative.size(); ++i) {
    const double v = cumulative[i] + s * noise[i];
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  return ExpertId(best);
}

ExpertId fpl_choose(const LossHistory& history, const FplParams& params,
                    RngStream& rng) {
  const auto cum = history.cumulative();
  std::vector<double> noise(cum.size());
  for (double& p : noise) p = sample(params.perturbation, rng);
  return perturbed_argmin(cum, noise, params.perturbation.sign);
}

namespace {

constexpr std::size_t kParallelSampleThreshold = 200000;

std::vector<std::size_t> count_choices(std::span<const double> cum,
                                       const PerturbationSpec& spec,
                                       std::size_t draws, RngStream rng) {
  const std::size_t n = cum.size();
  std::vector<std::size_t> counts(n, 0);
  std::vector<double> noise(n);
  for (std::size_t d = 0; d < draws; ++d) {
    for (double& p : noise) p = sample(spec, rng);
    ++counts[perturbed_argmin(cum, noise, spec.sign).index];
  }
  return counts;
}

}  // namespace

ChoiceDistribution fpl_distribution(std::span<const double> cumulative,
                                    const FplParams& params, std::size_t samples,
                                    const RngStream& rng, std::size_t fanout) {
  if (samples == 0) throw DomainError("fpl_distribution: samples must be >= 1");
  if (cumulative.empty()) throw DomainError("fpl_distribution: no experts");
  params.perturbation.validate();
  fanout = std::clamp<std::size_t>(fanout, 1, samples);

  const std::vector<double> cum(cumulative.begin(), cumulative.end());
  auto draws_for = [&](std::size_t k) {
    return samples / fanout + (k < samples % fanout ? 1 : 0);
  };
  std::vector<std::size_t> counts(cum.size(), 0);
  auto merge = [&counts](const std::vector<std::size_t>& part) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += part[i];
  };
  // Small jobs run inline; the chunking, and hence the result, is the same.
  if (samples < kParallelSampleThreshold) {
    for (std::size_t k = 0; k < fanout; ++k) {
      merge(count_choices(cum, params.perturbation, draws_for(k),
                          rng.substream(k, Purpose::MonteCarlo)));
    }
  } else {
    std::vector<std::future<std::vector<std::size_t>>> parts;
    parts.reserve(fanout);
    for (std::size_t k = 0; k < fanout; ++k) {
      parts.push_back(std::async(
          std::launch::async,
          [&cum, &params, draws = draws_for(k), sub = rng.substream(k, Purpose::MonteCarlo)] {
            return count_choices(cum, params.perturbation, draws, sub);
          }));
    }
    for (auto& f : parts) merge(f.get());
  }

  // Normalize so the entries sum to exactly 1 even after rounding: the last
  // nonzero entry absorbs the residue.
  std::vector<double> probs(counts.size());
  const double total = static_cast<double>(samples);
  std::size_t last = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs[i] = static_cast<double>(counts[i]) / total;
    if (counts[i] > 0) last = i;
  }
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (i != last) acc += probs[i];
  probs[last] = std::max(0.0, 1.0 - acc);
  return ChoiceDistribution(std::move(probs));
}

ChoiceDistribution fpl_distribution(const LossHistory& history,
                                    const FplParams& params, std::size_t samples,
                                    const RngStream& rng, std::size_t fanout) {
  return fpl_distribution(history.cumulative(), params, samples, rng, fanout);
}

ChoiceDistribution fpl_exact_distribution_gumbel(std::span<const double> cumulative,
                                                 double scale) {
  if (!(scale > 0.0)) throw DomainError("gumbel scale must be positive");
  return hedge_distribution(cumulative, HedgeParams{1.0 / scale});
}

ChoiceDistribution fpl_exact_distribution_gumbel(const LossHistory& history,
                                                 double scale) {
  return fpl_exact_distribution_gumbel(history.cumulative(), scale);
}

bool has_exact_distribution(const FplParams& params, std::size_t n) {
  const auto& spec = params.perturbation;
  if (n <= 1 || spec.family == NoiseFamily::PointMassZero) return true;
  if (spec.family == NoiseFamily::Gumbel && spec.sign == NoiseSign::Subtract) return true;
  return n == 2;
}

std::optional<ChoiceDistribution> fpl_exact_distribution(
    std::span<const double> cumulative, const FplParams& params) {
  const std::size_t n = cumulative.size();
  const auto& spec = params.perturbation;
  spec.validate();
  if (!has_exact_distribution(params, n)) return std::nullopt;
  if (n == 1) return ChoiceDistribution::one_hot(1, ExpertId(0));
  if (spec.family == NoiseFamily::PointMassZero) {
    return ChoiceDistribution::one_hot(n, ftl_choose(cumulative));
  }
  if (spec.family == NoiseFamily::Gumbel && spec.sign == NoiseSign::Subtract) {
    return fpl_exact_distribution_gumbel(cumulative, spec.scale);
  }
  // Two experts: the pairwise law is the same under either sign.
  const bool second_trails = cumulative[1] >= cumulative[0];
  const double gap = second_trails ? cumulative[1] - cumulative[0]
                                   : cumulative[0] - cumulative[1];
  const double trailing = pair_probability_closed_form(spec, gap);
  return second_trails ? ChoiceDistribution({1.0 - trailing, trailing})
                       : ChoiceDistribution({trailing, 1.0 - trailing});
}

ChoiceDistribution FtlForecaster::distribution(const LossHistory& history,
                                               RngStream&) {
  return ChoiceDistribution::one_hot(history.experts(), ftl_choose(history));
}

FplForecaster::FplForecaster(FplParams params, DistributionMode mode,
                             std::size_t samples)
    : params_(params), mode_(mode), samples_(samples) {
  params_.perturbation.validate();
  if (samples_ == 0) throw ConfigError("FPL Monte Carlo sample count must be positive");
}

std::string FplForecaster::name() const {
  const auto& p = params_.perturbation;
  return fmt::format("fpl({},scale={},{}{})", to_string(p.family), p.scale,
                     to_string(p.sign), params_.fresh_noise_each_round ? "" : ",fixed");
}

void FplForecaster::start(std::size_t n, const RngStream& game_rng) {
  if (mode_ == DistributionMode::Exact && params_.fresh_noise_each_round &&
      !has_exact_distribution(params_, n)) {
    throw ConfigError(fmt::format(
        "{}: no exact selection law for {} experts; use Monte Carlo mode",
        name(), n));
  }
  fixed_noise_.clear();
  if (!params_.fresh_noise_each_round) {
    RngStream noise_rng = game_rng.substream(0, Purpose::Noise);
    fixed_noise_.resize(n);
    for (double& p : fixed_noise_) p = sample(params_.perturbation, noise_rng);
  }
}

ChoiceDistribution FplForecaster::distribution(const LossHistory& history,
                                               RngStream& rng) {
  const auto cum = history.cumulative();
  if (!params_.fresh_noise_each_round) {
    if (fixed_noise_.size() != cum.size()) {
      throw ConfigError("FplForecaster: start() was not called for this game");
    }
    return ChoiceDistribution::one_hot(
        cum.size(), perturbed_argmin(cum, fixed_noise_, params_.perturbation.sign));
  }
  if (mode_ == DistributionMode::Exact) {
    if (auto exact = fpl_exact_distribution(cum, params_)) return *std::move(exact);
    throw ConfigError(fmt::format("{}: no exact selection law for {} experts",
                                  name(), cum.size()));
  }
  return fpl_distribution(cum, params_, samples_, rng);
}

ExpertId FplForecaster::choose(const LossHistory& history,
                               const ChoiceDistribution&, RngStream& rng) {
  if (!params_.fresh_noise_each_round) {
    return perturbed_argmin(history.cumulative(), fixed_noise_,
                            params_.perturbation.sign);
  }
  return fpl_choose(history, params_, rng);
}

}  // namespace experts
