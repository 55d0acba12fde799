#include "experts/adversary.hpp"

#include <cmath>

#include <fmt/format.h>

#include "experts/csv.hpp"
#include "experts/error.hpp"

namespace experts {

std::vector<double> ftl_killer_losses(std::size_t t, std::size_t n) {
  if (n != 2) throw ConfigError(fmt::format("FTL-killer is defined for 2 experts, not {}", n));
  if (t == 0) throw DomainError("rounds are numbered from 1");
  if (t == 1) return {0.0, 0.5};
  if (t % 2 == 0) return {1.0, 0.0};
  return {0.0, 1.0};
}

BernoulliAdversary::BernoulliAdversary(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw ConfigError("bernoulli adversary needs at least one expert");
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(fmt::format("bernoulli probability {} outside [0,1]", p));
    }
  }
}

std::vector<double> BernoulliAdversary::losses(std::size_t, std::span<const ExpertId>,
                                               RngStream& rng) {
  std::vector<double> out(probs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = rng.uniform01() < probs_[i] ? 1.0 : 0.0;
  }
  return out;
}

UniformAdversary::UniformAdversary(std::size_t n, double low, double high)
    : n_(n), low_(low), high_(high) {
  if (n == 0) throw ConfigError("uniform adversary needs at least one expert");
  if (!std::isfinite(low) || !std::isfinite(high) || low > high) {
    throw ConfigError(fmt::format("uniform adversary bounds [{}, {}] invalid", low, high));
  }
}

std::vector<double> UniformAdversary::losses(std::size_t, std::span<const ExpertId>,
                                             RngStream& rng) {
  std::vector<double> out(n_);
  for (double& x : out) x = low_ + (high_ - low_) * rng.uniform01();
  return out;
}

ReplayAdversary::ReplayAdversary(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw DataError("replay table is empty");
  n_ = rows_.front().size();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != n_) {
      throw DataError(fmt::format("replay row {} has {} losses, expected {}", r + 1,
                                  rows_[r].size(), n_));
    }
  }
}

ReplayAdversary ReplayAdversary::from_csv(const std::filesystem::path& path) {
  return ReplayAdversary(read_loss_columns(path));
}

std::vector<double> ReplayAdversary::losses(std::size_t t, std::span<const ExpertId>,
                                            RngStream&) {
  if (t == 0 || t > rows_.size()) {
    throw DataError(fmt::format("replay exhausted at round {} ({} rounds available)",
                                t, rows_.size()));
  }
  return rows_[t - 1];
}

AdaptiveAdversary::AdaptiveAdversary(std::size_t n, AdaptiveRule rule)
    : n_(n), rule_(std::move(rule)) {
  if (n == 0) throw ConfigError("adaptive adversary needs at least one expert");
  if (!rule_) throw ConfigError("adaptive adversary needs a rule");
}

std::vector<double> AdaptiveAdversary::losses(std::size_t t,
                                              std::span<const ExpertId> past,
                                              RngStream&) {
  return rule_(t, past);
}

AdaptiveRule charge_previous_rule(std::size_t n) {
  return [n](std::size_t, std::span<const ExpertId> past) {
    std::vector<double> out(n, 0.0);
    if (!past.empty()) out.at(past.back().index) = 1.0;
    return out;
  };
}

void AdversaryConfig::validate() const {
  switch (kind) {
    case AdversaryKind::FtlKiller:
      break;
    case AdversaryKind::BernoulliIID:
      BernoulliAdversary{probs};
      break;
    case AdversaryKind::UniformIID:
      UniformAdversary{n, low, high};
      break;
    case AdversaryKind::Adaptive:
      if (n == 0) throw ConfigError("adaptive adversary needs n >= 1");
      if (rule != "charge-previous") {
        throw ConfigError(fmt::format("unknown adaptive rule '{}'", rule));
      }
      break;
    case AdversaryKind::Replay:
      if (path.empty()) throw ConfigError("replay adversary needs a path");
      break;
  }
}

std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::FtlKiller: return "ftl-killer";
    case AdversaryKind::BernoulliIID: return "bernoulli";
    case AdversaryKind::UniformIID: return "uniform";
    case AdversaryKind::Adaptive: return "adaptive";
    case AdversaryKind::Replay: return "replay";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(const std::string& name) {
  for (auto k : {AdversaryKind::FtlKiller, AdversaryKind::BernoulliIID,
                 AdversaryKind::UniformIID, AdversaryKind::Adaptive,
                 AdversaryKind::Replay}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown adversary kind '{}'", name));
}

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config) {
  config.validate();
  switch (config.kind) {
    case AdversaryKind::FtlKiller:
      return std::make_unique<FtlKillerAdversary>();
    case AdversaryKind::BernoulliIID:
      return std::make_unique<BernoulliAdversary>(config.probs);
    case AdversaryKind::UniformIID:
      return std::make_unique<UniformAdversary>(config.n, config.low, config.high);
    case AdversaryKind::Adaptive:
      return std::make_unique<AdaptiveAdversary>(config.n, charge_previous_rule(config.n));
    case AdversaryKind::Replay:
      return std::make_unique<ReplayAdversary>(ReplayAdversary::from_csv(config.path));
  }
  throw ConfigError("unhandled adversary kind");
}

std::vector<double> generate_losses(Adversary& adversary, std::size_t t,
                                    std::span<const ExpertId> past_choices,
                                    RngStream& rng) {
  if (t == 0) throw DomainError("rounds are numbered from 1");
  if (past_choices.size() != t - 1) {
    throw ConfigError(fmt::format("round {}: expected {} past choices, got {}", t,
                                  t - 1, past_choices.size()));
  }
  auto out = adversary.losses(t, past_choices, rng);
  if (out.size() != adversary.expert_count()) {
    throw ConfigError(fmt::format("round {}: adversary emitted {} losses for {} experts",
                                  t, out.size(), adversary.expert_count()));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      throw DataError(fmt::format("round {}: non-finite loss for expert {}", t, i));
    }
  }
  return out;
}

}  // namespace experts
