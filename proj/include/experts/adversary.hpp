#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "experts/core.hpp"

namespace experts {

/// Losses for round t of the two-expert sequence that defeats
/// follow-the-leader: (0, 0.5), then (1, 0) on even rounds and (0, 1) on odd
/// rounds. Throws ConfigError if n != 2 and DomainError if t == 0.
std::vector<double> ftl_killer_losses(std::size_t t, std::size_t n = 2);

class FtlKillerAdversary final : public Adversary {
 public:
  std::size_t expert_count() const override { return 2; }
  std::vector<double> losses(std::size_t t, std::span<const ExpertId>,
                             RngStream&) override {
    return ftl_killer_losses(t);
  }
};

/// Independent 0/1 losses: expert i pays 1 with probability probs[i].
class BernoulliAdversary final : public Adversary {
 public:
  explicit BernoulliAdversary(std::vector<double> probs);
  std::size_t expert_count() const override { return probs_.size(); }
  std::vector<double> losses(std::size_t t, std::span<const ExpertId>,
                             RngStream& rng) override;

 private:
  std::vector<double> probs_;
};

/// Independent losses uniform on [low, high].
class UniformAdversary final : public Adversary {
 public:
  UniformAdversary(std::size_t n, double low, double high);
  std::size_t expert_count() const override { return n_; }
  std::vector<double> losses(std::size_t t, std::span<const ExpertId>,
                             RngStream& rng) override;

 private:
  std::size_t n_;
  double low_;
  double high_;
};

/// Replays a fixed loss table; row t-1 is served at round t.
class ReplayAdversary final : public Adversary {
 public:
  explicit ReplayAdversary(std::vector<std::vector<double>> rows);
  static ReplayAdversary from_csv(const std::filesystem::path& path);

  std::size_t expert_count() const override { return n_; }
  /// Throws DataError once the table is exhausted.
  std::vector<double> losses(std::size_t t, std::span<const ExpertId>,
                             RngStream&) override;
  std::size_t rounds() const noexcept { return rows_.size(); }

 private:
  std::vector<std::vector<double>> rows_;
  std::size_t n_;
};

/// User rule mapping (t, past choices) to the round's losses.
using AdaptiveRule =
    std::function<std::vector<double>(std::size_t t, std::span<const ExpertId> past)>;

class AdaptiveAdversary final : public Adversary {
 public:
  AdaptiveAdversary(std::size_t n, AdaptiveRule rule);
  std::size_t expert_count() const override { return n_; }
  std::vector<double> losses(std::size_t t, std::span<const ExpertId> past,
                             RngStream&) override;

 private:
  std::size_t n_;
  AdaptiveRule rule_;
};

/// Charges 1 to the expert chosen in the previous round and 0 elsewhere;
/// all zeros at t = 1.
AdaptiveRule charge_previous_rule(std::size_t n);

enum class AdversaryKind { FtlKiller, BernoulliIID, UniformIID, Adaptive, Replay };

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::FtlKiller;
  std::vector<double> probs;        // BernoulliIID
  std::size_t n = 2;                // UniformIID, Adaptive
  double low = 0.0;                 // UniformIID
  double high = 1.0;                // UniformIID
  std::filesystem::path path;       // Replay
  std::string rule = "charge-previous";  // Adaptive, by name

  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
  friend bool operator==(const AdversaryConfig&, const AdversaryConfig&) = default;
};

std::string to_string(AdversaryKind k);
/// Accepts "ftl-killer", "bernoulli", "uniform", "adaptive", "replay".
AdversaryKind parse_adversary_kind(const std::string& name);

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config);

/// Asks `adversary` for round t and checks the result: past_choices must
/// have t-1 entries (ConfigError), the width must match (ConfigError) and
/// every value must be finite (DataError).
std::vector<double> generate_losses(Adversary& adversary, std::size_t t,
                                    std::span<const ExpertId> past_choices,
                                    RngStream& rng);

}  // namespace experts
