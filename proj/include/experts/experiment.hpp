#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "experts/adversary.hpp"
#include "experts/analytics.hpp"
#include "experts/perturbation.hpp"

namespace experts {

enum class ExperimentKind { ExpertGame, ShortestPath, EquivalenceVerify, BoundSweep };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

struct EdgeTimeConfig {
  std::string source = "ftl-killer";  // ftl-killer | csv | uniform
  std::filesystem::path path;         // csv
  double low = 0.0;                   // uniform
  double high = 1.0;                  // uniform
  friend bool operator==(const EdgeTimeConfig&, const EdgeTimeConfig&) = default;
};

struct CorpusConfig {
  std::size_t size = 50;
  std::size_t max_n = 6;
  double max_loss = 10.0;
  std::uint64_t seed = 20240601;
  friend bool operator==(const CorpusConfig&, const CorpusConfig&) = default;
};

/// Parsed experiment file. See configs/ for an annotated example of each
/// kind.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ExpertGame;
  std::vector<AlgorithmDescriptor> forecasters;
  AdversaryConfig adversary;
  std::filesystem::path graph;
  PerturbationSpec path_noise = PerturbationSpec::zero(NoiseSign::Add);
  EdgeTimeConfig edge_times;
  std::size_t T = 0;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = "out";
  std::size_t samples = 1'000'000;
  double tolerance = 0.005;
  std::vector<BoundKind> bounds;
  std::vector<double> betas{1.0};
  CorpusConfig corpus;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses YAML (JSON is accepted too, being a subset). Relative file paths
/// are resolved against `base_dir` and checked for existence. Throws
/// ConfigError naming the offending key or line.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Echo of every field; parse_config of its dump yields an equal config.
nlohmann::json config_to_json(const ExperimentConfig& config);

struct RunOverrides {
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::size_t> samples;
};

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides);

struct ExperimentResult {
  /// 0 iff every requested check passed.
  int exit_status = 0;
  nlohmann::json summary;
};

/// Runs the experiment, writes its CSV tables and summary.json under
/// config.out_dir and returns the summary.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct ComparisonRow {
  std::string variant;
  std::string seed;  // decimal seed, or "mean" for the aggregate row
  double expected_cost = 0.0;
  double regret = 0.0;
  std::string bound;  // empty when no bound applies
  double bound_value = 0.0;
  bool bound_satisfied = true;
};

/// One row per (variant, seed) in input order, then one mean row per
/// variant. Each variant is checked against its first applicable bound.
/// Throws ConfigError with fewer than two variants.
std::vector<ComparisonRow> compare_forecasters(const ExperimentConfig& config);

/// Writes the rows of compare_forecasters plus summary.json.
ExperimentResult run_comparison(const ExperimentConfig& config);

}  // namespace experts
