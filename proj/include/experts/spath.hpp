#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "experts/perturbation.hpp"
#include "experts/rng.hpp"

namespace experts {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed multigraph with a fixed source/sink pair and a running total
/// cost per edge. Edge ids are positions in edges().
class EdgeGraph {
 public:
  /// Throws GraphError if source == sink, an endpoint is out of range, or
  /// the sink is unreachable; DataError on a non-finite initial cost.
  EdgeGraph(std::size_t node_count, std::vector<Edge> edges, std::size_t source,
            std::size_t sink, std::vector<double> initial_costs = {});

  /// Edge-list text:
  ///
  ///   # comment
  ///   s <node>
  ///   t <node>
  ///   <from> <to> [initial_cost]
  ///
  /// The "s" and "t" lines come first; every later line is an edge. Node
  /// names are arbitrary tokens, numbered in order of first appearance.
  static EdgeGraph parse(std::istream& in);
  static EdgeGraph from_file(const std::filesystem::path& path);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t source() const noexcept { return source_; }
  std::size_t sink() const noexcept { return sink_; }
  /// Outgoing edge ids of v in increasing order.
  std::span<const std::size_t> out_edges(std::size_t v) const { return out_.at(v); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::span<const double> cumulative() const noexcept { return cumulative_; }
  void set_cumulative(std::vector<double> costs);
  /// Adds one round of revealed edge times. Throws DataError on a negative
  /// or non-finite time or a width mismatch.
  void add_times(std::span<const double> times);

  bool is_acyclic() const;
  /// Topological order of all nodes; empty if the graph has a cycle.
  std::vector<std::size_t> topological_order() const;

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  std::size_t source_;
  std::size_t sink_;
  std::vector<double> cumulative_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::string> labels_;
};

struct PathChoice {
  std::vector<std::size_t> edges;  // ids, chained from source to sink
  double weight = 0.0;             // total under the weights used to pick it
  friend bool operator==(const PathChoice&, const PathChoice&) = default;
};

/// Minimum-weight simple source→sink path under `weights`, ties broken by
/// the lexicographically smallest edge-id sequence.
///
/// Acyclic graphs are solved by relaxation in reverse topological order and
/// accept any finite weights. Graphs with cycles use Dijkstra and require
/// nonnegative weights (ConfigError otherwise).
PathChoice shortest_path(const EdgeGraph& g, std::span<const double> weights);

/// One follow-the-perturbed-leader decision: draws a noise value per edge
/// (in id order) and returns shortest_path under cumulative + noise.
///
/// spec.sign must be Add. Nonnegative families use Dijkstra; Gumbel noise
/// is signed and requires an acyclic graph (ConfigError otherwise).
PathChoice perturbed_shortest_path(const EdgeGraph& g, const PerturbationSpec& spec,
                                   RngStream& rng);

inline constexpr std::size_t kPathEnumerationLimit = 1'000'000;

/// Enumerates every simple source→sink path and returns the cheapest under
/// the cumulative costs, ties to the lexicographically smallest edge ids.
/// Throws CapacityError once more than `limit` paths have been seen.
PathChoice brute_force_best_path(const EdgeGraph& g,
                                 std::size_t limit = kPathEnumerationLimit);

/// Produces the revealed edge times of round t (1-based).
using EdgeTimeSource = std::function<std::vector<double>(std::size_t t, RngStream& rng)>;

EdgeTimeSource table_time_source(std::vector<std::vector<double>> rows);
/// The two-expert FTL-killer sequence with edge i carrying expert i's loss.
EdgeTimeSource ftl_killer_time_source();
EdgeTimeSource uniform_time_source(std::size_t edges, double low, double high);

struct PathRound {
  std::size_t t = 0;
  std::vector<std::size_t> path;
  double paid = 0.0;
  std::vector<double> times;
};

struct PathGameReport {
  double total_paid = 0.0;
  PathChoice best_path;  // weight = its total revealed time
  double regret = 0.0;
  /// Paid so far minus the best fixed path of that prefix, per round.
  std::vector<double> regret_trajectory;
  std::vector<PathRound> rounds;
  /// "brute-force", or "structured" if enumeration exceeded its guard.
  std::string best_path_oracle;
};

/// Plays T rounds on a copy of `g`: pick a path with perturbed_shortest_path
/// on the current totals (noise from rng.substream(t, Purpose::Noise)), pay
/// the sum of the round's revealed times along it, then add the times to
/// every edge's total. Regret is measured against the best fixed path for
/// the revealed times.
PathGameReport run_online_path_game(const EdgeGraph& g, const PerturbationSpec& spec,
                                    const EdgeTimeSource& source, std::size_t T,
                                    const RngStream& rng);

void write_path_rounds_csv(std::ostream& out, const PathGameReport& report);
nlohmann::json to_json(const PathGameReport& report);

}  // namespace experts
