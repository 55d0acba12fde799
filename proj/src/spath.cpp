#include "experts/spath.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "experts/adversary.hpp"
#include "experts/error.hpp"

namespace experts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool sink_reachable(std::size_t nodes, std::span<const Edge> edges, std::size_t s,
                    std::size_t t) {
  std::vector<std::vector<std::size_t>> adj(nodes);
  for (const auto& e : edges) adj[e.from].push_back(e.to);
  std::vector<char> seen(nodes, 0);
  std::vector<std::size_t> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (v == t) return true;
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return false;
}

void check_weights(const EdgeGraph& g, std::span<const double> w) {
  if (w.size() != g.edge_count()) {
    throw DomainError(fmt::format("expected {} edge weights, got {}", g.edge_count(), w.size()));
  }
  for (double x : w)
    if (!std::isfinite(x)) throw DataError("edge weights must be finite");
}

/// Distance from every node to the sink, by Dijkstra on reversed edges.
std::vector<double> dijkstra_to_sink(const EdgeGraph& g, std::span<const double> w) {
  std::vector<std::vector<std::size_t>> in(g.node_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) in[g.edges()[e].to].push_back(e);

  std::vector<double> dist(g.node_count(), kInf);
  std::vector<char> done(g.node_count(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[g.sink()] = 0.0;
  pq.emplace(0.0, g.sink());
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (auto e : in[v]) {
      const auto u = g.edges()[e].from;
      const double cand = w[e] + dist[v];
      if (cand < dist[u]) {
        dist[u] = cand;
        pq.emplace(cand, u);
      }
    }
  }
  return dist;
}

/// Distance from every node to the sink by relaxation in reverse
/// topological order; any finite weights.
std::vector<double> dag_to_sink(const EdgeGraph& g, std::span<const double> w) {
  const auto order = g.topological_order();
  if (order.empty()) throw ConfigError("graph has a cycle");
  std::vector<double> dist(g.node_count(), kInf);
  dist[g.sink()] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto u = *it;
    if (u == g.sink()) continue;
    for (auto e : g.out_edges(u)) {
      const auto v = g.edges()[e].to;
      if (dist[v] == kInf) continue;
      const double cand = w[e] + dist[v];
      if (cand < dist[u]) dist[u] = cand;
    }
  }
  return dist;
}

/// Lexicographically smallest simple path made of edges on which the
/// distance labels are tight.
bool tight_path(const EdgeGraph& g, std::span<const double> w,
                const std::vector<double>& dist, std::size_t u,
                std::vector<char>& on_path, std::vector<std::size_t>& path) {
  if (u == g.sink()) return true;
  for (auto e : g.out_edges(u)) {
    const auto v = g.edges()[e].to;
    if (on_path[v] || dist[v] == kInf || w[e] + dist[v] != dist[u]) continue;
    on_path[v] = 1;
    path.push_back(e);
    if (tight_path(g, w, dist, v, on_path, path)) return true;
    path.pop_back();
    on_path[v] = 0;
  }
  return false;
}

PathChoice extract_path(const EdgeGraph& g, std::span<const double> w,
                        const std::vector<double>& dist) {
  if (dist[g.source()] == kInf) throw GraphError("no source-sink path");
  PathChoice out;
  std::vector<char> on_path(g.node_count(), 0);
  on_path[g.source()] = 1;
  if (!tight_path(g, w, dist, g.source(), on_path, out.edges)) {
    throw GraphError("shortest path extraction failed");
  }
  out.weight = dist[g.source()];
  return out;
}

}  // namespace

EdgeGraph::EdgeGraph(std::size_t node_count, std::vector<Edge> edges,
                     std::size_t source, std::size_t sink,
                     std::vector<double> initial_costs)
    : node_count_(node_count),
      edges_(std::move(edges)),
      source_(source),
      sink_(sink),
      cumulative_(std::move(initial_costs)),
      out_(node_count) {
  if (source_ >= node_count_ || sink_ >= node_count_)
    throw GraphError("source or sink out of range");
  if (source_ == sink_) throw GraphError("source and sink must differ");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].from >= node_count_ || edges_[e].to >= node_count_)
      throw GraphError(fmt::format("edge {} has an endpoint out of range", e));
    out_[edges_[e].from].push_back(e);
  }
  if (cumulative_.empty()) cumulative_.assign(edges_.size(), 0.0);
  if (cumulative_.size() != edges_.size())
    throw DataError(fmt::format("expected {} edge costs, got {}", edges_.size(),
                                cumulative_.size()));
  for (double c : cumulative_)
    if (!std::isfinite(c)) throw DataError("edge costs must be finite");
  if (!sink_reachable(node_count_, edges_, source_, sink_))
    throw GraphError("no path from source to sink");
  labels_.resize(node_count_);
  for (std::size_t v = 0; v < node_count_; ++v) labels_[v] = std::to_string(v);
}

EdgeGraph EdgeGraph::parse(std::istream& in) {
  std::map<std::string, std::size_t> ids;
  std::vector<std::string> labels;
  auto node = [&](const std::string& name) {
    auto [it, inserted] = ids.emplace(name, labels.size());
    if (inserted) labels.push_back(name);
    return it->second;
  };

  std::optional<std::size_t> s, t;
  std::vector<Edge> edges;
  std::vector<double> costs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string w; ss >> w;) tok.push_back(w);
    if (tok.empty()) continue;

    const bool header_phase = !(s && t) && edges.empty();
    if (header_phase && tok.size() == 2 && (tok[0] == "s" || tok[0] == "t")) {
      (tok[0] == "s" ? s : t) = node(tok[1]);
      continue;
    }
    if (!(s && t)) {
      throw GraphError(fmt::format("line {}: 's <node>' and 't <node>' must precede edges",
                                   line_no));
    }
    if (tok.size() != 2 && tok.size() != 3) {
      throw GraphError(fmt::format("line {}: expected '<from> <to> [cost]'", line_no));
    }
    double cost = 0.0;
    if (tok.size() == 3) {
      try {
        std::size_t used = 0;
        cost = std::stod(tok[2], &used);
        if (used != tok[2].size()) throw std::invalid_argument(tok[2]);
      } catch (const std::exception&) {
        throw GraphError(fmt::format("line {}: bad cost '{}'", line_no, tok[2]));
      }
    }
    edges.push_back({node(tok[0]), node(tok[1])});
    costs.push_back(cost);
  }
  if (!s || !t) throw GraphError("graph file needs 's <node>' and 't <node>' lines");
  EdgeGraph g(labels.size(), std::move(edges), *s, *t, std::move(costs));
  g.labels_ = std::move(labels);
  return g;
}

EdgeGraph EdgeGraph::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError(fmt::format("cannot open graph file '{}'", path.string()));
  return parse(in);
}

void EdgeGraph::set_cumulative(std::vector<double> costs) {
  if (costs.size() != edges_.size())
    throw DataError(fmt::format("expected {} edge costs, got {}", edges_.size(), costs.size()));
  for (double c : costs)
    if (!std::isfinite(c)) throw DataError("edge costs must be finite");
  cumulative_ = std::move(costs);
}

void EdgeGraph::add_times(std::span<const double> times) {
  if (times.size() != edges_.size())
    throw DataError(fmt::format("expected {} edge times, got {}", edges_.size(), times.size()));
  for (std::size_t e = 0; e < times.size(); ++e) {
    if (!std::isfinite(times[e]) || times[e] < 0.0)
      throw DataError(fmt::format("edge {}: revealed time {} is not a finite nonnegative value",
                                  e, times[e]));
  }
  for (std::size_t e = 0; e < times.size(); ++e) cumulative_[e] += times[e];
}

std::vector<std::size_t> EdgeGraph::topological_order() const {
  std::vector<std::size_t> indeg(node_count_, 0);
  for (const auto& e : edges_) ++indeg[e.to];
  std::vector<std::size_t> order, ready;
  for (std::size_t v = 0; v < node_count_; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    const auto v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (auto e : out_[v])
      if (--indeg[edges_[e].to] == 0) ready.push_back(edges_[e].to);
  }
  if (order.size() != node_count_) return {};
  return order;
}

bool EdgeGraph::is_acyclic() const { return !topological_order().empty(); }

PathChoice shortest_path(const EdgeGraph& g, std::span<const double> weights) {
  check_weights(g, weights);
  if (g.is_acyclic()) return extract_path(g, weights, dag_to_sink(g, weights));
  if (std::any_of(weights.begin(), weights.end(), [](double x) { return x < 0.0; }))
    throw ConfigError("negative edge weight on a graph with cycles");
  return extract_path(g, weights, dijkstra_to_sink(g, weights));
}

PathChoice perturbed_shortest_path(const EdgeGraph& g, const PerturbationSpec& spec,
                                   RngStream& rng) {
  spec.validate();
  if (spec.sign != NoiseSign::Add)
    throw ConfigError("path perturbation must use the additive convention");
  const bool signed_noise = !spec.nonnegative();
  if (signed_noise && !g.is_acyclic())
    throw ConfigError("gumbel noise on a graph with cycles: negative cycles cannot be excluded");

  const auto cum = g.cumulative();
  std::vector<double> w(cum.size());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = cum[e] + sample(spec, rng);

  if (signed_noise) return extract_path(g, w, dag_to_sink(g, w));
  if (std::any_of(w.begin(), w.end(), [](double x) { return x < 0.0; })) {
    // Only reachable with negative initial costs.
    if (!g.is_acyclic()) throw ConfigError("negative edge weight on a graph with cycles");
    return extract_path(g, w, dag_to_sink(g, w));
  }
  return extract_path(g, w, dijkstra_to_sink(g, w));
}

PathChoice brute_force_best_path(const EdgeGraph& g, std::size_t limit) {
  const auto cost = g.cumulative();
  PathChoice best;
  best.weight = kInf;
  bool found = false;
  std::size_t seen = 0;
  std::vector<char> on_path(g.node_count(), 0);
  std::vector<std::size_t> path;

  auto visit = [&](auto&& self, std::size_t u, double total) -> void {
    if (u == g.sink()) {
      if (++seen > limit) {
        throw CapacityError(fmt::format(
            "more than {} simple paths; use the structured shortest-path oracle", limit));
      }
      if (!found || total < best.weight) {
        best.edges = path;
        best.weight = total;
        found = true;
      }
      return;
    }
    for (auto e : g.out_edges(u)) {
      const auto v = g.edges()[e].to;
      if (on_path[v]) continue;
      on_path[v] = 1;
      path.push_back(e);
      self(self, v, total + cost[e]);
      path.pop_back();
      on_path[v] = 0;
    }
  };
  on_path[g.source()] = 1;
  visit(visit, g.source(), 0.0);
  if (!found) throw GraphError("no source-sink path");
  return best;
}

EdgeTimeSource table_time_source(std::vector<std::vector<double>> rows) {
  return [rows = std::move(rows)](std::size_t t, RngStream&) {
    if (t == 0 || t > rows.size()) {
      throw DataError(fmt::format("edge-time table exhausted at round {} ({} rounds)", t,
                                  rows.size()));
    }
    return rows[t - 1];
  };
}

EdgeTimeSource ftl_killer_time_source() {
  return [](std::size_t t, RngStream&) { return ftl_killer_losses(t, 2); };
}

EdgeTimeSource uniform_time_source(std::size_t edges, double low, double high) {
  if (!(low >= 0.0) || !(high >= low) || !std::isfinite(high))
    throw ConfigError("uniform edge times need 0 <= low <= high < inf");
  return [=](std::size_t, RngStream& rng) {
    std::vector<double> out(edges);
    for (double& x : out) x = low + (high - low) * rng.uniform01();
    return out;
  };
}

PathGameReport run_online_path_game(const EdgeGraph& g, const PerturbationSpec& spec,
                                    const EdgeTimeSource& source, std::size_t T,
                                    const RngStream& rng) {
  if (T == 0) throw ConfigError("run_online_path_game: T must be at least 1");
  EdgeGraph play = g;
  EdgeGraph revealed = g;
  revealed.set_cumulative(std::vector<double>(g.edge_count(), 0.0));

  PathGameReport rep;
  rep.rounds.reserve(T);
  rep.regret_trajectory.reserve(T);
  for (std::size_t t = 1; t <= T; ++t) {
    RngStream noise_rng = rng.substream(t, Purpose::Noise);
    PathChoice choice = perturbed_shortest_path(play, spec, noise_rng);

    RngStream time_rng = rng.substream(t, Purpose::Adversary);
    std::vector<double> times = source(t, time_rng);
    if (times.size() != g.edge_count())
      throw DataError(fmt::format("round {}: expected {} edge times, got {}", t,
                                  g.edge_count(), times.size()));
    for (std::size_t e = 0; e < times.size(); ++e) {
      if (!std::isfinite(times[e]) || times[e] < 0.0)
        throw DataError(fmt::format("round {}: edge {} revealed invalid time {}", t, e,
                                    times[e]));
    }

    double paid = 0.0;
    for (auto e : choice.edges) paid += times[e];
    rep.total_paid += paid;
    play.add_times(times);
    revealed.add_times(times);

    const double best_prefix = shortest_path(revealed, revealed.cumulative()).weight;
    rep.regret_trajectory.push_back(rep.total_paid - best_prefix);
    rep.rounds.push_back({t, std::move(choice.edges), paid, std::move(times)});
  }

  try {
    rep.best_path = brute_force_best_path(revealed);
    rep.best_path_oracle = "brute-force";
  } catch (const CapacityError&) {
    rep.best_path = shortest_path(revealed, revealed.cumulative());
    rep.best_path_oracle = "structured";
  }
  rep.regret = rep.total_paid - rep.best_path.weight;
  return rep;
}

void write_path_rounds_csv(std::ostream& out, const PathGameReport& report) {
  const std::size_t m = report.rounds.empty() ? 0 : report.rounds.front().times.size();
  std::string header = "t,paid,path";
  for (std::size_t e = 0; e < m; ++e) header += fmt::format(",loss_{}", e);
  out << header << '\n';
  for (const auto& r : report.rounds) {
    std::string line = fmt::format("{},{},{}", r.t, r.paid, fmt::join(r.path, ";"));
    for (double x : r.times) line += fmt::format(",{}", x);
    out << line << '\n';
  }
}

nlohmann::json to_json(const PathGameReport& r) {
  return {{"total_paid", r.total_paid},
          {"best_path", r.best_path.edges},
          {"best_path_cost", r.best_path.weight},
          {"best_path_oracle", r.best_path_oracle},
          {"regret", r.regret},
          {"regret_trajectory", r.regret_trajectory}};
}

}  // namespace experts
