#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace maxcon {

using AgentId = std::size_t;
using Edge = std::pair<AgentId, AgentId>;

/// Undirected simple connected communication graph over agents 0..J-1.
///
/// Immutable once built. Every constructor validates simplicity, symmetry and
/// connectivity, so any Graph value in hand satisfies all of them.
class Graph {
 public:
  /// Builds from an edge list. Edges may be given in either orientation; they
  /// are normalized to (lo, hi) and sorted. Throws ParameterError on
  /// self-loops, duplicates or out-of-range ids, DisconnectedGraphError if the
  /// result is not connected.
  Graph(std::size_t num_agents, std::vector<Edge> edges);

  std::size_t num_agents() const { return num_agents_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_directed_links() const { return 2 * edges_.size(); }

  /// Sorted (lo, hi) pairs.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Sorted neighbor ids of agent i, never containing i.
  std::span<const AgentId> neighbors(AgentId i) const;
  std::size_t degree(AgentId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::vector<std::size_t> degrees() const;
  double average_degree() const;

  bool adjacent(AgentId i, AgentId j) const;

  /// Dense index of the directed link sender -> receiver in [0, 2E).
  /// Throws ParameterError if the two agents are not neighbors.
  std::size_t link_index(AgentId sender, AgentId receiver) const;

  bool operator==(const Graph& other) const {
    return num_agents_ == other.num_agents_ && edges_ == other.edges_;
  }

 private:
  std::size_t num_agents_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;    // CSR row offsets, size J+1
  std::vector<AgentId> adjacency_;      // CSR column ids, size 2E
};

/// True if breadth-first search from agent 0 reaches every agent.
bool is_connected(std::size_t num_agents, const std::vector<Edge>& edges);

/// Line topology 0 - 1 - ... - (J-1).
Graph path_graph(std::size_t num_agents);

Graph complete_graph(std::size_t num_agents);

inline constexpr int kGraphRetryBudget = 1000;

/// Erdos-Renyi G(J, p) with p = target_avg_degree / (J-1), redrawn until
/// connected. Deterministic for a fixed seed.
Graph random_connected_graph(std::size_t num_agents, double target_avg_degree,
                             std::uint64_t seed);

/// Hop distances from `source`; unreachable agents get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const Graph& g, AgentId source);
std::size_t eccentricity(const Graph& g, AgentId source);
std::size_t diameter(const Graph& g);

// Edge-list text format: "J E" then E lines "i j" with i < j, 0-based.
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);
void save_edge_list(const Graph& g, const std::string& path);
Graph load_edge_list(const std::string& path);

}  // namespace maxcon
