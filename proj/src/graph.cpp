#include "maxcon/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "maxcon/errors.hpp"

namespace maxcon {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::vector<std::vector<AgentId>> adjacency_lists(std::size_t n,
                                                  const std::vector<Edge>& edges) {
  std::vector<std::vector<AgentId>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

}  // namespace

Graph::Graph(std::size_t num_agents, std::vector<Edge> edges)
    : num_agents_(num_agents), edges_(std::move(edges)) {
  if (num_agents_ == 0) throw ParameterError("graph: number of agents must be >= 1");
  for (auto& e : edges_) {
    if (e.first >= num_agents_ || e.second >= num_agents_) {
      throw ParameterError("graph: edge (" + std::to_string(e.first) + "," +
                           std::to_string(e.second) + ") references an agent >= " +
                           std::to_string(num_agents_));
    }
    if (e.first == e.second) {
      throw ParameterError("graph: self-loop at agent " + std::to_string(e.first));
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw ParameterError("graph: duplicate edge (" + std::to_string(dup->first) + "," +
                         std::to_string(dup->second) + ")");
  }
  if (!is_connected(num_agents_, edges_)) {
    throw DisconnectedGraphError("graph: topology is not connected (infinite diameter)");
  }

  auto adj = adjacency_lists(num_agents_, edges_);
  offsets_.assign(num_agents_ + 1, 0);
  adjacency_.reserve(2 * edges_.size());
  for (AgentId i = 0; i < num_agents_; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adjacency_.insert(adjacency_.end(), adj[i].begin(), adj[i].end());
    offsets_[i + 1] = adjacency_.size();
  }
}

std::span<const AgentId> Graph::neighbors(AgentId i) const {
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(num_agents_);
  for (AgentId i = 0; i < num_agents_; ++i) d[i] = degree(i);
  return d;
}

double Graph::average_degree() const {
  return 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(num_agents_);
}

bool Graph::adjacent(AgentId i, AgentId j) const {
  if (i >= num_agents_ || j >= num_agents_) return false;
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::size_t Graph::link_index(AgentId sender, AgentId receiver) const {
  if (receiver >= num_agents_) throw ParameterError("graph: receiver out of range");
  auto nb = neighbors(receiver);
  auto it = std::lower_bound(nb.begin(), nb.end(), sender);
  if (it == nb.end() || *it != sender) {
    throw ParameterError("graph: no link " + std::to_string(sender) + " -> " +
                         std::to_string(receiver));
  }
  return offsets_[receiver] + static_cast<std::size_t>(it - nb.begin());
}

bool is_connected(std::size_t num_agents, const std::vector<Edge>& edges) {
  if (num_agents == 0) return false;
  auto adj = adjacency_lists(num_agents, edges);
  std::vector<bool> seen(num_agents, false);
  std::vector<AgentId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    AgentId v = stack.back();
    stack.pop_back();
    for (AgentId w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == num_agents;
}

Graph path_graph(std::size_t num_agents) {
  if (num_agents == 0) throw ParameterError("path_graph: number of agents must be >= 1");
  std::vector<Edge> edges;
  for (AgentId i = 0; i + 1 < num_agents; ++i) edges.emplace_back(i, i + 1);
  return Graph(num_agents, std::move(edges));
}

Graph complete_graph(std::size_t num_agents) {
  if (num_agents == 0) throw ParameterError("complete_graph: number of agents must be >= 1");
  std::vector<Edge> edges;
  for (AgentId i = 0; i < num_agents; ++i)
    for (AgentId j = i + 1; j < num_agents; ++j) edges.emplace_back(i, j);
  return Graph(num_agents, std::move(edges));
}

Graph random_connected_graph(std::size_t num_agents, double target_avg_degree,
                             std::uint64_t seed) {
  if (num_agents < 2) {
    throw ParameterError("random_connected_graph: need at least 2 agents");
  }
  const double n = static_cast<double>(num_agents);
  const double lo = 2.0 * (n - 1.0) / n;
  const double hi = n - 1.0;
  if (!(target_avg_degree >= lo && target_avg_degree <= hi)) {
    std::ostringstream msg;
    msg << "random_connected_graph: target average degree " << target_avg_degree
        << " outside [" << lo << ", " << hi << "] for " << num_agents << " agents";
    throw ParameterError(msg.str());
  }
  const double p = std::min(1.0, target_avg_degree / hi);

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (int attempt = 0; attempt < kGraphRetryBudget; ++attempt) {
    std::vector<Edge> edges;
    for (AgentId i = 0; i < num_agents; ++i)
      for (AgentId j = i + 1; j < num_agents; ++j)
        if (coin(rng)) edges.emplace_back(i, j);
    if (is_connected(num_agents, edges)) return Graph(num_agents, std::move(edges));
  }
  throw GenerationError("random_connected_graph: no connected draw after " +
                        std::to_string(kGraphRetryBudget) + " attempts");
}

std::vector<std::size_t> bfs_distances(const Graph& g, AgentId source) {
  std::vector<std::size_t> dist(g.num_agents(), kUnreached);
  std::queue<AgentId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    AgentId v = frontier.front();
    frontier.pop();
    for (AgentId w : g.neighbors(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

std::size_t eccentricity(const Graph& g, AgentId source) {
  auto dist = bfs_distances(g, source);
  std::size_t ecc = *std::max_element(dist.begin(), dist.end());
  if (ecc == kUnreached) throw DisconnectedGraphError("eccentricity: graph is disconnected");
  return ecc;
}

std::size_t diameter(const Graph& g) {
  std::size_t best = 0;
  for (AgentId v = 0; v < g.num_agents(); ++v) best = std::max(best, eccentricity(g, v));
  return best;
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.num_agents() << ' ' << g.num_edges() << '\n';
  for (const auto& [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw IoError("edge list: missing \"J E\" header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    long long a = 0;
    long long b = 0;
    if (!(in >> a >> b)) {
      throw IoError("edge list: expected " + std::to_string(m) + " edges, got " +
                    std::to_string(k));
    }
    if (a < 0 || b < 0) throw IoError("edge list: negative agent id");
    if (a >= b) {
      throw IoError("edge list: edge " + std::to_string(k) + " must satisfy i < j");
    }
    edges.emplace_back(static_cast<AgentId>(a), static_cast<AgentId>(b));
  }
  std::string trailing;
  if (in >> trailing) throw IoError("edge list: trailing data after " + std::to_string(m) + " edges");
  return Graph(n, std::move(edges));
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_edge_list(g, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_edge_list(in);
}

}  // namespace maxcon
