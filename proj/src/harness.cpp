#include "maxcon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>
#include <tuple>

#include "maxcon/errors.hpp"
#include "maxcon/noise.hpp"

namespace maxcon {

namespace {

constexpr std::uint64_t kInitialValuesTag = 0x696e697469616c73ULL;  // "initials"
constexpr std::uint64_t kNoiseTag = 0x6c696e6b6e6f6973ULL;          // "linknois"

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  pool.clear();  // join
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t cell_stream(const SimConfig& cfg, Algorithm algo) {
  return derive_seed({static_cast<std::uint64_t>(algo), std::bit_cast<std::uint64_t>(cfg.sigma2),
                      cfg.window, static_cast<std::uint64_t>(cfg.topology.kind)});
}

}  // namespace

void ExperimentResult::append(ExperimentResult other) {
  configs.insert(configs.end(), std::make_move_iterator(other.configs.begin()),
                 std::make_move_iterator(other.configs.end()));
  cells.insert(cells.end(), std::make_move_iterator(other.cells.begin()),
               std::make_move_iterator(other.cells.end()));
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MAXCON_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ParameterError("MAXCON_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Graph build_topology(const SimConfig& cfg) {
  switch (cfg.topology.kind) {
    case TopologyKind::path:
      return path_graph(cfg.agents);
    case TopologyKind::random:
      return random_connected_graph(cfg.agents, cfg.topology.avg_degree,
                                    cfg.topology.graph_seed.value_or(cfg.seed));
    case TopologyKind::file: {
      Graph g = load_edge_list(cfg.topology.file);
      if (g.num_agents() != cfg.agents) {
        throw ParameterError("config field 'agents': " + std::to_string(cfg.agents) +
                             " does not match the " + std::to_string(g.num_agents()) +
                             " agents in '" + cfg.topology.file + "'");
      }
      return g;
    }
  }
  throw ParameterError("config field 'topology': unsupported kind");
}

std::vector<double> draw_initial_values(std::uint64_t master_seed, std::size_t num_agents,
                                        std::size_t cell) {
  std::mt19937_64 rng(derive_seed({master_seed, kInitialValuesTag, cell}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(num_agents);
  for (double& v : a) v = normal(rng);
  return a;
}

ExperimentResult run_experiment(const SimConfig& cfg, std::size_t threads) {
  cfg.validate();
  const Graph g = build_topology(cfg);
  const EngineOptions options = cfg.engine_options();
  const LinkNoiseModel noise(cfg.sigma2, derive_seed({cfg.seed, kNoiseTag}));
  const std::size_t workers = resolve_threads(threads);
  const ProblemInstance shared(draw_initial_values(cfg.seed, cfg.agents));

  ExperimentResult result;
  result.configs.push_back(cfg);
  for (Algorithm algo : cfg.algorithms) {
    const ProblemInstance inst =
        cfg.redraw_initial ? ProblemInstance(draw_initial_values(cfg.seed, cfg.agents, cell_stream(cfg, algo)))
                           : shared;
    const double a_star = inst.true_max();

    std::vector<RealizationErrors> runs(cfg.realizations);
    parallel_for(cfg.realizations, workers, [&](std::size_t r) {
      LinkChannel channel(g, noise, r);
      runs[r] = realization_errors(run(algo, g, inst, options, channel, cfg.iterations), a_star);
    });

    ResultCell cell;
    cell.curve = aggregate_mse(runs, cfg.agents);
    cell.curve.algorithm = std::string(to_string(algo));
    cell.curve.topology = cfg.topology.label();
    cell.curve.sigma2 = cfg.sigma2;
    cell.curve.window = cfg.window;
    cell.curve.seed = cfg.seed;
    cell.steady = steady_state_mse(cell.curve, default_steady_window(cfg.iterations));
    cell.diverged_realizations = static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r.diverged_at.has_value(); }));
    result.cells.push_back(std::move(cell));
  }
  return result;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig3", "fig4", "fig5", "fig6", "fig7"};
  return names;
}

std::vector<SimConfig> figure_preset(std::string_view name) {
  SimConfig base;
  base.topology.kind = TopologyKind::random;
  base.topology.avg_degree = 4.0;
  base.agents = 20;
  base.rho_y = base.rho_z = 1.0;
  base.iterations = 1000;
  base.realizations = 1000;
  base.algorithms = {Algorithm::rdmc};

  auto sweep = [&](std::size_t window, std::initializer_list<double> variances) {
    std::vector<SimConfig> out;
    for (double s2 : variances) {
      SimConfig c = base;
      c.window = window;
      c.sigma2 = s2;
      out.push_back(c);
    }
    return out;
  };

  if (name == "fig3") {
    SimConfig c = base;
    c.sigma2 = 0.1;
    c.window = 3;
    c.algorithms = {Algorithm::naive, Algorithm::dmc, Algorithm::rdmc};
    return {c};
  }
  if (name == "fig4") return sweep(1, {0.0001, 0.01, 0.1});
  if (name == "fig5") return sweep(2, {0.001, 0.01, 0.1});
  if (name == "fig6") return sweep(3, {0.001, 0.01, 0.1});
  if (name == "fig7") {
    SimConfig random = base;
    random.window = 3;
    random.sigma2 = 0.1;
    SimConfig path = random;
    path.topology.kind = TopologyKind::path;
    return {random, path};
  }
  throw ParameterError("unknown preset '" + std::string(name) + "' (expected fig3..fig7)");
}

ExperimentResult run_configs(const std::vector<SimConfig>& configs, std::size_t threads) {
  ExperimentResult all;
  for (const auto& cfg : configs) all.append(run_experiment(cfg, threads));
  return all;
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  std::vector<const ResultCell*> order;
  for (const auto& c : result.cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const ResultCell* a, const ResultCell* b) {
    return std::tie(a->curve.algorithm, a->curve.topology, a->curve.sigma2, a->curve.window) <
           std::tie(b->curve.algorithm, b->curve.topology, b->curve.sigma2, b->curve.window);
  });

  out << "iteration,algorithm,topology,sigma2,window,mse,diverged_count\n";
  for (const ResultCell* cell : order) {
    const auto& c = cell->curve;
    const std::string prefix =
        "," + c.algorithm + "," + c.topology + "," + format_double(c.sigma2) + "," + std::to_string(c.window) + ",";
    for (std::size_t k = 0; k < c.size(); ++k)
      out << k << prefix << format_double(c.mse[k]) << ',' << c.diverged_count[k] << '\n';
  }
}

void write_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(result, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_summary(const ExperimentResult& result, std::ostream& out) {
  out << std::left << std::setw(7) << "algo" << std::setw(8) << "topo" << std::setw(10) << "sigma2"
      << std::setw(7) << "window" << std::setw(16) << "steady_mse" << std::setw(10) << "excluded"
      << "diverged_runs\n";
  for (const auto& cell : result.cells) {
    const auto& c = cell.curve;
    out << std::left << std::setw(7) << c.algorithm << std::setw(8) << c.topology << std::setw(10)
        << c.sigma2 << std::setw(7) << c.window << std::setw(16) << std::setprecision(6)
        << cell.steady.value << std::setw(10) << cell.steady.excluded_points
        << cell.diverged_realizations << '/' << c.realizations << '\n';
  }
}

}  // namespace maxcon
