#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "maxcon/config.hpp"
#include "maxcon/graph.hpp"
#include "maxcon/metrics.hpp"

namespace maxcon {

struct ResultCell {
  MseCurve curve;
  SteadyState steady;
  /// Realizations that hit the divergence guard at some iteration.
  std::size_t diverged_realizations = 0;
};

struct ExperimentResult {
  std::vector<SimConfig> configs;  ///< config echo, one per run_experiment call merged in
  std::vector<ResultCell> cells;

  void append(ExperimentResult other);
};

/// Worker count: `requested` if non-zero, else $MAXCON_THREADS, else the
/// hardware concurrency. Never less than 1.
std::size_t resolve_threads(std::size_t requested = 0);

/// Builds the topology named by the config (the random graph seed defaults to
/// the master seed).
Graph build_topology(const SimConfig& cfg);

/// a_i ~ N(0,1), drawn from the master seed. `cell` selects an independent
/// draw when per-cell redraw is enabled; the shared draw uses cell = 0.
std::vector<double> draw_initial_values(std::uint64_t master_seed, std::size_t num_agents,
                                        std::size_t cell = 0);

/// Runs every algorithm of `cfg` over R noise realizations and aggregates the
/// MSE curves. Realizations may run on several threads; results are reduced in
/// realization order so they do not depend on the thread count.
ExperimentResult run_experiment(const SimConfig& cfg, std::size_t threads = 0);

/// Experimental conditions of the figures: fig3 (algorithm comparison),
/// fig4/fig5/fig6 (RD-MC with C = 1/2/3 over three variances) and fig7
/// (random vs path topology). Defaults: J = 20, K = 1000, R = 1000, rho = 1.
std::vector<SimConfig> figure_preset(std::string_view name);
const std::vector<std::string>& preset_names();

/// Runs all configs of a preset and merges the results.
ExperimentResult run_configs(const std::vector<SimConfig>& configs, std::size_t threads = 0);

/// Long-format CSV:
///   iteration,algorithm,topology,sigma2,window,mse,diverged_count
/// sorted by (algorithm, topology, sigma2, window, iteration), reals printed
/// with 17 significant digits.
void write_csv(const ExperimentResult& result, std::ostream& out);
void write_csv(const ExperimentResult& result, const std::string& path);

/// Human-readable per-cell steady-state summary.
void write_summary(const ExperimentResult& result, std::ostream& out);

}  // namespace maxcon
