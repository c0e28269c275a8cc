#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxcon/consensus.hpp"
#include "maxcon/graph.hpp"

namespace maxcon {

/// Exact maximum; throws ShapeError when empty.
double true_max(std::span<const double> values);
double true_max(const ProblemInstance& inst);

/// (1/(J R)) sum_r sum_i (x_i^(r) - a*)^2 at a single iteration.
/// `estimates[r]` holds the J agent estimates of realization r.
double network_mse(const std::vector<std::vector<double>>& estimates, double a_star);

/// Network-wide MSE per iteration, averaged over realizations.
///
/// At iteration k only realizations not yet flagged as diverged contribute;
/// diverged_count[k] says how many were dropped. An iteration with no live
/// realization has MSE = +inf.
struct MseCurve {
  std::vector<double> mse;
  std::vector<std::size_t> diverged_count;
  std::size_t realizations = 0;

  std::string algorithm;
  std::string topology;
  double sigma2 = 0.0;
  std::size_t window = 1;
  std::uint64_t seed = 0;

  std::size_t size() const { return mse.size(); }
};

/// Per-iteration sum over agents of (x_i - a*)^2 for one realization.
struct RealizationErrors {
  std::vector<double> squared_error_sum;
  std::optional<std::size_t> diverged_at;
};

RealizationErrors realization_errors(const Trajectory& traj, double a_star);

/// Fixed-order reduction over realization index; the result depends only on
/// the contents of `runs`, not on how they were produced.
MseCurve aggregate_mse(std::span<const RealizationErrors> runs, std::size_t num_agents);

struct SteadyState {
  double value = 0.0;
  std::size_t window = 0;
  /// (realization, iteration) points inside the window that were flagged.
  std::size_t excluded_points = 0;
  bool diverged() const { return excluded_points > 0; }
};

/// 10% of the iteration count, at least 1.
std::size_t default_steady_window(std::size_t iterations);

/// Mean of the last `window` MSE values, skipping iterations with no live
/// realization. Throws ParameterError for window 0 or window > curve length.
SteadyState steady_state_mse(const MseCurve& curve, std::size_t window);

/// Objective (1/J) sum x_i + (1/J) sum I_{a_i}(y_i) of the max-consensus
/// reformulation, together with its constraint residuals.
struct ObjectiveReport {
  std::optional<double> objective;  ///< empty when some y_i < a_i
  double consensus_residual = 0.0;  ///< max over edges |x_i - x_j|
  double coupling_residual = 0.0;   ///< max_i |x_i - y_i|

  bool feasible() const { return objective.has_value(); }
};

ObjectiveReport evaluate_objective(std::span<const double> x, std::span<const double> y,
                                   const ProblemInstance& inst, const Graph& g);

}  // namespace maxcon
