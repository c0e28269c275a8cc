#include "maxcon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxcon/errors.hpp"

namespace maxcon {

double true_max(std::span<const double> values) {
  if (values.empty()) throw ShapeError("true_max: empty instance");
  return *std::max_element(values.begin(), values.end());
}

double true_max(const ProblemInstance& inst) { return true_max(std::span<const double>(inst.values())); }

double network_mse(const std::vector<std::vector<double>>& estimates, double a_star) {
  if (estimates.empty() || estimates.front().empty()) throw ShapeError("network_mse: no data");
  const std::size_t n_agents = estimates.front().size();
  double total = 0.0;
  for (const auto& row : estimates) {
    if (row.size() != n_agents) throw ShapeError("network_mse: inconsistent agent count");
    for (double x : row) total += (x - a_star) * (x - a_star);
  }
  return total / static_cast<double>(n_agents * estimates.size());
}

RealizationErrors realization_errors(const Trajectory& traj, double a_star) {
  RealizationErrors out;
  out.diverged_at = traj.diverged_at;
  const std::size_t points = traj.num_points();
  out.squared_error_sum.assign(points, 0.0);
  for (std::size_t k = 0; k < points; ++k) {
    if (traj.flagged(k)) {
      out.squared_error_sum[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    for (double x : traj.at(k)) sum += (x - a_star) * (x - a_star);
    out.squared_error_sum[k] = sum;
  }
  return out;
}

MseCurve aggregate_mse(std::span<const RealizationErrors> runs, std::size_t num_agents) {
  if (runs.empty()) throw ShapeError("aggregate_mse: no realizations");
  if (num_agents == 0) throw ShapeError("aggregate_mse: no agents");
  const std::size_t points = runs.front().squared_error_sum.size();
  MseCurve curve;
  curve.realizations = runs.size();
  curve.mse.assign(points, 0.0);
  curve.diverged_count.assign(points, 0);
  for (std::size_t k = 0; k < points; ++k) {
    double sum = 0.0;
    std::size_t live = 0;
    for (const auto& r : runs) {
      if (r.squared_error_sum.size() != points) throw ShapeError("aggregate_mse: ragged curves");
      if (r.diverged_at && k >= *r.diverged_at) {
        ++curve.diverged_count[k];
        continue;
      }
      sum += r.squared_error_sum[k];
      ++live;
    }
    curve.mse[k] = live == 0 ? std::numeric_limits<double>::infinity()
                             : sum / static_cast<double>(num_agents * live);
  }
  return curve;
}

std::size_t default_steady_window(std::size_t iterations) {
  return std::max<std::size_t>(1, iterations / 10);
}

SteadyState steady_state_mse(const MseCurve& curve, std::size_t window) {
  if (window == 0) throw ParameterError("steady_state_mse: window must be >= 1");
  if (window > curve.size()) {
    throw ParameterError("steady_state_mse: window " + std::to_string(window) +
                         " exceeds curve length " + std::to_string(curve.size()));
  }
  SteadyState out;
  out.window = window;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = curve.size() - window; k < curve.size(); ++k) {
    const std::size_t dropped = k < curve.diverged_count.size() ? curve.diverged_count[k] : 0;
    out.excluded_points += dropped;
    if (dropped == curve.realizations && curve.realizations > 0) continue;
    sum += curve.mse[k];
    ++used;
  }
  out.value = used == 0 ? std::numeric_limits<double>::infinity() : sum / static_cast<double>(used);
  return out;
}

ObjectiveReport evaluate_objective(std::span<const double> x, std::span<const double> y,
                                   const ProblemInstance& inst, const Graph& g) {
  const std::size_t n_agents = inst.num_agents();
  if (x.size() != n_agents || y.size() != n_agents || g.num_agents() != n_agents) {
    throw ShapeError("evaluate_objective: dimension mismatch");
  }
  ObjectiveReport rep;
  bool feasible = true;
  double sum = 0.0;
  for (AgentId i = 0; i < n_agents; ++i) {
    sum += x[i];
    if (y[i] < inst.value(i)) feasible = false;
    rep.coupling_residual = std::max(rep.coupling_residual, std::abs(x[i] - y[i]));
  }
  for (const auto& [i, j] : g.edges())
    rep.consensus_residual = std::max(rep.consensus_residual, std::abs(x[i] - x[j]));
  if (feasible) rep.objective = sum / static_cast<double>(n_agents);
  return rep;
}

}  // namespace maxcon
