#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "maxcon/graph.hpp"
#include "maxcon/noise.hpp"

namespace maxcon {

/// Initial values a_i held by the agents, plus their maximum a*.
class ProblemInstance {
 public:
  explicit ProblemInstance(std::vector<double> initial_values);

  std::size_t num_agents() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double value(AgentId i) const { return values_[i]; }
  double true_max() const { return max_; }

 private:
  std::vector<double> values_;
  double max_;
};

/// ADMM penalty parameters rho_y, rho_z (both > 0).
struct PenaltyParams {
  double rho_y = 1.0;
  double rho_z = 1.0;

  void validate() const;
  /// n_i = 1 / (rho_y + 2 rho_z d_i)
  double step_scale(std::size_t degree) const { return 1.0 / (rho_y + 2.0 * rho_z * static_cast<double>(degree)); }
};

/// Convex weights alpha_0..alpha_{C-1} of the sliding x-average; alpha_0
/// multiplies the newest estimate.
class WindowWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Throws ParameterError if empty, if any weight is negative, or if the
  /// weights do not sum to 1 within kSumTolerance.
  explicit WindowWeights(std::vector<double> alpha);
  /// alpha_l = 1/C.
  static WindowWeights uniform(std::size_t window);

  std::size_t size() const { return alpha_.size(); }
  double operator[](std::size_t lag) const { return alpha_[lag]; }
  const std::vector<double>& values() const { return alpha_; }

 private:
  std::vector<double> alpha_;
};

/// Last `depth` estimates of every agent; lag 0 is the newest. Slots that were
/// never written read as 0, i.e. x(m) = 0 for m < 0.
class HistoryWindow {
 public:
  HistoryWindow(std::size_t depth, std::size_t num_agents);

  void push(std::span<const double> row);
  double at(std::size_t lag, AgentId i) const;
  std::size_t depth() const { return depth_; }
  std::size_t num_agents() const { return num_agents_; }

 private:
  std::size_t depth_;
  std::size_t num_agents_;
  std::size_t head_ = 0;  // slot of lag 0
  std::vector<double> slots_;
};

// ---------------------------------------------------------------------------
// naive-MC: x_i <- max(x_i, max_j (x_j + w_ji))

struct NaiveState {
  std::vector<double> x;

  static NaiveState initial(const ProblemInstance& inst);
};

NaiveState naive_round(const NaiveState& state, const Graph& g, LinkChannel& channel);

// ---------------------------------------------------------------------------
// D-MC

/// How the x-update of round k+1 obtains its neighbor values.
enum class DmcReception {
  reuse,   ///< reuse the noisy copies received for the v-update of round k (one message per link per round)
  redraw,  ///< retransmit and draw fresh noise (two messages per link per round)
};

struct DmcState {
  std::size_t k = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> u_bar;
  std::vector<double> v;
  /// x~_j(k) received by agent i from j, indexed by Graph::link_index(j, i).
  std::vector<double> received;
  bool reception_ready = false;

  /// All-zero state at k = 0. The reception cache holds the known initial
  /// estimates x_j(0) = 0; nothing is transmitted before the first round.
  static DmcState initial(const Graph& g);
};

/// One round: x-update, y-projection, u-update, broadcast x(k+1), v-update.
/// Throws ProtocolError if the reception cache is not ready, ShapeError on
/// dimension mismatch.
DmcState dmc_round(const DmcState& state, const Graph& g, const ProblemInstance& inst,
                   const PenaltyParams& params, LinkChannel& channel,
                   DmcReception reception = DmcReception::reuse);

// ---------------------------------------------------------------------------
// RD-MC

enum class RdmcInit {
  /// x(1) = -n/J, u(1) = 0, z(1) = 0, s(1) = -2n/J, y(1) = 0.
  standard,
  /// Same x(1), s(1), but y(1), u(1), z(1) follow from applying the
  /// y-projection and u-update to x(1) (what D-MC's first round produces).
  derivation_consistent,
};

struct RdmcState {
  std::size_t k = 1;
  HistoryWindow x_history;  // x(k), x(k-1), ...; depth max(C, 2)
  std::vector<double> x_bar;
  std::vector<double> y;
  std::vector<double> u_bar;
  std::vector<double> z;
  std::vector<double> s;  ///< message each agent sends in the next round

  double x(AgentId i) const { return x_history.at(0, i); }
  std::vector<double> current_x() const;
};

RdmcState rdmc_initial(const Graph& g, const ProblemInstance& inst, const PenaltyParams& params,
                       const WindowWeights& weights, RdmcInit init = RdmcInit::standard);

/// One round k -> k+1: receive s~_j(k), x-update, window average, y, u, z,
/// new message s(k+1) = 2 xbar(k+1) - x(k).
RdmcState rdmc_round(const RdmcState& state, const Graph& g, const ProblemInstance& inst,
                     const PenaltyParams& params, const WindowWeights& weights,
                     LinkChannel& channel);

// ---------------------------------------------------------------------------
// Driver

enum class Algorithm { naive, dmc, rdmc };

std::string_view to_string(Algorithm algo);
/// Parses "naive", "dmc" or "rdmc"; throws ParameterError otherwise.
Algorithm parse_algorithm(std::string_view name);

struct EngineOptions {
  PenaltyParams penalty{};
  WindowWeights weights = WindowWeights::uniform(1);
  DmcReception dmc_reception = DmcReception::reuse;
  RdmcInit rdmc_init = RdmcInit::standard;
  double divergence_threshold = 1e6;
};

/// x-trajectory of one run at time points 0..K.
struct Trajectory {
  std::size_t num_agents = 0;
  std::vector<double> x;  ///< row-major (K+1) x J; NaN from diverged_at onwards
  std::vector<double> final_y;  ///< empty for naive-MC
  std::optional<std::size_t> diverged_at;

  std::size_t num_points() const { return num_agents == 0 ? 0 : x.size() / num_agents; }
  std::span<const double> at(std::size_t k) const {
    return {x.data() + k * num_agents, num_agents};
  }
  bool flagged(std::size_t k) const { return diverged_at && k >= *diverged_at; }
};

/// Records x(0..K). naive-MC and D-MC start at k = 0 and run K rounds; RD-MC
/// starts from its k = 1 initialization and runs K-1 rounds. If any |x_i|
/// exceeds the divergence threshold (or is non-finite) at time k, the run
/// stops there and points k..K are flagged.
Trajectory run(Algorithm algo, const Graph& g, const ProblemInstance& inst,
               const EngineOptions& options, LinkChannel& channel, std::size_t iterations);

/// Convenience overload building the channel of `realization` (noiseless
/// when `noise` is empty).
Trajectory run(Algorithm algo, const Graph& g, const ProblemInstance& inst,
               const EngineOptions& options, const std::optional<LinkNoiseModel>& noise,
               std::uint64_t realization, std::size_t iterations);

}  // namespace maxcon
