#include "maxcon/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "maxcon/errors.hpp"

namespace maxcon {

namespace {

void require_agents(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(expected) +
                     " agents, got " + std::to_string(actual));
  }
}

double inverse_agents(const Graph& g) { return 1.0 / static_cast<double>(g.num_agents()); }

}  // namespace

ProblemInstance::ProblemInstance(std::vector<double> initial_values)
    : values_(std::move(initial_values)) {
  if (values_.empty()) throw ShapeError("problem instance: no initial values");
  max_ = values_.front();
  for (double a : values_) {
    if (!std::isfinite(a)) throw ParameterError("problem instance: non-finite initial value");
    if (a > max_) max_ = a;
  }
}

void PenaltyParams::validate() const {
  if (!(rho_y > 0.0) || !std::isfinite(rho_y)) throw ParameterError("rho_y must be > 0");
  if (!(rho_z > 0.0) || !std::isfinite(rho_z)) throw ParameterError("rho_z must be > 0");
}

WindowWeights::WindowWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw ParameterError("window size C must be >= 1");
  double sum = 0.0;
  for (double w : alpha_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("window weights must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ParameterError("window weights must sum to 1, got " + std::to_string(sum));
  }
}

WindowWeights WindowWeights::uniform(std::size_t window) {
  if (window == 0) throw ParameterError("window size C must be >= 1");
  return WindowWeights(std::vector<double>(window, 1.0 / static_cast<double>(window)));
}

HistoryWindow::HistoryWindow(std::size_t depth, std::size_t num_agents)
    : depth_(depth), num_agents_(num_agents), slots_(depth * num_agents, 0.0) {
  if (depth_ == 0) throw ParameterError("history depth must be >= 1");
}

void HistoryWindow::push(std::span<const double> row) {
  require_agents(num_agents_, row.size(), "history window");
  head_ = (head_ + depth_ - 1) % depth_;
  std::copy(row.begin(), row.end(), slots_.begin() + static_cast<std::ptrdiff_t>(head_ * num_agents_));
}

double HistoryWindow::at(std::size_t lag, AgentId i) const {
  if (lag >= depth_) return 0.0;
  return slots_[((head_ + lag) % depth_) * num_agents_ + i];
}

// --- naive-MC ---------------------------------------------------------------

NaiveState NaiveState::initial(const ProblemInstance& inst) { return NaiveState{inst.values()}; }

NaiveState naive_round(const NaiveState& state, const Graph& g, LinkChannel& channel) {
  require_agents(g.num_agents(), state.x.size(), "naive_round");
  NaiveState next = state;
  for (AgentId i = 0; i < g.num_agents(); ++i) {
    double best = state.x[i];
    for (AgentId j : g.neighbors(i)) best = std::max(best, channel.transmit(j, i, state.x[j]));
    next.x[i] = best;
  }
  return next;
}

// --- D-MC -------------------------------------------------------------------

DmcState DmcState::initial(const Graph& g) {
  const std::size_t n = g.num_agents();
  DmcState s;
  s.x.assign(n, 0.0);
  s.y.assign(n, 0.0);
  s.u_bar.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.received.assign(g.num_directed_links(), 0.0);
  s.reception_ready = true;
  return s;
}

DmcState dmc_round(const DmcState& state, const Graph& g, const ProblemInstance& inst,
                   const PenaltyParams& params, LinkChannel& channel, DmcReception reception) {
  const std::size_t n_agents = g.num_agents();
  require_agents(n_agents, inst.num_agents(), "dmc_round (instance)");
  for (const auto* vec : {&state.x, &state.y, &state.u_bar, &state.v})
    require_agents(n_agents, vec->size(), "dmc_round (state)");
  if (!state.reception_ready || state.received.size() != g.num_directed_links()) {
    throw ProtocolError("dmc_round: round " + std::to_string(state.k) +
                        " has no reception cache from the previous round");
  }
  const double inv_j = inverse_agents(g);
  const bool fresh = reception == DmcReception::redraw && state.k > 0;

  DmcState next = state;
  next.k = state.k + 1;

  for (AgentId i = 0; i < n_agents; ++i) {
    const double n_i = params.step_scale(g.degree(i));
    double neighbor_sum = 0.0;
    for (AgentId j : g.neighbors(i)) {
      const double x_j = fresh ? channel.transmit(j, i, state.x[j])
                               : state.received[g.link_index(j, i)];
      neighbor_sum += state.x[i] + x_j;
    }
    const double x_new = n_i * (-inv_j + params.rho_y * (state.y[i] - state.u_bar[i]) -
                                state.v[i] + params.rho_z * neighbor_sum);
    next.x[i] = x_new;
    next.y[i] = std::max(x_new + state.u_bar[i], inst.value(i));
    next.u_bar[i] = state.u_bar[i] + x_new - next.y[i];
  }

  // Broadcast x(k+1); the noisy copies drive the v-update now and the
  // x-update of the next round.
  for (AgentId i = 0; i < n_agents; ++i) {
    double disagreement = 0.0;
    for (AgentId j : g.neighbors(i)) {
      const double x_j = channel.transmit(j, i, next.x[j]);
      next.received[g.link_index(j, i)] = x_j;
      disagreement += next.x[i] - x_j;
    }
    next.v[i] = state.v[i] + params.rho_z * disagreement;
  }
  next.reception_ready = true;
  return next;
}

// --- RD-MC ------------------------------------------------------------------

std::vector<double> RdmcState::current_x() const {
  std::vector<double> out(x_history.num_agents());
  for (AgentId i = 0; i < out.size(); ++i) out[i] = x(i);
  return out;
}

RdmcState rdmc_initial(const Graph& g, const ProblemInstance& inst, const PenaltyParams& params,
                       const WindowWeights& weights, RdmcInit init) {
  const std::size_t n_agents = g.num_agents();
  require_agents(n_agents, inst.num_agents(), "rdmc_initial");
  params.validate();
  const double inv_j = inverse_agents(g);

  RdmcState s{1, HistoryWindow(std::max<std::size_t>(weights.size(), 2), n_agents), {}, {}, {}, {}, {}};
  std::vector<double> x1(n_agents);
  for (AgentId i = 0; i < n_agents; ++i) x1[i] = -inv_j * params.step_scale(g.degree(i));
  s.x_history.push(std::vector<double>(n_agents, 0.0));  // x(0)
  s.x_history.push(x1);

  s.x_bar.resize(n_agents);
  s.s.resize(n_agents);
  s.y.assign(n_agents, 0.0);
  s.u_bar.assign(n_agents, 0.0);
  s.z.assign(n_agents, 0.0);
  for (AgentId i = 0; i < n_agents; ++i) {
    double avg = 0.0;
    for (std::size_t lag = 0; lag < weights.size(); ++lag) avg += weights[lag] * s.x_history.at(lag, i);
    s.x_bar[i] = avg;
    s.s[i] = 2.0 * x1[i];
    if (init == RdmcInit::derivation_consistent) {
      s.y[i] = std::max(x1[i], inst.value(i));
      s.u_bar[i] = x1[i] - s.y[i];
      s.z[i] = 2.0 * s.y[i];
    }
  }
  return s;
}

RdmcState rdmc_round(const RdmcState& state, const Graph& g, const ProblemInstance& inst,
                     const PenaltyParams& params, const WindowWeights& weights,
                     LinkChannel& channel) {
  const std::size_t n_agents = g.num_agents();
  require_agents(n_agents, inst.num_agents(), "rdmc_round (instance)");
  require_agents(n_agents, state.x_history.num_agents(), "rdmc_round (state)");
  for (const auto* vec : {&state.x_bar, &state.y, &state.u_bar, &state.z, &state.s})
    require_agents(n_agents, vec->size(), "rdmc_round (state)");
  if (state.x_history.depth() < std::max<std::size_t>(weights.size(), 2)) {
    throw ShapeError("rdmc_round: history shorter than the averaging window");
  }

  std::vector<double> x_new(n_agents);
  for (AgentId i = 0; i < n_agents; ++i) {
    const double n_i = params.step_scale(g.degree(i));
    double received = 0.0;
    for (AgentId j : g.neighbors(i)) received += channel.transmit(j, i, state.s[j]);
    const double d_i = static_cast<double>(g.degree(i));
    x_new[i] = (1.0 - params.rho_y * n_i) * state.x_history.at(0, i) -
               params.rho_z * d_i * n_i * state.x_history.at(1, i) +
               n_i * (params.rho_y * state.z[i] + params.rho_z * received);
  }

  RdmcState next = state;
  next.k = state.k + 1;
  next.x_history.push(x_new);
  for (AgentId i = 0; i < n_agents; ++i) {
    double avg = 0.0;
    for (std::size_t lag = 0; lag < weights.size(); ++lag) avg += weights[lag] * next.x_history.at(lag, i);
    next.x_bar[i] = avg;
    next.y[i] = std::max(x_new[i] + state.u_bar[i], inst.value(i));
    next.u_bar[i] = state.u_bar[i] + x_new[i] - next.y[i];
    next.z[i] = 2.0 * next.y[i] - state.y[i];
    next.s[i] = 2.0 * avg - state.x_history.at(0, i);
  }
  return next;
}

// --- driver -----------------------------------------------------------------

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::naive: return "naive";
    case Algorithm::dmc: return "dmc";
    case Algorithm::rdmc: return "rdmc";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "naive") return Algorithm::naive;
  if (name == "dmc") return Algorithm::dmc;
  if (name == "rdmc") return Algorithm::rdmc;
  throw ParameterError("unknown algorithm '" + std::string(name) + "' (expected naive, dmc or rdmc)");
}

namespace {

class Recorder {
 public:
  Recorder(Trajectory& traj, std::size_t iterations, double threshold)
      : traj_(traj), threshold_(threshold) {
    traj_.x.assign((iterations + 1) * traj_.num_agents, std::numeric_limits<double>::quiet_NaN());
  }

  // Returns false once the run has diverged.
  template <typename Row>
  bool record(std::size_t k, const Row& row) {
    bool blown = false;
    for (AgentId i = 0; i < traj_.num_agents; ++i) {
      const double v = row(i);
      if (!std::isfinite(v) || std::abs(v) > threshold_) blown = true;
    }
    if (blown) {
      traj_.diverged_at = k;
      return false;
    }
    for (AgentId i = 0; i < traj_.num_agents; ++i) traj_.x[k * traj_.num_agents + i] = row(i);
    return true;
  }

 private:
  Trajectory& traj_;
  double threshold_;
};

}  // namespace

Trajectory run(Algorithm algo, const Graph& g, const ProblemInstance& inst,
               const EngineOptions& options, LinkChannel& channel, std::size_t iterations) {
  if (iterations == 0) throw ParameterError("iteration count K must be >= 1");
  require_agents(g.num_agents(), inst.num_agents(), "run");
  options.penalty.validate();

  Trajectory traj;
  traj.num_agents = g.num_agents();
  Recorder rec(traj, iterations, options.divergence_threshold);

  switch (algo) {
    case Algorithm::naive: {
      NaiveState s = NaiveState::initial(inst);
      if (!rec.record(0, [&](AgentId i) { return s.x[i]; })) break;
      for (std::size_t k = 1; k <= iterations; ++k) {
        s = naive_round(s, g, channel);
        if (!rec.record(k, [&](AgentId i) { return s.x[i]; })) break;
      }
      break;
    }
    case Algorithm::dmc: {
      DmcState s = DmcState::initial(g);
      if (!rec.record(0, [&](AgentId i) { return s.x[i]; })) break;
      for (std::size_t k = 1; k <= iterations; ++k) {
        s = dmc_round(s, g, inst, options.penalty, channel, options.dmc_reception);
        if (!rec.record(k, [&](AgentId i) { return s.x[i]; })) break;
      }
      traj.final_y = s.y;
      break;
    }
    case Algorithm::rdmc: {
      RdmcState s = rdmc_initial(g, inst, options.penalty, options.weights, options.rdmc_init);
      if (!rec.record(0, [](AgentId) { return 0.0; })) break;
      if (!rec.record(1, [&](AgentId i) { return s.x(i); })) break;
      for (std::size_t k = 2; k <= iterations; ++k) {
        s = rdmc_round(s, g, inst, options.penalty, options.weights, channel);
        if (!rec.record(k, [&](AgentId i) { return s.x(i); })) break;
      }
      traj.final_y = s.y;
      break;
    }
  }
  return traj;
}

Trajectory run(Algorithm algo, const Graph& g, const ProblemInstance& inst,
               const EngineOptions& options, const std::optional<LinkNoiseModel>& noise,
               std::uint64_t realization, std::size_t iterations) {
  LinkChannel channel = noise ? LinkChannel(g, *noise, realization) : LinkChannel(g);
  return run(algo, g, inst, options, channel, iterations);
}

}  // namespace maxcon
