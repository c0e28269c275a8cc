#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxcon/consensus.hpp"

namespace maxcon {

enum class TopologyKind { path, random, file };

struct TopologySpec {
  TopologyKind kind = TopologyKind::random;
  double avg_degree = 4.0;                 // random only
  std::optional<std::uint64_t> graph_seed; // random only; defaults to the master seed
  std::string file;                        // file only

  /// "path", "random" or "file:<path>"; parse_topology() accepts the same.
  std::string to_string() const;
  /// Short label used in result tables: "path", "random" or "file".
  std::string label() const;
};

TopologySpec parse_topology(std::string_view text);

/// One experiment: a topology, a parameter point and a list of algorithms.
struct SimConfig {
  TopologySpec topology;
  std::size_t agents = 20;
  double rho_y = 1.0;
  double rho_z = 1.0;
  std::size_t window = 3;
  std::vector<double> alpha;  // empty: uniform 1/C
  double sigma2 = 0.1;
  std::size_t iterations = 1000;
  std::size_t realizations = 1000;
  std::uint64_t seed = 0;
  std::vector<Algorithm> algorithms{Algorithm::rdmc};
  std::string out;
  bool dmc_redraw = false;
  bool redraw_initial = false;  // draw a_i per cell instead of once per experiment

  /// Throws ParameterError naming the offending field.
  void validate() const;
  WindowWeights weights() const;
  EngineOptions engine_options() const;
};

/// Applies one key/value pair; keys are the CLI long-flag names
/// (agents, sigma2, window, rho-y, ...). Throws ParameterError for unknown
/// keys or unparsable values.
void set_field(SimConfig& cfg, std::string_view key, std::string_view value);

/// Flat "key = value" text, one line per field, values round-trip exactly.
std::string to_ini(const SimConfig& cfg);
/// Parses "key = value" lines on top of `base`. '#' and ';' start comments,
/// blank lines and [section] headers are ignored.
SimConfig parse_ini(std::istream& in, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});

/// Shortest decimal-ish form that reads back bit-exactly ("%.17g").
std::string format_double(double v);

}  // namespace maxcon
