#include "maxcon/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "maxcon/errors.hpp"

namespace maxcon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) parts.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* want) {
  throw ParameterError("config field '" + std::string(key) + "': cannot parse '" +
                       std::string(value) + "' as " + want);
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "an unsigned integer");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "a real number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ParameterError("config field '" + std::string(field) + "': " + why);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string TopologySpec::to_string() const {
  switch (kind) {
    case TopologyKind::path: return "path";
    case TopologyKind::random: return "random";
    case TopologyKind::file: return "file:" + file;
  }
  return "?";
}

std::string TopologySpec::label() const {
  switch (kind) {
    case TopologyKind::path: return "path";
    case TopologyKind::random: return "random";
    case TopologyKind::file: return "file";
  }
  return "?";
}

TopologySpec parse_topology(std::string_view text) {
  TopologySpec spec;
  if (text == "path") {
    spec.kind = TopologyKind::path;
  } else if (text == "random") {
    spec.kind = TopologyKind::random;
  } else if (text.starts_with("file:") && text.size() > 5) {
    spec.kind = TopologyKind::file;
    spec.file = std::string(text.substr(5));
  } else {
    throw ParameterError("config field 'topology': expected path, random or file:<path>, got '" +
                         std::string(text) + "'");
  }
  return spec;
}

void SimConfig::validate() const {
  require(agents >= 1, "agents", "must be >= 1");
  require(iterations >= 1, "iters", "must be >= 1");
  require(realizations >= 1, "reals", "must be >= 1");
  require(window >= 1, "window", "must be >= 1");
  require(rho_y > 0.0 && std::isfinite(rho_y), "rho-y", "must be > 0");
  require(rho_z > 0.0 && std::isfinite(rho_z), "rho-z", "must be > 0");
  require(sigma2 >= 0.0 && std::isfinite(sigma2), "sigma2", "must be >= 0");
  require(!algorithms.empty(), "algo", "at least one algorithm is required");
  if (!alpha.empty()) {
    require(alpha.size() == window, "alpha", "needs exactly 'window' weights");
    try {
      WindowWeights check(alpha);
    } catch (const ParameterError& e) {
      require(false, "alpha", e.what());
    }
  }
  if (topology.kind == TopologyKind::random) {
    require(agents >= 2, "agents", "random topology needs at least 2 agents");
    const double n = static_cast<double>(agents);
    require(topology.avg_degree >= 2.0 * (n - 1.0) / n && topology.avg_degree <= n - 1.0,
            "avg-degree", "must lie in [2(J-1)/J, J-1]");
  }
  if (topology.kind == TopologyKind::file) require(!topology.file.empty(), "topology", "empty file path");
}

WindowWeights SimConfig::weights() const {
  return alpha.empty() ? WindowWeights::uniform(window) : WindowWeights(alpha);
}

EngineOptions SimConfig::engine_options() const {
  EngineOptions opt;
  opt.penalty = PenaltyParams{rho_y, rho_z};
  opt.weights = weights();
  opt.dmc_reception = dmc_redraw ? DmcReception::redraw : DmcReception::reuse;
  return opt;
}

void set_field(SimConfig& cfg, std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  if (key == "topology") {
    const auto keep_degree = cfg.topology.avg_degree;
    const auto keep_seed = cfg.topology.graph_seed;
    cfg.topology = parse_topology(value);
    cfg.topology.avg_degree = keep_degree;
    cfg.topology.graph_seed = keep_seed;
  } else if (key == "agents") {
    cfg.agents = parse_u64(key, value);
  } else if (key == "algo") {
    cfg.algorithms.clear();
    for (auto name : split_list(value)) cfg.algorithms.push_back(parse_algorithm(name));
  } else if (key == "sigma2") {
    cfg.sigma2 = parse_real(key, value);
  } else if (key == "window") {
    cfg.window = parse_u64(key, value);
  } else if (key == "alpha") {
    cfg.alpha.clear();
    for (auto w : split_list(value)) cfg.alpha.push_back(parse_real(key, w));
  } else if (key == "rho-y") {
    cfg.rho_y = parse_real(key, value);
  } else if (key == "rho-z") {
    cfg.rho_z = parse_real(key, value);
  } else if (key == "iters") {
    cfg.iterations = parse_u64(key, value);
  } else if (key == "reals") {
    cfg.realizations = parse_u64(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "graph-seed") {
    if (value.empty()) cfg.topology.graph_seed.reset();
    else cfg.topology.graph_seed = parse_u64(key, value);
  } else if (key == "avg-degree") {
    cfg.topology.avg_degree = parse_real(key, value);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "dmc-redraw") {
    cfg.dmc_redraw = parse_bool(key, value);
  } else if (key == "redraw-initial") {
    cfg.redraw_initial = parse_bool(key, value);
  } else {
    throw ParameterError("unknown config field '" + std::string(key) + "'");
  }
}

std::string to_ini(const SimConfig& cfg) {
  std::ostringstream out;
  out << "topology = " << cfg.topology.to_string() << '\n';
  out << "avg-degree = " << format_double(cfg.topology.avg_degree) << '\n';
  out << "graph-seed = ";
  if (cfg.topology.graph_seed) out << *cfg.topology.graph_seed;
  out << '\n';
  out << "agents = " << cfg.agents << '\n';
  out << "algo = ";
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
    out << (i ? "," : "") << to_string(cfg.algorithms[i]);
  out << '\n';
  out << "sigma2 = " << format_double(cfg.sigma2) << '\n';
  out << "window = " << cfg.window << '\n';
  out << "alpha = ";
  for (std::size_t i = 0; i < cfg.alpha.size(); ++i) out << (i ? "," : "") << format_double(cfg.alpha[i]);
  out << '\n';
  out << "rho-y = " << format_double(cfg.rho_y) << '\n';
  out << "rho-z = " << format_double(cfg.rho_z) << '\n';
  out << "iters = " << cfg.iterations << '\n';
  out << "reals = " << cfg.realizations << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "dmc-redraw = " << (cfg.dmc_redraw ? "true" : "false") << '\n';
  out << "redraw-initial = " << (cfg.redraw_initial ? "true" : "false") << '\n';
  out << "out = " << cfg.out << '\n';
  return out.str();
}

SimConfig parse_ini(std::istream& in, SimConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find_first_of("#;"); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty() || view.front() == '[') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    set_field(base, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  return base;
}

SimConfig load_config(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_ini(in, std::move(base));
}

}  // namespace maxcon
