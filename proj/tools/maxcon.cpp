// maxcon: command-line front end for the max-consensus simulator.
//
//   maxcon run      --topology random --agents 20 --algo naive,dmc,rdmc ... --out mse.csv
//   maxcon figures  --preset fig3 --seed 1 --out-dir results/
//   maxcon graph    --gen random --agents 20 --avg-degree 4 --seed 7 --out edges.txt

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maxcon/config.hpp"
#include "maxcon/errors.hpp"
#include "maxcon/graph.hpp"
#include "maxcon/harness.hpp"

namespace {

struct StageError {
  std::string stage;
  std::string message;
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw StageError{name, e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed maximum consensus over noisy links"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: $MAXCON_THREADS or all cores)");

  // run ----------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Monte Carlo MSE curves for one configuration");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "INI-style file; flags given here override it");
  const std::vector<std::pair<std::string, std::string>> run_flags{
      {"topology", "path | random | file:<edges.txt>"},
      {"agents", "Number of agents J"},
      {"algo", "Comma-separated subset of naive,dmc,rdmc"},
      {"sigma2", "Link noise variance (before truncation)"},
      {"window", "RD-MC averaging window C"},
      {"alpha", "Comma-separated window weights (default 1/C each)"},
      {"rho-y", "Penalty parameter rho_y"},
      {"rho-z", "Penalty parameter rho_z"},
      {"iters", "Iterations K"},
      {"reals", "Noise realizations R"},
      {"seed", "Master seed"},
      {"graph-seed", "Random topology seed (default: master seed)"},
      {"avg-degree", "Target average degree of the random topology"},
      {"out", "Output CSV path"},
      {"dmc-redraw", "D-MC: retransmit with fresh noise for the x-update (true/false)"},
      {"redraw-initial", "Draw initial values per cell (true/false)"},
  };
  std::map<std::string, std::string> run_values;
  std::map<std::string, CLI::Option*> run_opts;
  for (const auto& [name, help] : run_flags)
    run_opts[name] = run_cmd->add_option("--" + name, run_values[name], help);

  // figures ------------------------------------------------------------------
  auto* fig_cmd = app.add_subcommand("figures", "Run a figure preset and write <out-dir>/<preset>.csv");
  std::string preset;
  std::uint64_t fig_seed = 0;
  std::string out_dir = ".";
  std::size_t fig_iters = 0;
  std::size_t fig_reals = 0;
  fig_cmd->add_option("--preset", preset, "fig3 | fig4 | fig5 | fig6 | fig7 | all")->required();
  fig_cmd->add_option("--seed", fig_seed, "Master seed");
  fig_cmd->add_option("--out-dir", out_dir, "Output directory");
  fig_cmd->add_option("--iters", fig_iters, "Override iteration count");
  fig_cmd->add_option("--reals", fig_reals, "Override realization count");

  // graph --------------------------------------------------------------------
  auto* graph_cmd = app.add_subcommand("graph", "Generate a topology as an edge-list file");
  std::string gen = "random";
  std::size_t graph_agents = 20;
  double avg_degree = 4.0;
  std::uint64_t graph_seed = 0;
  std::string graph_out;
  graph_cmd->add_option("--gen", gen, "random | path")->check(CLI::IsMember({"random", "path"}));
  graph_cmd->add_option("--agents", graph_agents, "Number of agents J");
  graph_cmd->add_option("--avg-degree", avg_degree, "Target average degree (random)");
  graph_cmd->add_option("--seed", graph_seed, "Generator seed (random)");
  graph_cmd->add_option("--out", graph_out, "Output edge-list path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      maxcon::SimConfig cfg = stage("config", [&] {
        maxcon::SimConfig c = config_path.empty() ? maxcon::SimConfig{} : maxcon::load_config(config_path);
        for (const auto& [name, opt] : run_opts)
          if (opt->count() > 0) maxcon::set_field(c, name, run_values[name]);
        if (c.out.empty()) throw maxcon::ParameterError("config field 'out': an output path is required");
        c.validate();
        return c;
      });
      stage("topology", [&] { return maxcon::build_topology(cfg); });
      auto result = stage("simulation", [&] { return maxcon::run_experiment(cfg, threads); });
      stage("output", [&] {
        maxcon::write_csv(result, cfg.out);
        return 0;
      });
      maxcon::write_summary(result, std::cout);
      std::cout << "wrote " << cfg.out << '\n';
    } else if (*fig_cmd) {
      std::vector<std::string> names =
          preset == "all" ? maxcon::preset_names() : std::vector<std::string>{preset};
      for (const auto& name : names) {
        auto configs = stage("config", [&] {
          auto list = maxcon::figure_preset(name);
          for (auto& c : list) {
            c.seed = fig_seed;
            if (fig_iters) c.iterations = fig_iters;
            if (fig_reals) c.realizations = fig_reals;
          }
          return list;
        });
        auto result = stage("simulation", [&] { return maxcon::run_configs(configs, threads); });
        const auto path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
        stage("output", [&] {
          std::filesystem::create_directories(out_dir);
          maxcon::write_csv(result, path);
          return 0;
        });
        std::cout << "== " << name << '\n';
        maxcon::write_summary(result, std::cout);
        std::cout << "wrote " << path << '\n';
      }
    } else if (*graph_cmd) {
      auto g = stage("topology", [&] {
        return gen == "path" ? maxcon::path_graph(graph_agents)
                             : maxcon::random_connected_graph(graph_agents, avg_degree, graph_seed);
      });
      stage("output", [&] {
        maxcon::save_edge_list(g, graph_out);
        return 0;
      });
      std::cout << "J=" << g.num_agents() << " E=" << g.num_edges() << " avg_degree=" << g.average_degree()
                << " diameter=" << maxcon::diameter(g) << "\nwrote " << graph_out << '\n';
    }
  } catch (const StageError& e) {
    std::cerr << "maxcon: " << e.stage << " failed: " << e.message << '\n';
    return 1;
  }
  return 0;
}
