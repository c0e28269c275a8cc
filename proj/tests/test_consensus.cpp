#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "maxcon/consensus.hpp"
#include "maxcon/errors.hpp"

using namespace maxcon;

namespace {

ProblemInstance normal_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> a(n);
  for (double& v : a) v = normal(rng);
  return ProblemInstance(a);
}

double max_abs_error(std::span<const double> x, double target) {
  double e = 0.0;
  for (double v : x) e = std::max(e, std::abs(v - target));
  return e;
}

}  // namespace

// --- naive-MC ---------------------------------------------------------------

TEST_CASE("naive: one round on a complete graph floods the maximum") {
  auto g = complete_graph(3);
  LinkChannel ch(g);
  auto next = naive_round(NaiveState{{5, 1, 3}}, g, ch);
  CHECK(next.x == std::vector<double>{5, 5, 5});
  CHECK_THROWS_AS(naive_round(NaiveState{{5, 1}}, g, ch), ShapeError);
}

TEST_CASE("naive: path of 20 with the max at agent 0 needs exactly 19 rounds") {
  auto g = path_graph(20);
  std::vector<double> a(20);
  for (std::size_t i = 0; i < 20; ++i) a[i] = -static_cast<double>(i) * 0.1;
  a[0] = 3.0;
  LinkChannel ch(g);
  NaiveState s{a};
  std::size_t rounds = 0;
  while (std::any_of(s.x.begin(), s.x.end(), [](double v) { return v != 3.0; })) {
    s = naive_round(s, g, ch);
    ++rounds;
    REQUIRE(rounds <= 19);
  }
  CHECK(rounds == 19);
  CHECK(rounds == eccentricity(g, 0));
}

TEST_CASE("naive noiseless: monotone, bounded by a*, exact within the diameter") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 12;
    auto g = random_connected_graph(n, std::min<double>(n - 1, 3.0), rng());
    auto inst = normal_instance(n, rng());
    LinkChannel ch(g);
    NaiveState s = NaiveState::initial(inst);
    const AgentId argmax = static_cast<AgentId>(
        std::max_element(inst.values().begin(), inst.values().end()) - inst.values().begin());
    for (std::size_t k = 1; k <= diameter(g); ++k) {
      auto next = naive_round(s, g, ch);
      for (AgentId i = 0; i < n; ++i) {
        CHECK(next.x[i] >= s.x[i]);
        CHECK(next.x[i] <= inst.true_max());
      }
      CHECK(next.x[argmax] == inst.true_max());
      s = next;
    }
    CHECK(max_abs_error(s.x, inst.true_max()) == 0.0);
  }
}

// --- D-MC -------------------------------------------------------------------

TEST_CASE("dmc: first round from the zero state") {
  auto g = path_graph(20);
  ProblemInstance inst(std::vector<double>(20, 0.5));
  LinkChannel ch(g);
  auto s = dmc_round(DmcState::initial(g), g, inst, PenaltyParams{}, ch);
  CHECK(s.x[5] == doctest::Approx(-0.01).epsilon(1e-14));  // n = 1/5
  CHECK(s.x[0] == doctest::Approx(-1.0 / 60.0).epsilon(1e-14));  // end agent, n = 1/3
  CHECK(ch.messages_sent() == g.num_directed_links());
}

TEST_CASE("dmc: single agent converges to its own value") {
  auto g = path_graph(1);
  ProblemInstance inst({0.7});
  auto t = run(Algorithm::dmc, g, inst, EngineOptions{}, std::nullopt, 0, 500);
  CHECK(t.at(500)[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("dmc and rdmc: three-agent path reaches 0.9") {
  auto g = path_graph(3);
  ProblemInstance inst({0.1, 0.9, 0.5});
  CHECK(inst.true_max() == 0.9);
  EngineOptions opts;
  auto d = run(Algorithm::dmc, g, inst, opts, std::nullopt, 0, 2000);
  CHECK(max_abs_error(d.at(2000), 0.9) <= 1e-9);
  opts.weights = WindowWeights({0.5, 0.5});
  auto r = run(Algorithm::rdmc, g, inst, opts, std::nullopt, 0, 2000);
  CHECK(max_abs_error(r.at(2000), 0.9) <= 1e-9);
}

TEST_CASE("dmc: protocol and shape errors") {
  auto g = path_graph(4);
  ProblemInstance inst({1, 2, 3, 4});
  LinkChannel ch(g);
  DmcState s = DmcState::initial(g);
  s.reception_ready = false;
  s.k = 3;
  CHECK_THROWS_AS(dmc_round(s, g, inst, PenaltyParams{}, ch), ProtocolError);
  CHECK_THROWS_AS(dmc_round(DmcState::initial(path_graph(3)), g, inst, PenaltyParams{}, ch), ShapeError);
  CHECK_THROWS_AS(PenaltyParams({0.0, 1.0}).validate(), ParameterError);
}

TEST_CASE("dmc: reuse sends one message per link per round, redraw two") {
  auto g = random_connected_graph(10, 3.0, 4);
  auto inst = normal_instance(10, 4);
  LinkNoiseModel model(0.01, 1);
  for (auto [mode, per_round] : {std::pair{DmcReception::reuse, 1u}, std::pair{DmcReception::redraw, 2u}}) {
    LinkChannel ch(g, model, 0);
    DmcState s = DmcState::initial(g);
    s = dmc_round(s, g, inst, PenaltyParams{}, ch, mode);  // first round never redraws
    const auto after_first = ch.messages_sent();
    CHECK(after_first == g.num_directed_links());
    s = dmc_round(s, g, inst, PenaltyParams{}, ch, mode);
    CHECK(ch.messages_sent() - after_first == per_round * g.num_directed_links());
  }
}

// --- RD-MC ------------------------------------------------------------------

TEST_CASE("rdmc: initialization") {
  auto g = random_connected_graph(20, 4.0, 7);
  auto inst = normal_instance(20, 7);
  auto s = rdmc_initial(g, inst, PenaltyParams{}, WindowWeights::uniform(3));
  bool saw_degree_three = false;
  for (AgentId i = 0; i < 20; ++i) {
    const double n_i = 1.0 / (1.0 + 2.0 * g.degree(i));
    CHECK(s.x(i) == doctest::Approx(-n_i / 20.0).epsilon(1e-15));
    CHECK(s.s[i] == doctest::Approx(-2.0 * n_i / 20.0).epsilon(1e-15));
    CHECK(s.u_bar[i] == 0.0);
    CHECK(s.z[i] == 0.0);
    CHECK(s.y[i] == 0.0);
    CHECK(s.x_history.at(1, i) == 0.0);
    // Zero padding below k = 0: xbar(1) = x(1) / 3.
    CHECK(s.x_bar[i] == doctest::Approx(s.x(i) / 3.0).epsilon(1e-15));
    if (g.degree(i) == 3) {
      saw_degree_three = true;
      CHECK(s.x(i) == doctest::Approx(-1.0 / 140.0).epsilon(1e-15));
      CHECK(s.s[i] == doctest::Approx(-1.0 / 70.0).epsilon(1e-15));
    }
  }
  CHECK(saw_degree_three);
}

TEST_CASE("rdmc: single agent at a = 0 sits at the fixed point") {
  auto g = path_graph(1);
  ProblemInstance inst({0.0});
  const WindowWeights w = WindowWeights::uniform(1);
  LinkChannel ch(g);
  auto s = rdmc_initial(g, inst, PenaltyParams{}, w);
  CHECK(s.x(0) == -1.0);  // n = 1/rho_y = 1, J = 1
  for (int k = 2; k <= 10; ++k) {
    s = rdmc_round(s, g, inst, PenaltyParams{}, w, ch);
    CHECK(s.x(0) == 0.0);
  }
  CHECK(ch.messages_sent() == 0);
}

TEST_CASE("rdmc: window weight validation") {
  CHECK_THROWS_AS(WindowWeights::uniform(0), ParameterError);
  CHECK_THROWS_AS(WindowWeights({}), ParameterError);
  CHECK_THROWS_AS(WindowWeights({0.5, 0.4}), ParameterError);
  CHECK_THROWS_AS(WindowWeights({1.5, -0.5}), ParameterError);
  CHECK_NOTHROW(WindowWeights({0.2, 0.3, 0.5}));
  CHECK_NOTHROW(WindowWeights({1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST_CASE("rdmc: C = 1 makes the window the identity") {
  auto g = random_connected_graph(8, 3.0, 9);
  auto inst = normal_instance(8, 9);
  const WindowWeights w = WindowWeights::uniform(1);
  LinkChannel ch(g, LinkNoiseModel(0.05, 3), 0);
  auto s = rdmc_initial(g, inst, PenaltyParams{}, w);
  for (int k = 0; k < 20; ++k) {
    auto next = rdmc_round(s, g, inst, PenaltyParams{}, w, ch);
    for (AgentId i = 0; i < 8; ++i) {
      CHECK(next.x_bar[i] == next.x(i));
      CHECK(next.s[i] == 2.0 * next.x(i) - s.x(i));
    }
    s = next;
  }
}

TEST_CASE("rdmc: one message per directed link per round, same as dmc") {
  auto g = random_connected_graph(15, 4.0, 2);
  auto inst = normal_instance(15, 2);
  LinkNoiseModel model(0.1, 8);
  LinkChannel rd(g, model, 0);
  LinkChannel dm(g, model, 0);
  const WindowWeights w = WindowWeights::uniform(3);
  auto rs = rdmc_initial(g, inst, PenaltyParams{}, w);
  auto ds = DmcState::initial(g);
  for (int k = 1; k <= 25; ++k) {
    rs = rdmc_round(rs, g, inst, PenaltyParams{}, w, rd);
    ds = dmc_round(ds, g, inst, PenaltyParams{}, dm);
    CHECK(rd.messages_sent() == k * g.num_directed_links());
    CHECK(dm.messages_sent() == k * g.num_directed_links());
  }
}

TEST_CASE("v-elimination: one rdmc step equals one dmc step on consistent states") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    auto g = n == 1 ? path_graph(1) : random_connected_graph(n, n == 2 ? 1.0 : std::min<double>(n - 1, 2.5), rng());
    std::vector<double> a(n);
    for (double& v : a) v = uni(rng);
    ProblemInstance inst(a);
    PenaltyParams p{0.5 + std::abs(uni(rng)), 0.5 + std::abs(uni(rng))};

    // Random D-MC state at k-1, advanced once so (k-1, k) are consistent.
    DmcState prev = DmcState::initial(g);
    prev.k = 5;
    for (AgentId i = 0; i < n; ++i) {
      prev.x[i] = uni(rng);
      prev.y[i] = std::max(uni(rng), a[i]);
      prev.u_bar[i] = uni(rng);
      prev.v[i] = uni(rng);
    }
    for (AgentId i = 0; i < n; ++i)
      for (AgentId j : g.neighbors(i)) prev.received[g.link_index(j, i)] = prev.x[j];
    LinkChannel ch(g);
    DmcState cur = dmc_round(prev, g, inst, p, ch);
    DmcState dmc_next = dmc_round(cur, g, inst, p, ch);

    const WindowWeights w = WindowWeights::uniform(1);
    RdmcState rs{cur.k, HistoryWindow(2, n), cur.x, cur.y, cur.u_bar, {}, {}};
    rs.x_history.push(prev.x);
    rs.x_history.push(cur.x);
    rs.z.resize(n);
    rs.s.resize(n);
    for (AgentId i = 0; i < n; ++i) {
      rs.z[i] = 2.0 * cur.y[i] - prev.y[i];
      rs.s[i] = 2.0 * cur.x[i] - prev.x[i];
    }
    RdmcState rdmc_next = rdmc_round(rs, g, inst, p, w, ch);
    for (AgentId i = 0; i < n; ++i) worst = std::max(worst, std::abs(rdmc_next.x(i) - dmc_next.x[i]));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("trajectory equivalence of noiseless dmc and derivation-consistent rdmc") {
  auto g = random_connected_graph(20, 4.0, 7);
  auto inst = normal_instance(20, 7);
  EngineOptions opts;
  auto d = run(Algorithm::dmc, g, inst, opts, std::nullopt, 0, 200);
  opts.rdmc_init = RdmcInit::derivation_consistent;
  auto r = run(Algorithm::rdmc, g, inst, opts, std::nullopt, 0, 200);
  double worst = 0.0;
  for (std::size_t k = 0; k <= 200; ++k)
    for (AgentId i = 0; i < 20; ++i) worst = std::max(worst, std::abs(d.at(k)[i] - r.at(k)[i]));
  CHECK(worst <= 1e-9);

  // Standard initialization differs from round 2 on.
  opts.rdmc_init = RdmcInit::standard;
  auto r1 = run(Algorithm::rdmc, g, inst, opts, std::nullopt, 0, 3);
  CHECK(max_abs_error(r1.at(1), 0.0) == max_abs_error(d.at(1), 0.0));
  CHECK(max_abs_error(r1.at(2), 0.0) != doctest::Approx(max_abs_error(d.at(2), 0.0)));
}

TEST_CASE("admm engines keep y >= a and u_bar telescoping, with noise") {
  auto g = random_connected_graph(12, 4.0, 21);
  auto inst = normal_instance(12, 21);
  LinkNoiseModel model(0.1, 4);

  SUBCASE("dmc") {
    LinkChannel ch(g, model, 0);
    DmcState s = DmcState::initial(g);
    std::vector<double> u_sum(12, 0.0);
    for (int k = 1; k <= 300; ++k) {
      s = dmc_round(s, g, inst, PenaltyParams{}, ch);
      for (AgentId i = 0; i < 12; ++i) {
        CHECK(s.y[i] >= inst.value(i));
        u_sum[i] += s.x[i] - s.y[i];
        CHECK(s.u_bar[i] == doctest::Approx(u_sum[i]).epsilon(1e-9).scale(1.0));
      }
    }
  }
  SUBCASE("rdmc") {
    LinkChannel ch(g, model, 0);
    const WindowWeights w = WindowWeights::uniform(3);
    RdmcState s = rdmc_initial(g, inst, PenaltyParams{}, w);
    std::vector<double> u_sum(12, 0.0);  // u(1) = 0 under the standard initialization
    for (int k = 2; k <= 300; ++k) {
      auto next = rdmc_round(s, g, inst, PenaltyParams{}, w, ch);
      for (AgentId i = 0; i < 12; ++i) {
        CHECK(next.y[i] >= inst.value(i));
        CHECK(next.z[i] == 2.0 * next.y[i] - s.y[i]);
        u_sum[i] += next.x(i) - next.y[i];
        CHECK(next.u_bar[i] == doctest::Approx(u_sum[i]).epsilon(1e-9).scale(1.0));
      }
      s = next;
    }
  }
}

// --- driver -----------------------------------------------------------------

TEST_CASE("run: noiseless naive is constant after diameter rounds") {
  auto g = random_connected_graph(20, 4.0, 7);
  auto inst = normal_instance(20, 3);
  auto t = run(Algorithm::naive, g, inst, EngineOptions{}, std::nullopt, 0, 30);
  REQUIRE(t.num_points() == 31);
  for (std::size_t k = diameter(g); k <= 30; ++k) CHECK(max_abs_error(t.at(k), inst.true_max()) == 0.0);
  CHECK_FALSE(t.diverged_at.has_value());
}

TEST_CASE("run: identical inputs give bit-identical trajectories") {
  auto g = random_connected_graph(20, 4.0, 7);
  auto inst = normal_instance(20, 3);
  EngineOptions opts;
  opts.weights = WindowWeights::uniform(3);
  LinkNoiseModel model(0.1, 12);
  for (Algorithm algo : {Algorithm::naive, Algorithm::dmc, Algorithm::rdmc}) {
    auto a = run(algo, g, inst, opts, model, 4, 200);
    auto b = run(algo, g, inst, opts, model, 4, 200);
    CHECK(a.x == b.x);
    auto c = run(algo, g, inst, opts, model, 5, 200);
    CHECK(a.x != c.x);
  }
}

TEST_CASE("run: divergence guard flags the remaining points") {
  auto g = random_connected_graph(20, 4.0, 7);
  auto inst = normal_instance(20, 3);
  EngineOptions opts;
  opts.divergence_threshold = 10.0;
  auto t = run(Algorithm::naive, g, inst, opts, LinkNoiseModel(0.1, 1), 0, 1000);
  REQUIRE(t.diverged_at.has_value());
  const std::size_t at = *t.diverged_at;
  CHECK(at > 0);
  CHECK(std::isfinite(t.at(at - 1)[0]));
  CHECK_FALSE(t.flagged(at - 1));
  for (std::size_t k = at; k <= 1000; ++k) {
    CHECK(t.flagged(k));
    CHECK(std::isnan(t.at(k)[0]));
  }
}

TEST_CASE("run: argument checks") {
  auto g = path_graph(4);
  ProblemInstance inst({1, 2, 3, 4});
  CHECK_THROWS_AS(run(Algorithm::dmc, g, inst, EngineOptions{}, std::nullopt, 0, 0), ParameterError);
  CHECK_THROWS_AS(run(Algorithm::dmc, path_graph(3), inst, EngineOptions{}, std::nullopt, 0, 5), ShapeError);
  CHECK_THROWS_AS(ProblemInstance({}), ShapeError);
  CHECK(parse_algorithm("rdmc") == Algorithm::rdmc);
  CHECK_THROWS_AS(parse_algorithm("gossip"), ParameterError);
}
