#include <doctest.h>

#include <cmath>

#include "weaklinks/equilibrium.hpp"
#include "weaklinks/network.hpp"
#include "weaklinks/rng.hpp"

using namespace weaklinks;

TEST_CASE("best_response") {
  CHECK(best_response(0, 1, 0, 4, 0.2) == 1);   // both forces favor switching
  CHECK(best_response(0, 1, 2, 0, 0.6) == 0);   // frozen: 1 + 0.6*(0-2) < 0
  CHECK(best_response(0, 1, 2, 0, 0.4) == 1);   // 1 + 0.4*(0-2) = 0.2 > 0
  CHECK(best_response(0, 1, 2, 0, 0.5) == 1);   // exact tie goes to revealed_best
  CHECK(best_response(1, 1, 0, 0, 0.0) == 1);   // already correct, no neighbors
}

TEST_CASE("best_response argmax consistency") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    int current = std::uniform_int_distribution<int>(0, 1)(rng);
    int revealed = std::uniform_int_distribution<int>(0, 1)(rng);
    int same = std::uniform_int_distribution<int>(0, 6)(rng);
    int other = std::uniform_int_distribution<int>(0, 6)(rng);
    double tau = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
    int got = best_response(current, revealed, same, other, tau);
    double u_cur = (current == revealed ? 1.0 : 0.0) + tau * same;
    double u_opp = (1 - current == revealed ? 1.0 : 0.0) + tau * other;
    if (u_cur > u_opp) CHECK(got == current);
    if (u_opp > u_cur) CHECK(got == 1 - current);
    if (u_cur == u_opp) CHECK(got == revealed);
  }
}

TEST_CASE("cascade on cliques") {
  auto clique3 = gen_clique(3);
  ActionProfile zeros3(3, 0);

  auto res = cascade(clique3, zeros3, {1}, 1, 0.2);
  CHECK(res.profile == ActionProfile(3, 1));
  CHECK(res.log.front().event.agent == 1);
  CHECK(res.log.front().event.kind == InfoKind::NeighborDisagrees);

  // no seeds: nothing happens
  auto idle = cascade(clique3, zeros3, {}, 1, 0.2);
  CHECK(idle.profile == zeros3);
  CHECK(idle.log.empty());

  // frozen regime: seed learns but nobody moves
  auto clique4 = gen_clique(4);
  CHECK(classify_regime(clique4, 0.5) == Regime::Frozen);
  auto frozen = cascade(clique4, ActionProfile(4, 0), {1}, 1, 0.5);
  CHECK(frozen.profile == ActionProfile(4, 0));
}

TEST_CASE("cascade idempotence and uniformity") {
  auto net = gen_island({3, 2, 1}, {{0, 1}, {0, 2}});
  double tau = 0.3;  // <= 1/2 = 1/d_max
  REQUIRE(classify_regime(net, tau) == Regime::Coordinated);
  auto part = strong_components(net);

  Rng rng = make_rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    ActionProfile start(net.n);
    // component-uniform random start, as reachable states are
    std::vector<int> comp_action(part.count());
    for (auto& a : comp_action) a = std::uniform_int_distribution<int>(0, 1)(rng);
    for (int v = 0; v < net.n; ++v)
      start[v] = static_cast<std::uint8_t>(comp_action[part.component_of[v]]);
    int revealed = std::uniform_int_distribution<int>(0, 1)(rng);
    std::vector<int> seeds{std::uniform_int_distribution<int>(0, net.n - 1)(rng)};

    auto res = cascade(net, start, seeds, revealed, tau);
    for (const auto& [i, j] : net.strong_edges) CHECK(res.profile[i] == res.profile[j]);

    auto again = cascade(net, res.profile, seeds, revealed, tau);
    CHECK(again.profile == res.profile);
  }
}

TEST_CASE("cascade rejects bad seeds") {
  auto net = gen_clique(2);
  CHECK_THROWS_AS(cascade(net, ActionProfile(2, 0), {5}, 1, 0.1), ValidationError);
}

TEST_CASE("update_belief") {
  BeliefState b;
  b.mu_at_last_info = 1.0;
  b.last_info_time = 2.0;

  CHECK(update_belief(b, 2.0, 1.0) == doctest::Approx(1.0));
  CHECK(update_belief(b, 100.0, 0.0) == doctest::Approx(1.0));
  CHECK(update_belief(b, 2.0 + std::log(2.0), 1.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(update_belief(b, 1.0, 1.0), ValidationError);
}

TEST_CASE("belief monotonicity and decay to one half") {
  Rng rng = make_rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    BeliefState b;
    b.mu_at_last_info = std::uniform_int_distribution<int>(0, 1)(rng);
    b.last_info_time = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
    // keep lambda*dt small enough that the exponential tail is representable
    double lambda = std::uniform_real_distribution<double>(0.01, 2.0)(rng);
    double dt1 = std::uniform_real_distribution<double>(1e-6, 5.0)(rng);
    double dt2 = dt1 + std::uniform_real_distribution<double>(1e-6, 5.0)(rng);
    double mu1 = update_belief(b, b.last_info_time + dt1, lambda);
    double mu2 = update_belief(b, b.last_info_time + dt2, lambda);
    if (b.mu_at_last_info == 1.0) {
      CHECK(mu1 > 0.5);
      CHECK(mu2 > 0.5);
      CHECK(mu2 < mu1);  // decays toward 1/2
    } else {
      CHECK(mu1 < 0.5);
      CHECK(mu2 < 0.5);
      CHECK(mu2 > mu1);
    }
    CHECK(std::abs(update_belief(b, b.last_info_time + 1e6, lambda) - 0.5) < 1e-9);
  }
}

TEST_CASE("verify_equilibrium") {
  auto clique4 = gen_clique(4);
  std::vector<std::optional<int>> know4(4, 1);
  CHECK(verify_equilibrium(clique4, ActionProfile(4, 1), know4, 0.2));
  ActionProfile deviant(4, 1);
  deviant[2] = 0;
  CHECK_FALSE(verify_equilibrium(clique4, deviant, know4, 0.2));

  // heterogeneous equilibrium on a two-cluster bridge graph at tau = 2/5
  std::vector<Edge> strong;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) strong.emplace_back(i, j);
  for (int i = 4; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) strong.emplace_back(i, j);
  strong.emplace_back(0, 9);
  strong.emplace_back(4, 9);
  auto bridged = build_network(10, strong, {});
  REQUIRE(classify_regime(bridged, 0.4) == Regime::Intermediate);
  ActionProfile split(10, 0);
  for (int v : {0, 1, 2, 3, 9}) split[v] = 1;
  std::vector<std::optional<int>> know(10, 1);
  CHECK(verify_equilibrium(bridged, split, know, 0.4));

  // unknown agents judged on the network term alone
  std::vector<std::optional<int>> unknown(4, std::nullopt);
  CHECK(verify_equilibrium(clique4, ActionProfile(4, 0), unknown, 0.2));
  ActionProfile lone(4, 0);
  lone[0] = 1;
  CHECK_FALSE(verify_equilibrium(clique4, lone, unknown, 0.2));

  CHECK_THROWS_AS(verify_equilibrium(clique4, ActionProfile(3, 0), know4, 0.2),
                  ValidationError);
}

TEST_CASE("cascade log serialization") {
  auto clique3 = gen_clique(3);
  auto res = cascade(clique3, ActionProfile(3, 0), {0}, 1, 0.2, InfoKind::WeakLinkActivated);
  auto text = cascade_log_to_jsonl(1.5, res.log);
  CHECK(text.find("\"weak_link_activated\"") != std::string::npos);
  CHECK(text.find("\"neighbor_disagrees\"") != std::string::npos);
  CHECK(text.find("\"revealed_best\":1") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(res.log.size()));
}
