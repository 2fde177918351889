#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "weaklinks/rng.hpp"
#include "weaklinks/welfare.hpp"

using namespace weaklinks;

TEST_CASE("tremble_learn_prob") {
  CHECK(tremble_learn_prob(1.0, 0.0) == doctest::Approx(0.0));
  CHECK(tremble_learn_prob(2.0, 2.0) == doctest::Approx(0.5));
  CHECK(tremble_learn_prob(1.0, 0.1) == doctest::Approx(0.1 / 1.1));
  CHECK_THROWS_AS(tremble_learn_prob(0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(tremble_learn_prob(1.0, -0.1), ValidationError);
}

TEST_CASE("bound_no_weak") {
  CHECK(bound_no_weak(1.0, 0.0) == doctest::Approx(0.5));
  CHECK(bound_no_weak(1.0, 0.1) == doctest::Approx(0.5 + 0.1 / 2.2));
  const double huge = bound_no_weak(1.0, 1e6);
  CHECK(huge < 1.0);
  CHECK(huge > 0.9999);

  // monotone: increasing in epsilon, decreasing in lambda
  CHECK(bound_no_weak(1.0, 0.2) > bound_no_weak(1.0, 0.1));
  CHECK(bound_no_weak(2.0, 0.1) < bound_no_weak(1.0, 0.1));
}

TEST_CASE("bound_island") {
  // p = 0: only the catch-up term survives
  CHECK(bound_island(0.0, 1.0, 0.01, 1.0, {1, 1, 1, 1}) == doctest::Approx(0.75));
  CHECK(bound_island(0.0, 1.0, 0.01, 1.0, {4, 1, 1}) == doctest::Approx(1.0));

  // enough activations to cover every island: 3/2 before clipping
  CHECK(bound_island(1e-4, 1.0, 1.0, 10.0, {2, 2, 2}) == doctest::Approx(1.0));

  // frozen oracle value for the three displayed terms
  CHECK(bound_island(0.1, 1.0, 0.01, 1.0, {4, 1, 1}) ==
        doctest::Approx(0.5361635220125786).epsilon(1e-12));

  CHECK_THROWS_AS(bound_island(0.1, 1.0, 0.01, 1.0, {1, 4, 1}), ValidationError);
  CHECK_THROWS_AS(bound_island(1.5, 1.0, 0.01, 1.0, {4, 1, 1}), ValidationError);
  CHECK_THROWS_AS(bound_island(0.1, 1.0, 0.0, 1.0, {4, 1, 1}), ValidationError);
}

TEST_CASE("bound_discount") {
  CHECK(bound_discount(0.0, 3, 3) == doctest::Approx(0.0));
  CHECK(bound_discount(0.2, 5, 5) == doctest::Approx(1.0 / 3.0));
  const double big = bound_discount(1e6, 5, 5);
  CHECK(big < 1.0);
  CHECK(big > 0.999);
  CHECK_THROWS_AS(bound_discount(0.2, 5, 3), ValidationError);
  CHECK_THROWS_AS(bound_discount(0.2, 0, 3), ValidationError);
  CHECK_THROWS_AS(bound_discount(-0.1, 3, 3), ValidationError);

  Rng rng = make_rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    double tau = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    int d_min = std::uniform_int_distribution<int>(1, 10)(rng);
    int d_max = std::uniform_int_distribution<int>(d_min, 12)(rng);
    CHECK(std::abs(bound_discount(tau, d_min, d_max) -
                   tau * d_min / (2.0 + tau * d_max)) < 1e-12);
    // monotone in tau and d_min, antitone in d_max
    CHECK(bound_discount(tau + 0.5, d_min, d_max) >= bound_discount(tau, d_min, d_max));
    CHECK(bound_discount(tau, d_min, d_max + 1) <= bound_discount(tau, d_min, d_max));
    if (d_min < d_max)
      CHECK(bound_discount(tau, d_min + 1, d_max) >= bound_discount(tau, d_min, d_max));
  }
}

TEST_CASE("two_node_comparison") {
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 0.1;
  p.gamma = 1.0;
  p.phi = 1e4;
  auto cmp = two_node_comparison(p);
  CHECK(cmp.welfare_strong == doctest::Approx(0.5 + 0.1 / 2.2));
  CHECK(cmp.welfare_weak < cmp.welfare_strong);
  CHECK(cmp.welfare_weak > 0.5);

  SimParams quiet = p;
  quiet.epsilon = 0.0;
  auto none = two_node_comparison(quiet);
  CHECK(none.welfare_strong == doctest::Approx(0.5));
  CHECK(none.welfare_weak == doctest::Approx(0.5));

  SimParams isolated = p;
  isolated.gamma = 0.0;
  auto iso = two_node_comparison(isolated);
  CHECK(iso.welfare_weak == doctest::Approx(0.5 * (1.0 + 0.1 / 2.1)));
  CHECK(iso.welfare_weak < iso.welfare_strong);
}

TEST_CASE("two_node ordering over the parameter grid") {
  for (double eps : {1e-3, 1e-2, 1e-1}) {
    for (double gamma : {0.1, 1.0, 10.0}) {
      SimParams p;
      p.lambda = 1.0;
      p.epsilon = eps;
      p.gamma = gamma;
      p.phi = 1e4;
      auto cmp = two_node_comparison(p);
      CHECK(cmp.welfare_weak < cmp.welfare_strong);
    }
  }
}

TEST_CASE("compare_networks exact") {
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 1e-4;
  p.gamma = 5.0;
  p.phi = 1e4;
  p.tau = 0.2;

  std::vector<std::pair<std::string, NetworkSpec>> specs{
      {"clique4", gen_clique(4)},
      {"star42", gen_star(4, 2)},
  };
  auto report = compare_networks(specs, p, WelfareEstimate::Method::ExactAMC);
  REQUIRE(report.entries.size() == 2);
  CHECK(report.entries[0].error.empty());
  CHECK(report.entries[1].error.empty());
  CHECK(report.ranking.front() == 1);  // the star wins
  CHECK(report.violations.empty());
  CHECK(report.entries[0].no_weak_bound.has_value());
  CHECK_FALSE(report.entries[0].island_bound.has_value());
  CHECK(report.entries[1].island_bound.has_value());
  CHECK(report.entries[1].estimate.mean <= *report.entries[1].island_bound + 1e-9);

  auto single = compare_networks({{"only", gen_clique(3)}}, p,
                                 WelfareEstimate::Method::ExactAMC);
  CHECK(single.entries.size() == 1);
  CHECK(single.ranking == std::vector<int>{0});
  CHECK(single.violations.empty());

  // clique4 is frozen at tau=0.5: the entry reports cleanly, the clique4
  // exact value is still fine (no weak links, frozen is enumerable)
  SimParams pf = p;
  pf.tau = 0.5;
  auto frozen = compare_networks({{"clique4", gen_clique(4)}}, pf,
                                 WelfareEstimate::Method::ExactAMC);
  CHECK(frozen.entries[0].error.empty());
  CHECK(frozen.entries[0].estimate.mean == doctest::Approx(0.5));

  // an intermediate-regime network cannot be solved exactly; the sweep
  // carries on and reports the error per entry
  std::vector<Edge> strong;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) strong.emplace_back(i, j);
  for (int i = 4; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) strong.emplace_back(i, j);
  strong.emplace_back(0, 9);
  strong.emplace_back(4, 9);
  SimParams pmid = p;
  pmid.tau = 0.4;  // between 1/d_max and 1/d_min for the bridge graph
  auto mixed = compare_networks(
      {{"bad", build_network(10, strong, {})}, {"good", gen_clique(3)}}, pmid,
      WelfareEstimate::Method::ExactAMC);
  CHECK_FALSE(mixed.entries[0].error.empty());
  CHECK(mixed.entries[1].error.empty());
  CHECK(mixed.ranking.front() == 1);
}

TEST_CASE("compare_networks monte carlo") {
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 0.1;
  p.tau = 0.2;
  p.seed = 7;
  MonteCarloBudget budget;
  budget.epochs = 5000;
  budget.burn_in = 200;
  budget.replicas = 4;
  auto report = compare_networks({{"clique3", gen_clique(3)}}, p,
                                 WelfareEstimate::Method::MonteCarlo, budget);
  REQUIRE(report.entries.size() == 1);
  const auto& e = report.entries[0];
  CHECK(e.estimate.method == WelfareEstimate::Method::MonteCarlo);
  REQUIRE(e.no_weak_bound.has_value());
  // the bound is attained exactly here, so the lower CI edge stays below it
  CHECK(report.violations.empty());
  CHECK(std::abs(e.estimate.mean - *e.no_weak_bound) < 3.5 * e.estimate.stderror);
}

TEST_CASE("report serialization") {
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 1e-4;
  p.gamma = 5.0;
  p.phi = 1e4;
  p.tau = 0.2;
  auto report = compare_networks(
      {{"clique4", gen_clique(4)}, {"star42", gen_star(4, 2)}}, p,
      WelfareEstimate::Method::ExactAMC);

  auto csv = report_to_csv(report);
  CHECK(csv.rfind("name,hash,n,regime,method,welfare,stderr,ci_lo,ci_hi,no_weak_bound,"
                  "island_bound,p_conditional,eta_cg,violation\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("clique4") != std::string::npos);

  auto parsed = nlohmann::json::parse(report_to_json(report));
  CHECK(parsed["entries"].size() == 2);
  CHECK(parsed["ranking"].size() == 2);
  CHECK(parsed["entries"][1]["island_bound"].is_number());
}
