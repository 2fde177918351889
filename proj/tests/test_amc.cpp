#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "weaklinks/amc.hpp"

using namespace weaklinks;

namespace {

SimParams limit_params() {
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 1e-4;
  p.gamma = 2.0;
  p.phi = 1e4;
  p.tau = 0.2;
  return p;
}

NetworkSpec weak_pair() { return build_network(2, {}, {{0, 1}}); }

}  // namespace

TEST_CASE("enumerate_states counts") {
  CHECK(enumerate_states(weak_pair(), 0.1).size() == 16);   // 2^2 * 2 * 2^1
  CHECK(enumerate_states(gen_clique(3), 0.2).size() == 4);  // 2 * 2 * 1

  // frozen: the profile collapses to all-zeros
  CHECK(enumerate_states(gen_clique(4), 0.5).size() == 2);
  CHECK(enumerate_states(gen_island({3, 3}, {{0, 1}}), 0.6).size() == 4);

  CHECK_THROWS_AS(enumerate_states(weak_pair(), 0.1, 8), CapacityError);

  std::vector<Edge> strong;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) strong.emplace_back(i, j);
  for (int i = 4; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) strong.emplace_back(i, j);
  strong.emplace_back(0, 9);
  strong.emplace_back(4, 9);
  auto bridged = build_network(10, strong, {});
  CHECK_THROWS_WITH_AS(enumerate_states(bridged, 0.4), doctest::Contains("intermediate"),
                       ValidationError);
}

TEST_CASE("intra_epoch_generator structure") {
  auto p = limit_params();
  auto Q = intra_epoch_generator(weak_pair(), p, 1);
  const std::uint32_t masks = 2;
  REQUIRE(Q.rows() == 8);

  // generator rows sum to zero
  for (long r = 0; r < Q.rows(); ++r) CHECK(Q.row(r).sum() == doctest::Approx(0.0));

  // all-agree, all-dormant, no trembles: absorbing within the epoch
  SimParams quiet = p;
  quiet.epsilon = 0.0;
  auto Qq = intra_epoch_generator(weak_pair(), quiet, 1);
  long agree_row = 0 * masks + 1;  // P = (0,0), link dormant
  CHECK(Qq.row(agree_row).cwiseAbs().sum() == doctest::Approx(0.0));

  // P=(0,1), R=1, dormant link: rate gamma to P=(1,1) with the link inactive
  long from = 2 * masks + 1;  // p mask 0b10 (node 1 plays 1), B = 1
  long to = 3 * masks + 0;    // p mask 0b11, B = 0
  CHECK(Q(from, to) == doctest::Approx(p.gamma));
}

TEST_CASE("epoch_kernel resolvent") {
  // nothing moves before the shock
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
  CHECK((epoch_kernel(Z, 2.0) - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-14);

  // single transition a -> b at rate r
  const double r = 3.0, lambda = 2.0;
  Eigen::MatrixXd Q(2, 2);
  Q << -r, r, 0, 0;
  auto M = epoch_kernel(Q, lambda);
  CHECK(M(0, 1) == doctest::Approx(r / (r + lambda)));
  CHECK(M(0, 0) == doctest::Approx(lambda / (r + lambda)));
  CHECK(M(1, 1) == doctest::Approx(1.0));

  // shock fires first almost surely when lambda dominates
  auto fast = epoch_kernel(Q, 1e6 * r);
  CHECK((fast - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-5);

  CHECK_THROWS_AS(epoch_kernel(Q, 0.0), ValidationError);
}

TEST_CASE("amc_kernel structure") {
  auto p = limit_params();
  auto model = amc_kernel(weak_pair(), p);
  const long N = static_cast<long>(model.states.size());
  REQUIRE(N == 16);

  for (long m = 0; m < N; ++m) {
    CHECK(model.kernel.row(m).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.kernel(m, m) > 0.0);  // aperiodicity
    // marginalizing over (P, B) at fixed R_l gives exactly 1/2
    double to_r0 = 0.0, to_r1 = 0.0;
    for (long l = 0; l < N; ++l)
      (model.states[l].r == 0 ? to_r0 : to_r1) += model.kernel(m, l);
    CHECK(to_r0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(to_r1 == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("stationary solver") {
  Eigen::MatrixXd doubly(2, 2);
  doubly << 0.7, 0.3, 0.3, 0.7;
  auto eta = stationary(doubly);
  CHECK(eta(0) == doctest::Approx(0.5));
  CHECK(eta(1) == doctest::Approx(0.5));

  // hand two-state chain: P(G|B) = (1+q)/2, P(B|G) = (1-q)/2
  const double q = 0.1 / 1.1;
  Eigen::MatrixXd K(2, 2);
  K << 0.5 * (1 - q), 0.5 * (1 + q),   // from B
       0.5 * (1 - q), 0.5 * (1 + q);   // from G
  auto eta2 = stationary(K);
  CHECK(eta2(0) == doctest::Approx(0.5 * (1 - q)));
  CHECK(eta2(1) == doctest::Approx(0.5 * (1 + q)));
  CHECK((K.transpose() * eta2 - eta2).cwiseAbs().maxCoeff() <= 1e-10);

  Eigen::MatrixXd reducible(2, 2);
  reducible << 1.0, 0.0, 0.5, 0.5;
  CHECK_THROWS_WITH_AS(stationary(reducible), doctest::Contains("reducible"), NumericalError);

  Eigen::MatrixXd periodic(2, 2);
  periodic << 0.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(stationary(periodic), NumericalError);

  Eigen::MatrixXd not_stochastic(2, 2);
  not_stochastic << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(stationary(not_stochastic), NumericalError);
}

TEST_CASE("exact welfare closed forms") {
  // clique without weak links: (1 + q)/2 with q = eps/(lambda+eps)
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 0.1;
  p.tau = 0.2;
  auto model = build_amc(gen_clique(3), p);
  CHECK(std::abs(exact_welfare(model) - 0.5 * (1.0 + 0.1 / 1.1)) < 1e-12);

  // frozen clique: exactly one half, no diverse states
  SimParams pf = p;
  pf.tau = 0.5;
  auto frozen = build_amc(gen_clique(4), pf);
  CHECK(std::abs(exact_welfare(frozen) - 0.5) < 1e-14);
  CHECK(std::isnan(conformal_prob(frozen)));
  CHECK(frozen.p_raw == 0.0);

  // fraction_correct endpoints
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    double f = model.fraction_correct(static_cast<int>(s));
    CHECK((f == 0.0 || f == 1.0));  // single component: all right or all wrong
  }
}

TEST_CASE("frozen network with weak links is reducible") {
  SimParams p = limit_params();
  p.tau = 0.6;
  auto net = gen_island({3, 3}, {{0, 1}});
  REQUIRE(classify_regime(net, p.tau) == Regime::Frozen);
  CHECK_THROWS_AS(build_amc(net, p), NumericalError);
}

TEST_CASE("derived stationary quantities") {
  auto p = limit_params();
  auto model = build_amc(gen_star(4, 2), p);

  double mass = 0.0;
  for (double d : model.dk) mass += d;
  CHECK(mass == doctest::Approx(1.0));
  CHECK(model.dk.size() == 3);  // 0, 1 or 2 components correct
  CHECK(model.p_raw >= 0.0);
  CHECK(model.p_conditional >= 0.0);
  CHECK(model.p_conditional <= 1.0);
  CHECK(model.eta_cg > 0.0);
  CHECK(model.eta_cg <= 1.0);
  CHECK(model.welfare > 0.5);
  CHECK(model.welfare < 1.0);

  // welfare recomputes from eta and the state fractions
  double check = 0.0;
  for (std::size_t s = 0; s < model.states.size(); ++s)
    check += model.eta(static_cast<long>(s)) * model.fraction_correct(static_cast<int>(s));
  CHECK(check == doctest::Approx(model.welfare));
}

TEST_CASE("monte carlo agrees with the exact model") {
  SimParams p;
  p.lambda = 1.0;
  p.epsilon = 0.05;
  p.gamma = 1.0;
  p.phi = 5.0;
  p.tau = 0.2;
  p.seed = 1234;
  auto net = gen_island({2, 2}, {{0, 1}});
  const double exact = exact_welfare(build_amc(net, p));
  auto mc = estimate_welfare(net, p, 20000, 500, 6);
  CHECK(std::abs(mc.mean - exact) < 2.576 * mc.stderror);
}

TEST_CASE("model json export") {
  auto model = build_amc(gen_clique(2), limit_params());
  auto parsed = nlohmann::json::parse(amc_model_json(model));
  CHECK(parsed["states"].size() == 4);
  CHECK(parsed["kernel"].size() == 4);
  CHECK(parsed["eta"].size() == 4);
  CHECK(parsed.contains("welfare"));
  CHECK(parsed.contains("dk"));
}
