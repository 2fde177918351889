#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weaklinks/engine.hpp"
#include "weaklinks/network.hpp"

namespace weaklinks {

/// One state of the embedded chain sampled at payoff shocks.
struct AmcState {
  std::uint32_t p = 0;        // action bit per strong component (all zero when frozen)
  std::uint32_t dormant = 0;  // bit per weak link, 1 = dormant
  int r = 0;                  // the better action over the ending epoch
};

/// Exact embedded-chain model over (P, R, B) states.
struct AmcModel {
  NetworkSpec net;
  ComponentPartition components;
  Regime regime = Regime::Coordinated;
  SimParams params;

  std::vector<AmcState> states;
  Eigen::MatrixXd kernel;  // row-stochastic over states

  bool solved = false;
  Eigen::VectorXd eta;        // stationary distribution
  double welfare = 0.0;       // sum of eta_q * fraction-correct(q)
  double p_raw = 0.0;         // unconditional mass flow diverse -> conformal
  double p_conditional = 0.0; // p_raw / eta(diverse); NaN when no diverse states
  std::vector<double> dk;     // distribution of the number of correct components
  double eta_cg = 0.0;        // mass of states where the largest component is correct

  /// Fraction of agents playing the better action in state q.
  double fraction_correct(int q) const;
};

constexpr long kDefaultStateCap = 1L << 20;

/// Complete canonical state list; refuses the intermediate regime (cascade
/// fixed points there are order-dependent) and caps the state count.
std::vector<AmcState> enumerate_states(const NetworkSpec& net, double tau,
                                       long cap = kDefaultStateCap);

/// Continuous-time generator over (P, B) pairs between two payoff shocks,
/// for a fixed better action R. Indexing: p * 2^W + B. The shock clock is
/// not part of the generator.
Eigen::MatrixXd intra_epoch_generator(const NetworkSpec& net, const SimParams& params, int R);

/// Distribution of the intra-epoch state at an independent exponential(lambda)
/// stopping time: lambda * (lambda*I - Q)^{-1}, by dense LU.
Eigen::MatrixXd epoch_kernel(const Eigen::MatrixXd& Q, double lambda);

/// States plus the one-epoch transition kernel
/// K[(P_m,R_m,B_m) -> (P_l,R_l,B_l)] = 1/2 * M_{R_l}[(P_m,B_m) -> (P_l,B_l)].
AmcModel amc_kernel(const NetworkSpec& net, const SimParams& params,
                    long cap = kDefaultStateCap);

/// Unique stationary distribution of a row-stochastic, irreducible, aperiodic
/// kernel. Direct solve with a normalization row for moderate sizes, power
/// iteration beyond that; residual contract 1e-10.
Eigen::VectorXd stationary(const Eigen::MatrixXd& kernel);

/// Fills eta, welfare, p_raw / p_conditional, dk, eta_cg.
void solve(AmcModel& model);

/// amc_kernel + solve.
AmcModel build_amc(const NetworkSpec& net, const SimParams& params,
                   long cap = kDefaultStateCap);

double exact_welfare(const AmcModel& model);
double conformal_prob(const AmcModel& model);  // the conditional form

/// JSON document {states, kernel, eta, welfare, p_raw, p_conditional, dk}
/// for regression snapshots.
std::string amc_model_json(const AmcModel& model);

}  // namespace weaklinks
