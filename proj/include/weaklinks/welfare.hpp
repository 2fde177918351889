#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weaklinks/amc.hpp"
#include "weaklinks/engine.hpp"
#include "weaklinks/network.hpp"

namespace weaklinks {

/// Probability that an epoch contains at least one informative tremble
/// before its ending shock: q = epsilon / (lambda + epsilon).
double tremble_learn_prob(double lambda, double epsilon);

/// Welfare ceiling without weak links: 1/2 + epsilon / (2 (lambda + epsilon)).
double bound_no_weak(double lambda, double epsilon);

/// Island-network welfare ceiling from the three-state chain argument.
/// `sizes` must be sorted descending; result is clipped to 1.
double bound_island(double p_conditional, double lambda, double epsilon, double gamma,
                    const std::vector<int>& sizes);

/// Largest discount factor below which forward-looking agents provably act
/// myopically: tau * d_min / (2 + tau * d_max).
double bound_discount(double tau, int d_min, int d_max);

struct TwoNodeComparison {
  double welfare_strong = 0.0;  // closed form, two nodes joined by a strong link
  double welfare_weak = 0.0;    // exact model, two nodes joined by a weak link
};

/// Requires a large phi (the closed form for the strong pair assumes
/// instantly recovering links play no role).
TwoNodeComparison two_node_comparison(const SimParams& params);

struct MonteCarloBudget {
  long epochs = 100000;
  long burn_in = 1000;
  int replicas = 8;
  int workers = 0;
};

struct ComparisonEntry {
  std::string name;
  std::string hash;
  NetworkSpec net;
  Regime regime = Regime::Coordinated;
  WelfareEstimate estimate;
  std::optional<double> no_weak_bound;  // set when the graph has no weak links
  std::optional<double> island_bound;   // set for island graphs solved exactly
  std::optional<double> p_conditional;
  std::optional<double> eta_cg;
  std::vector<double> dk;
  std::string error;  // nonempty when this entry could not be evaluated
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  std::vector<int> ranking;     // entry indices, best welfare first
  std::vector<int> violations;  // entries whose estimate exceeds a bound
};

/// Welfare per network by the chosen method, with applicable bounds attached.
/// Monte Carlo bound checks use the lower 99% CI edge so noise cannot raise
/// false violations; a violation beyond that is a hard report entry.
ComparisonReport compare_networks(const std::vector<std::pair<std::string, NetworkSpec>>& specs,
                                  const SimParams& params, WelfareEstimate::Method method,
                                  const MonteCarloBudget& budget = {});

/// One row per network; stable column order:
/// name,hash,n,regime,method,welfare,stderr,ci_lo,ci_hi,no_weak_bound,island_bound,
/// p_conditional,eta_cg,violation
std::string report_to_csv(const ComparisonReport& report);
std::string report_to_json(const ComparisonReport& report);

}  // namespace weaklinks
