#include "weaklinks/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace weaklinks {

double tremble_learn_prob(double lambda, double epsilon) {
  if (!(lambda > 0)) throw ValidationError("lambda must be strictly positive");
  if (epsilon < 0) throw ValidationError("epsilon must be non-negative");
  return epsilon / (lambda + epsilon);
}

double bound_no_weak(double lambda, double epsilon) {
  return 0.5 + 0.5 * tremble_learn_prob(lambda, epsilon);
}

double bound_island(double p_conditional, double lambda, double epsilon, double gamma,
                    const std::vector<int>& sizes) {
  if (sizes.empty()) throw ValidationError("island sizes must be nonempty");
  if (!std::is_sorted(sizes.rbegin(), sizes.rend()))
    throw ValidationError("island sizes must be sorted descending");
  if (!(lambda > 0) || !(epsilon > 0) || gamma < 0)
    throw ValidationError("rates must be positive (gamma may be zero)");
  if (!(p_conditional >= 0.0 && p_conditional <= 1.0))
    throw ValidationError("p must lie in [0, 1]");

  const double p = p_conditional;
  const double ratio = lambda / epsilon;
  const double denom = 1.0 + 2.0 * p + 2.0 * ratio * p;
  const double term_i = (2.0 * p + ratio * p) / denom;
  const double term_ii = 1.0 / denom;

  const long k = static_cast<long>(sizes.size());
  const long reach = std::min(static_cast<long>(std::ceil(gamma / lambda)), k);
  long covered = 0, total = 0;
  for (long i = 0; i < k; ++i) {
    total += sizes[i];
    if (i < reach) covered += sizes[i];
  }
  const double term_iii = 0.5 + static_cast<double>(covered) / total;

  return std::min(1.0, term_i + term_ii * term_iii);
}

double bound_discount(double tau, int d_min, int d_max) {
  if (tau < 0) throw ValidationError("tau must be non-negative");
  if (d_min < 1 || d_min > d_max)
    throw ValidationError("degrees must satisfy 1 <= d_min <= d_max");
  return tau * d_min / (2.0 + tau * d_max);
}

TwoNodeComparison two_node_comparison(const SimParams& params) {
  params.validate();
  TwoNodeComparison out;
  out.welfare_strong = bound_no_weak(params.lambda, params.epsilon);
  if (params.epsilon == 0) {
    out.welfare_weak = 0.5;  // no information ever enters either network
  } else if (params.gamma == 0) {
    // the link never fires; each node learns only from its own rate-eps/2
    // trembles, so the chain over (P, B) is reducible and the exact solver
    // refuses it, but the per-node closed form is immediate
    out.welfare_weak = 0.5 * (1.0 + params.epsilon / (params.epsilon + 2.0 * params.lambda));
  } else {
    const NetworkSpec weak_pair = build_network(2, {}, {{0, 1}});
    out.welfare_weak = exact_welfare(build_amc(weak_pair, params));
  }
  return out;
}

ComparisonReport compare_networks(const std::vector<std::pair<std::string, NetworkSpec>>& specs,
                                  const SimParams& params, WelfareEstimate::Method method,
                                  const MonteCarloBudget& budget) {
  params.validate();
  ComparisonReport report;
  for (const auto& [name, net] : specs) {
    ComparisonEntry entry;
    entry.name = name;
    entry.hash = spec_hash(net);
    entry.net = net;
    entry.regime = classify_regime(net, params.tau);
    try {
      if (method == WelfareEstimate::Method::ExactAMC) {
        AmcModel model = build_amc(net, params);
        entry.estimate = WelfareEstimate::exact(model.welfare);
        if (!std::isnan(model.p_conditional)) entry.p_conditional = model.p_conditional;
        entry.eta_cg = model.eta_cg;
        entry.dk = model.dk;
      } else {
        entry.estimate = estimate_welfare(net, params, budget.epochs, budget.burn_in,
                                          budget.replicas, budget.workers);
      }
      if (net.weak_edges.empty() && entry.regime == Regime::Coordinated)
        entry.no_weak_bound = bound_no_weak(params.lambda, params.epsilon);
      if (!net.weak_edges.empty() && is_island_network(net) && entry.p_conditional &&
          params.epsilon > 0) {
        entry.island_bound = bound_island(*entry.p_conditional, params.lambda, params.epsilon,
                                          params.gamma, strong_components(net).sizes);
      }
    } catch (const Error& e) {
      entry.error = e.what();
    }
    report.entries.push_back(std::move(entry));
  }

  report.ranking.resize(report.entries.size());
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](int a, int b) {
    const auto& ea = report.entries[a];
    const auto& eb = report.entries[b];
    if (ea.error.empty() != eb.error.empty()) return ea.error.empty();
    return ea.estimate.mean > eb.estimate.mean;
  });

  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    if (!e.error.empty()) continue;
    // exact estimates are compared directly; Monte Carlo via the 99% lower edge
    const double edge = e.estimate.method == WelfareEstimate::Method::MonteCarlo
                            ? e.estimate.mean - 2.576 * e.estimate.stderror
                            : e.estimate.mean;
    const bool bad = (e.no_weak_bound && edge > *e.no_weak_bound + 1e-9) ||
                     (e.island_bound && edge > *e.island_bound + 1e-9);
    if (bad) report.violations.push_back(static_cast<int>(i));
  }
  return report;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

nlohmann::json entry_json(const ComparisonEntry& e, bool violation) {
  nlohmann::json j{{"name", e.name},
                   {"hash", e.hash},
                   {"n", e.net.n},
                   {"regime", to_string(e.regime)},
                   {"violation", violation}};
  if (!e.error.empty()) {
    j["error"] = e.error;
    return j;
  }
  j["method"] = to_string(e.estimate.method);
  j["welfare"] = e.estimate.mean;
  j["stderr"] = e.estimate.stderror;
  j["ci_lo"] = e.estimate.ci_lo;
  j["ci_hi"] = e.estimate.ci_hi;
  if (e.no_weak_bound) j["no_weak_bound"] = *e.no_weak_bound;
  if (e.island_bound) j["island_bound"] = *e.island_bound;
  if (e.p_conditional) j["p_conditional"] = *e.p_conditional;
  if (e.eta_cg) j["eta_cg"] = *e.eta_cg;
  if (!e.dk.empty()) j["dk"] = e.dk;
  return j;
}

}  // namespace

std::string report_to_csv(const ComparisonReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "name,hash,n,regime,method,welfare,stderr,ci_lo,ci_hi,no_weak_bound,island_bound,"
        "p_conditional,eta_cg,violation\n";
  std::vector<bool> bad(report.entries.size(), false);
  for (int v : report.violations) bad[v] = true;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    os << e.name << "," << e.hash << "," << e.net.n << "," << to_string(e.regime) << ",";
    if (!e.error.empty()) {
      os << "error,,,,,,,,," << (bad[i] ? 1 : 0) << "\n";
      continue;
    }
    os << to_string(e.estimate.method) << "," << e.estimate.mean << "," << e.estimate.stderror
       << "," << e.estimate.ci_lo << "," << e.estimate.ci_hi << ","
       << opt_str(e.no_weak_bound) << "," << opt_str(e.island_bound) << ","
       << opt_str(e.p_conditional) << "," << opt_str(e.eta_cg) << "," << (bad[i] ? 1 : 0)
       << "\n";
  }
  return os.str();
}

std::string report_to_json(const ComparisonReport& report) {
  std::vector<bool> bad(report.entries.size(), false);
  for (int v : report.violations) bad[v] = true;
  nlohmann::json j;
  j["entries"] = nlohmann::json::array();
  for (std::size_t i = 0; i < report.entries.size(); ++i)
    j["entries"].push_back(entry_json(report.entries[i], bad[i]));
  j["ranking"] = report.ranking;
  j["violations"] = report.violations;
  return j.dump(2);
}

}  // namespace weaklinks
