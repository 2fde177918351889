#include "weaklinks/amc.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <new>
#include <queue>

#include <json.hpp>

#include "weaklinks/equilibrium.hpp"

namespace weaklinks {

namespace {

ActionProfile decode_profile(const ComponentPartition& part, std::uint32_t p) {
  ActionProfile profile(part.component_of.size());
  for (std::size_t v = 0; v < profile.size(); ++v)
    profile[v] = static_cast<std::uint8_t>((p >> part.component_of[v]) & 1u);
  return profile;
}

std::uint32_t encode_profile(const ComponentPartition& part, const ActionProfile& profile) {
  std::uint32_t p = 0;
  std::vector<int> seen(part.count(), -1);
  for (std::size_t v = 0; v < profile.size(); ++v) {
    const int c = part.component_of[v];
    if (seen[c] < 0) {
      seen[c] = profile[v];
      if (profile[v]) p |= (1u << c);
    } else if (seen[c] != profile[v]) {
      throw InternalError("profile is not component-uniform");
    }
  }
  return p;
}

/// Mirrors the engine's tremble handler: forced flip, full argmax for the
/// trembler, cascade only if the flip sticks.
ActionProfile tremble_outcome(const NetworkSpec& net, const ActionProfile& profile, int agent,
                              int better, double tau) {
  const int original = profile[agent];
  const int forced = 1 - original;
  int same = 0, other = 0;
  for (int j : net.strong_adj[agent]) (profile[j] == forced ? same : other)++;
  if (best_response(forced, better, same, other, tau) == original) return profile;
  ActionProfile flipped = profile;
  flipped[agent] = static_cast<std::uint8_t>(forced);
  return cascade(net, std::move(flipped), {agent}, better, tau, InfoKind::Tremble).profile;
}

void check_enumerable(const NetworkSpec& net, double tau, long cap, Regime& regime,
                      ComponentPartition& part) {
  regime = classify_regime(net, tau);
  if (regime == Regime::Intermediate)
    throw ValidationError(
        "exact analysis unsupported in the intermediate regime (order-dependent fixed points)");
  part = strong_components(net);
  const int C = part.count();
  const int W = static_cast<int>(net.weak_edges.size());
  if (C > 25 || W > 25)
    throw CapacityError("state space too large: " + std::to_string(C) + " components, " +
                        std::to_string(W) + " weak links");
  const long profiles = regime == Regime::Coordinated ? (1L << C) : 1L;
  const long total = profiles * 2L * (1L << W);
  if (total > cap)
    throw CapacityError("state count " + std::to_string(total) + " exceeds cap " +
                        std::to_string(cap) + " (" + std::to_string(C) + " components, " +
                        std::to_string(W) + " weak links)");
}

}  // namespace

double AmcModel::fraction_correct(int q) const {
  const AmcState& s = states[q];
  long correct = 0;
  for (int c = 0; c < components.count(); ++c)
    if (static_cast<int>((s.p >> c) & 1u) == s.r) correct += components.component_sizes[c];
  return static_cast<double>(correct) / net.n;
}

std::vector<AmcState> enumerate_states(const NetworkSpec& net, double tau, long cap) {
  Regime regime;
  ComponentPartition part;
  check_enumerable(net, tau, cap, regime, part);
  const std::uint32_t profiles =
      regime == Regime::Coordinated ? (1u << part.count()) : 1u;
  const std::uint32_t masks = 1u << net.weak_edges.size();

  std::vector<AmcState> states;
  states.reserve(static_cast<std::size_t>(profiles) * masks * 2);
  for (std::uint32_t p = 0; p < profiles; ++p)
    for (std::uint32_t b = 0; b < masks; ++b)
      for (int r = 0; r < 2; ++r) states.push_back({p, b, r});
  return states;
}

Eigen::MatrixXd intra_epoch_generator(const NetworkSpec& net, const SimParams& params, int R) {
  params.validate();
  if (R != 0 && R != 1) throw ValidationError("better action must be 0 or 1");
  Regime regime;
  ComponentPartition part;
  check_enumerable(net, params.tau, kDefaultStateCap, regime, part);

  const std::uint32_t profiles =
      regime == Regime::Coordinated ? (1u << part.count()) : 1u;
  const int W = static_cast<int>(net.weak_edges.size());
  const std::uint32_t masks = 1u << W;
  const long N = static_cast<long>(profiles) * masks;

  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  for (std::uint32_t p = 0; p < profiles; ++p) {
    const ActionProfile profile = decode_profile(part, p);
    for (std::uint32_t b = 0; b < masks; ++b) {
      const long row = static_cast<long>(p) * masks + b;

      if (params.gamma > 0) {
        std::vector<int> eligible;
        for (int l = 0; l < W; ++l) {
          const auto& [i, j] = net.weak_edges[l];
          if (((b >> l) & 1u) && profile[i] != profile[j]) eligible.push_back(l);
        }
        if (!eligible.empty()) {
          const double rate = params.gamma / eligible.size();
          for (int l : eligible) {
            const auto& [i, j] = net.weak_edges[l];
            auto res = cascade(net, profile, {i, j}, R, params.tau,
                               InfoKind::WeakLinkActivated);
            const std::uint32_t p2 = encode_profile(part, res.profile);
            const std::uint32_t b2 = b & ~(1u << l);
            Q(row, static_cast<long>(p2) * masks + b2) += rate;
          }
        }
      }

      if (params.epsilon > 0) {
        for (int a = 0; a < net.n; ++a) {
          ActionProfile out = tremble_outcome(net, profile, a, R, params.tau);
          if (out == profile) continue;  // reverted trembles stay diagonal
          const std::uint32_t p2 = encode_profile(part, out);
          Q(row, static_cast<long>(p2) * masks + b) += params.epsilon / net.n;
        }
      }

      if (params.phi > 0) {
        for (int l = 0; l < W; ++l)
          if (!((b >> l) & 1u))
            Q(row, static_cast<long>(p) * masks + (b | (1u << l))) += params.phi;
      }

      Q(row, row) -= Q.row(row).sum();
    }
  }
  return Q;
}

Eigen::MatrixXd epoch_kernel(const Eigen::MatrixXd& Q, double lambda) {
  if (!(lambda > 0)) throw ValidationError("lambda must be strictly positive");
  const long N = Q.rows();
  if (Q.cols() != N) throw ValidationError("generator must be square");

  const Eigen::MatrixXd A =
      lambda * Eigen::MatrixXd::Identity(N, N) - Q;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::MatrixXd M = lu.solve(lambda * Eigen::MatrixXd::Identity(N, N));
  // one step of iterative refinement keeps row sums at machine precision
  // even when phi dwarfs lambda
  M += lu.solve(lambda * Eigen::MatrixXd::Identity(N, N) - A * M);

  const double worst = (M.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (worst > 1e-12)
    throw NumericalError("epoch kernel row-sum residual " + std::to_string(worst) +
                         " exceeds 1e-12");
  return M;
}

AmcModel amc_kernel(const NetworkSpec& net, const SimParams& params, long cap) {
  AmcModel model;
  model.net = net;
  model.params = params;
  model.states = enumerate_states(net, params.tau, cap);
  model.regime = classify_regime(net, params.tau);
  model.components = strong_components(net);

  const Eigen::MatrixXd M0 = epoch_kernel(intra_epoch_generator(net, params, 0), params.lambda);
  const Eigen::MatrixXd M1 = epoch_kernel(intra_epoch_generator(net, params, 1), params.lambda);

  const std::uint32_t masks = 1u << net.weak_edges.size();
  const long N = static_cast<long>(model.states.size());
  model.kernel.resize(N, N);
  for (long m = 0; m < N; ++m) {
    const long pb_m = static_cast<long>(model.states[m].p) * masks + model.states[m].dormant;
    for (long l = 0; l < N; ++l) {
      const AmcState& to = model.states[l];
      const long pb_l = static_cast<long>(to.p) * masks + to.dormant;
      const Eigen::MatrixXd& M = to.r == 0 ? M0 : M1;
      model.kernel(m, l) = 0.5 * M(pb_m, pb_l);
    }
  }
  return model;
}

namespace {

bool strongly_connected(const Eigen::MatrixXd& K, bool transpose) {
  const long N = K.rows();
  std::vector<char> seen(N, 0);
  std::queue<long> q;
  q.push(0);
  seen[0] = 1;
  long reached = 1;
  while (!q.empty()) {
    const long u = q.front();
    q.pop();
    for (long v = 0; v < N; ++v) {
      const double w = transpose ? K(v, u) : K(u, v);
      if (w > 1e-14 && !seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == N;
}

}  // namespace

Eigen::VectorXd stationary(const Eigen::MatrixXd& kernel) {
  const long N = kernel.rows();
  if (kernel.cols() != N || N == 0) throw ValidationError("kernel must be square and nonempty");
  const double row_err = (kernel.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_err > 1e-12)
    throw NumericalError("kernel is not row-stochastic (residual " + std::to_string(row_err) +
                         ")");
  if (kernel.diagonal().minCoeff() <= 0.0)
    throw NumericalError("kernel has a non-positive diagonal entry (aperiodicity check)");
  if (!strongly_connected(kernel, false) || !strongly_connected(kernel, true))
    throw NumericalError("kernel is reducible; some states are unreachable");

  Eigen::VectorXd eta;
  if (N <= 4096) {
    Eigen::MatrixXd A = kernel.transpose() - Eigen::MatrixXd::Identity(N, N);
    A.row(N - 1).setOnes();  // replace one redundant equation with normalization
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    b(N - 1) = 1.0;
    eta = A.partialPivLu().solve(b);
  } else {
    eta = Eigen::VectorXd::Constant(N, 1.0 / N);
    Eigen::VectorXd next(N);
    bool converged = false;
    for (long it = 0; it < 2000000; ++it) {
      next.noalias() = kernel.transpose() * eta;
      const double delta = (next - eta).cwiseAbs().maxCoeff();
      eta.swap(next);
      if (delta < 1e-12) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("power iteration did not converge");
  }

  if (eta.minCoeff() < -1e-10)
    throw NumericalError("stationary solve produced a negative probability");
  eta = eta.cwiseMax(0.0);
  eta /= eta.sum();
  const double residual = (kernel.transpose() * eta - eta).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw NumericalError("stationarity residual " + std::to_string(residual) +
                         " exceeds 1e-10");
  return eta;
}

void solve(AmcModel& model) {
  model.eta = stationary(model.kernel);
  const long N = static_cast<long>(model.states.size());
  const int C = model.components.count();
  const std::uint32_t full = C < 32 ? (1u << C) - 1u : ~0u;

  // largest component, ties to the lowest id
  int cmax = 0;
  for (int c = 1; c < C; ++c)
    if (model.components.component_sizes[c] > model.components.component_sizes[cmax]) cmax = c;

  auto conformal = [&](const AmcState& s) {
    return s.p == (s.r == 1 ? full : 0u);
  };
  auto diverse = [&](const AmcState& s) { return s.p != 0u && s.p != full; };

  model.welfare = 0.0;
  model.dk.assign(C + 1, 0.0);
  model.eta_cg = 0.0;
  double mass_diverse = 0.0;
  model.p_raw = 0.0;
  for (long q = 0; q < N; ++q) {
    const AmcState& s = model.states[q];
    const double w = model.eta(q);
    model.welfare += w * model.fraction_correct(q);
    const std::uint32_t correct_mask = (s.r == 1 ? s.p : ~s.p) & full;
    model.dk[std::popcount(correct_mask)] += w;
    if (static_cast<int>((s.p >> cmax) & 1u) == s.r) model.eta_cg += w;
    if (diverse(s)) {
      mass_diverse += w;
      double to_conformal = 0.0;
      for (long l = 0; l < N; ++l)
        if (conformal(model.states[l])) to_conformal += model.kernel(q, l);
      model.p_raw += w * to_conformal;
    }
  }
  model.p_conditional = mass_diverse > 0.0
                            ? model.p_raw / mass_diverse
                            : std::numeric_limits<double>::quiet_NaN();
  model.solved = true;
}

AmcModel build_amc(const NetworkSpec& net, const SimParams& params, long cap) {
  try {
    AmcModel model = amc_kernel(net, params, cap);
    solve(model);
    return model;
  } catch (const std::bad_alloc&) {
    throw CapacityError("state space too large for dense analysis");
  }
}

double exact_welfare(const AmcModel& model) {
  if (!model.solved) throw ValidationError("model has not been solved");
  return model.welfare;
}

double conformal_prob(const AmcModel& model) {
  if (!model.solved) throw ValidationError("model has not been solved");
  return model.p_conditional;
}

std::string amc_model_json(const AmcModel& model) {
  nlohmann::json j;
  j["regime"] = to_string(model.regime);
  j["states"] = nlohmann::json::array();
  for (const auto& s : model.states)
    j["states"].push_back({{"p", s.p}, {"dormant", s.dormant}, {"r", s.r}});
  j["kernel"] = nlohmann::json::array();
  for (long m = 0; m < model.kernel.rows(); ++m) {
    nlohmann::json row = nlohmann::json::array();
    for (long l = 0; l < model.kernel.cols(); ++l) row.push_back(model.kernel(m, l));
    j["kernel"].push_back(row);
  }
  if (model.solved) {
    j["eta"] = std::vector<double>(model.eta.data(), model.eta.data() + model.eta.size());
    j["welfare"] = model.welfare;
    j["p_raw"] = model.p_raw;
    if (std::isnan(model.p_conditional))
      j["p_conditional"] = nullptr;
    else
      j["p_conditional"] = model.p_conditional;
    j["dk"] = model.dk;
    j["eta_cg"] = model.eta_cg;
  }
  return j.dump(2);
}

}  // namespace weaklinks
