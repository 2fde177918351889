#include "weaklinks/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace weaklinks {

void SimParams::validate() const {
  auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw ValidationError("lambda must be strictly positive");
  if (!finite_nonneg(gamma) || !finite_nonneg(phi) || !finite_nonneg(epsilon) ||
      !finite_nonneg(tau))
    throw ValidationError("rates and tau must be finite and non-negative");
  if (beta && (*beta < 0.0 || *beta >= 1.0))
    throw ValidationError("beta must lie in [0, 1)");
}

const char* to_string(Event::Kind k) {
  switch (k) {
    case Event::Kind::PayoffShock: return "payoff_shock";
    case Event::Kind::Tremble: return "tremble";
    case Event::Kind::WeakActivation: return "weak_activation";
    case Event::Kind::LinkRecovery: return "link_recovery";
    case Event::Kind::NullActivation: return "null_activation";
  }
  return "?";
}

namespace {

int inactive_count(const WorldState& s) {
  return static_cast<int>(
      std::count(s.link_state.begin(), s.link_state.end(), LinkState::Inactive));
}

std::vector<int> eligible_links(const WorldState& s, const NetworkSpec& net) {
  std::vector<int> out;
  for (std::size_t l = 0; l < net.weak_edges.size(); ++l) {
    const auto& [i, j] = net.weak_edges[l];
    if (s.link_state[l] == LinkState::Dormant && s.actions[i] != s.actions[j])
      out.push_back(static_cast<int>(l));
  }
  return out;
}

std::uint64_t dormant_mask(const WorldState& s) {
  std::uint64_t mask = 0;
  for (std::size_t l = 0; l < s.link_state.size(); ++l)
    if (s.link_state[l] == LinkState::Dormant) mask |= (1ULL << l);
  return mask;
}

double fraction_correct_of(const ActionProfile& actions, int better) {
  long hits = std::count(actions.begin(), actions.end(),
                         static_cast<std::uint8_t>(better));
  return static_cast<double>(hits) / static_cast<double>(actions.size());
}

EpochSnapshot take_snapshot(const WorldState& s) {
  EpochSnapshot snap;
  snap.k = s.epoch_index;
  snap.profile = s.actions;
  snap.better = s.better;
  snap.dormant = dormant_mask(s);
  snap.fraction_correct = fraction_correct_of(s.actions, s.better);
  return snap;
}

}  // namespace

WorldState init_state(const NetworkSpec& net, const SimParams& params, Rng& rng) {
  params.validate();
  if (net.weak_edges.size() > 64)
    throw CapacityError("engine supports at most 64 weak links");
  WorldState s;
  s.t = 0.0;
  s.actions.assign(net.n, 0);
  s.better = std::uniform_int_distribution<int>(0, 1)(rng);
  s.link_state.assign(net.weak_edges.size(), LinkState::Dormant);
  s.epoch_index = 0;
  return s;
}

Event next_event(const WorldState& state, const NetworkSpec& net, const SimParams& params,
                 Rng& rng) {
  const double recovery_rate = params.phi * inactive_count(state);
  const double total = params.lambda + params.epsilon + params.gamma + recovery_rate;

  std::exponential_distribution<double> gap(total);
  Event ev;
  ev.time = state.t + gap(rng);

  double pick = std::uniform_real_distribution<double>(0.0, total)(rng);
  if (pick < params.lambda) {
    ev.kind = Event::Kind::PayoffShock;
    return ev;
  }
  pick -= params.lambda;
  if (pick < params.epsilon) {
    ev.kind = Event::Kind::Tremble;
    ev.agent = std::uniform_int_distribution<int>(0, net.n - 1)(rng);
    return ev;
  }
  pick -= params.epsilon;
  if (pick < params.gamma) {
    auto eligible = eligible_links(state, net);
    if (eligible.empty()) {
      ev.kind = Event::Kind::NullActivation;
    } else {
      ev.kind = Event::Kind::WeakActivation;
      ev.link = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
    }
    return ev;
  }
  // link recovery: uniform over inactive links
  std::vector<int> inactive;
  for (std::size_t l = 0; l < state.link_state.size(); ++l)
    if (state.link_state[l] == LinkState::Inactive) inactive.push_back(static_cast<int>(l));
  if (inactive.empty()) throw InternalError("recovery clock fired with no inactive links");
  ev.kind = Event::Kind::LinkRecovery;
  ev.link = inactive[std::uniform_int_distribution<std::size_t>(0, inactive.size() - 1)(rng)];
  return ev;
}

ApplyResult apply_event(WorldState& state, const Event& event, const NetworkSpec& net,
                        const SimParams& params, Rng& rng) {
  if (event.time < state.t) throw ValidationError("event time precedes current clock");
  state.t = event.time;
  ApplyResult result;

  switch (event.kind) {
    case Event::Kind::PayoffShock: {
      result.snapshot = take_snapshot(state);
      state.better = std::uniform_int_distribution<int>(0, 1)(rng);  // may stay unchanged
      ++state.epoch_index;
      break;
    }
    case Event::Kind::WeakActivation: {
      const auto& [i, j] = net.weak_edges[event.link];
      if (state.link_state[event.link] != LinkState::Dormant)
        throw InternalError("activation of a non-dormant weak link");
      if (state.actions[i] == state.actions[j])
        throw InternalError("activation of a weak link with agreeing endpoints");
      auto res = cascade(net, state.actions, {i, j}, state.better, params.tau,
                         InfoKind::WeakLinkActivated);
      state.actions = std::move(res.profile);
      result.info_log = std::move(res.log);
      state.link_state[event.link] = LinkState::Inactive;
      break;
    }
    case Event::Kind::Tremble: {
      const int agent = event.agent;
      const int original = state.actions[agent];
      const int forced = 1 - original;
      int same = 0, other = 0;
      for (int j : net.strong_adj[agent])
        (state.actions[j] == forced ? same : other)++;
      // full argmax for the trembler: the momentary flip persists only if it
      // beats reverting, which also handles a forced flip in the frozen regime
      const int settled = best_response(forced, state.better, same, other, params.tau);
      if (settled == original) {
        result.info_log.push_back(
            {{agent, InfoKind::Tremble, state.better}, original, original});
      } else {
        state.actions[agent] = static_cast<std::uint8_t>(forced);
        auto res = cascade(net, state.actions, {agent}, state.better, params.tau,
                           InfoKind::Tremble);
        state.actions = std::move(res.profile);
        result.info_log = std::move(res.log);
        // the forced flip happened outside the cascade; restore the true "before"
        result.info_log.front().action_before = original;
      }
      break;
    }
    case Event::Kind::LinkRecovery: {
      if (state.link_state[event.link] != LinkState::Inactive)
        throw InternalError("recovery of a link that is not inactive");
      state.link_state[event.link] = LinkState::Dormant;
      break;
    }
    case Event::Kind::NullActivation:
      break;
  }
  return result;
}

std::vector<EpochSnapshot> run_epochs(const NetworkSpec& net, const SimParams& params,
                                      long epochs, long burn_in, Rng& rng) {
  if (epochs <= 0) throw ValidationError("epochs must be positive");
  if (burn_in < 0 || burn_in >= epochs)
    throw ValidationError("burn_in must satisfy 0 <= burn_in < epochs");

  WorldState state = init_state(net, params, rng);
  std::vector<EpochSnapshot> retained;
  retained.reserve(epochs - burn_in);
  while (state.epoch_index < epochs) {
    Event ev = next_event(state, net, params, rng);
    auto res = apply_event(state, ev, net, params, rng);
    if (res.snapshot && res.snapshot->k >= burn_in)
      retained.push_back(std::move(*res.snapshot));
  }
  return retained;
}

WelfareEstimate WelfareEstimate::exact(double value, Method m) {
  WelfareEstimate e;
  e.mean = value;
  e.stderror = 0.0;
  e.ci_lo = value;
  e.ci_hi = value;
  e.method = m;
  return e;
}

const char* to_string(WelfareEstimate::Method m) {
  switch (m) {
    case WelfareEstimate::Method::MonteCarlo: return "monte_carlo";
    case WelfareEstimate::Method::ExactAMC: return "exact_amc";
    case WelfareEstimate::Method::ClosedForm: return "closed_form";
  }
  return "?";
}

WelfareEstimate estimate_welfare(const NetworkSpec& net, const SimParams& params, long epochs,
                                 long burn_in, int replicas, int workers) {
  if (replicas < 1) throw ValidationError("replicas must be at least 1");
  params.validate();

  struct ReplicaResult {
    double mean;
    double sq_sum;  // sum of squared snapshot values, for the 1-replica fallback
    long count;
  };
  auto run_one = [&](int r) {
    Rng rng = make_rng(params.seed, static_cast<std::uint64_t>(r));
    auto snaps = run_epochs(net, params, epochs, burn_in, rng);
    double sum = 0.0, sq = 0.0;
    for (const auto& s : snaps) {
      sum += s.fraction_correct;
      sq += s.fraction_correct * s.fraction_correct;
    }
    const long c = static_cast<long>(snaps.size());
    return ReplicaResult{sum / c, sq, c};
  };

  int pool = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  if (pool < 1) pool = 1;

  std::vector<ReplicaResult> results(replicas);
  for (int start = 0; start < replicas; start += pool) {
    const int end = std::min(replicas, start + pool);
    std::vector<std::future<ReplicaResult>> futures;
    for (int r = start; r < end; ++r)
      futures.push_back(std::async(std::launch::async, run_one, r));
    for (int r = start; r < end; ++r) results[r] = futures[r - start].get();
  }

  WelfareEstimate est;
  est.replicas = replicas;
  est.method = WelfareEstimate::Method::MonteCarlo;
  long total = 0;
  double mean = 0.0;
  for (const auto& r : results) {
    total += r.count;
    mean += r.mean * r.count;
  }
  mean /= total;
  est.mean = mean;
  est.epochs_used = total;

  if (replicas > 1) {
    double var = 0.0;
    for (const auto& r : results) var += (r.mean - mean) * (r.mean - mean);
    var /= (replicas - 1);
    est.stderror = std::sqrt(var / replicas);
  } else {
    const auto& r = results[0];
    double var = (r.sq_sum - r.count * mean * mean) / std::max<long>(r.count - 1, 1);
    est.stderror = std::sqrt(std::max(var, 0.0) / r.count);
  }
  est.ci_lo = est.mean - 1.96 * est.stderror;
  est.ci_hi = est.mean + 1.96 * est.stderror;
  return est;
}

std::string event_trace_jsonl(const Event& event, const WorldState& after) {
  nlohmann::json payload = nlohmann::json::object();
  if (event.agent >= 0) payload["agent"] = event.agent;
  if (event.link >= 0) payload["link"] = event.link;

  nlohmann::json rle = nlohmann::json::array();
  std::size_t i = 0;
  while (i < after.actions.size()) {
    std::size_t j = i;
    while (j < after.actions.size() && after.actions[j] == after.actions[i]) ++j;
    rle.push_back({static_cast<int>(after.actions[i]), static_cast<int>(j - i)});
    i = j;
  }
  nlohmann::json rec{{"t", event.time},
                     {"kind", to_string(event.kind)},
                     {"payload", payload},
                     {"actions_after", rle},
                     {"better", after.better}};
  return rec.dump() + "\n";
}

std::string snapshots_to_csv(const std::vector<EpochSnapshot>& snaps) {
  std::ostringstream os;
  os << "k,R,fraction_correct,dormant_count\n";
  for (const auto& s : snaps)
    os << s.k << "," << s.better << "," << s.fraction_correct << ","
       << std::popcount(s.dormant) << "\n";
  return os.str();
}

}  // namespace weaklinks
