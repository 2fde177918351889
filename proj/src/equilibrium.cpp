#include "weaklinks/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <json.hpp>

namespace weaklinks {

const char* to_string(InfoKind k) {
  switch (k) {
    case InfoKind::WeakLinkActivated: return "weak_link_activated";
    case InfoKind::NeighborDisagrees: return "neighbor_disagrees";
    case InfoKind::Tremble: return "tremble";
  }
  return "?";
}

int best_response(int current, int revealed_best, int same_count, int other_count, double tau) {
  const int opposite = 1 - current;
  const double u_current = (current == revealed_best ? 1.0 : 0.0) + tau * same_count;
  const double u_opposite = (opposite == revealed_best ? 1.0 : 0.0) + tau * other_count;
  if (u_opposite > u_current) return opposite;
  if (u_opposite < u_current) return current;
  return revealed_best;  // tie
}

CascadeResult cascade(const NetworkSpec& net, ActionProfile actions, std::vector<int> seeds,
                      int revealed_best, double tau, InfoKind seed_kind) {
  CascadeResult result;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  struct Item {
    int agent;
    InfoKind kind;
    bool is_seed;  // seeds broadcast disagreement even when they do not switch
  };
  std::deque<Item> queue;
  std::vector<bool> queued(net.n, false);
  std::vector<bool> switched(net.n, false);
  for (int s : seeds) {
    if (s < 0 || s >= net.n) throw ValidationError("cascade seed out of range");
    queue.push_back({s, seed_kind, true});
    queued[s] = true;
  }

  while (!queue.empty()) {
    auto [i, kind, is_seed] = queue.front();
    queue.pop_front();
    queued[i] = false;

    const int before = actions[i];
    int after = before;
    if (before != revealed_best) {
      int same = 0, other = 0;
      for (int j : net.strong_adj[i]) (actions[j] == before ? same : other)++;
      after = best_response(before, revealed_best, same, other, tau);
    }
    result.log.push_back({{i, kind, revealed_best}, before, after});

    const bool changed = (after != before);
    if (changed) {
      if (switched[i]) throw InternalError("agent switched twice in one cascade");
      switched[i] = true;
      actions[i] = static_cast<std::uint8_t>(after);
    }
    // switches can unlock a neighbor that declined earlier, so re-enqueueing
    // is allowed; each switch happens once, which bounds the queue traffic
    if (changed || is_seed) {
      for (int j : net.strong_adj[i]) {
        if (actions[j] != actions[i] && !queued[j]) {
          queue.push_back({j, InfoKind::NeighborDisagrees, false});
          queued[j] = true;
        }
      }
    }
  }

  result.profile = std::move(actions);
  return result;
}

double update_belief(const BeliefState& b, double t, double lambda) {
  if (t < b.last_info_time)
    throw ValidationError("update_belief queried before the last information arrival");
  if (lambda < 0) throw ValidationError("lambda must be non-negative");
  const double decay = std::exp(-lambda * (t - b.last_info_time));
  return (1.0 - decay) * 0.5 + decay * b.mu_at_last_info;
}

bool verify_equilibrium(const NetworkSpec& net, const ActionProfile& actions,
                        const std::vector<std::optional<int>>& knowledge, double tau) {
  if (static_cast<int>(actions.size()) != net.n ||
      static_cast<int>(knowledge.size()) != net.n)
    throw ValidationError("profile and knowledge must cover every agent");

  for (int i = 0; i < net.n; ++i) {
    const int a = actions[i];
    int same = 0, other = 0;
    for (int j : net.strong_adj[i]) (actions[j] == a ? same : other)++;
    if (knowledge[i].has_value()) {
      const int rb = *knowledge[i];
      const double u_play = (a == rb ? 1.0 : 0.0) + tau * same;
      const double u_dev = (1 - a == rb ? 1.0 : 0.0) + tau * other;
      if (u_dev > u_play) return false;
    } else {
      // belief exactly 1/2: material term cancels, network term decides
      if (tau * other > tau * same) return false;
    }
  }
  return true;
}

std::string cascade_log_to_jsonl(double time, const std::vector<CascadeStep>& log) {
  std::ostringstream os;
  for (const auto& step : log) {
    nlohmann::json j{{"time", time},
                     {"agent", step.event.agent},
                     {"kind", to_string(step.event.kind)},
                     {"revealed_best", step.event.revealed_best},
                     {"action_before", step.action_before},
                     {"action_after", step.action_after}};
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace weaklinks
