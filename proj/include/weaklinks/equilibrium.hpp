#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weaklinks/network.hpp"

namespace weaklinks {

/// The three ways an agent can receive new (fully revealing) information.
enum class InfoKind { WeakLinkActivated, NeighborDisagrees, Tremble };

const char* to_string(InfoKind k);

struct InfoEvent {
  int agent;
  InfoKind kind;
  int revealed_best;  // the true better action at the event time
};

/// Diagnostic belief tracker; decisions never read it (full revelation plus
/// monotonicity pins the sign between arrivals).
struct BeliefState {
  double mu = 0.5;             // current belief that Action 1 is better
  double last_info_time = 0.0;
  double mu_at_last_info = 0.5;  // 0 or 1 after any arrival; 1/2 only initially
};

using ActionProfile = std::vector<std::uint8_t>;

/// Myopic argmax over both actions under full revelation.
/// `same_count` counts strong neighbors playing `current`, `other_count`
/// those playing the opposite action. Utility of action a is
/// 1{a == revealed_best} + tau * (neighbors playing a); ties go to
/// revealed_best.
int best_response(int current, int revealed_best, int same_count, int other_count, double tau);

struct CascadeStep {
  InfoEvent event;
  int action_before;
  int action_after;
};

struct CascadeResult {
  ActionProfile profile;
  std::vector<CascadeStep> log;
};

/// Deterministic best-response propagation after an information arrival.
/// Seeds (processed in ascending id order) already know `revealed_best`;
/// each dequeued agent best-responds, and any strong neighbor left
/// disagreeing after a seed or a switch receives a NeighborDisagrees
/// arrival and is enqueued. Agents only ever switch toward revealed_best;
/// at most one switch per agent per cascade.
CascadeResult cascade(const NetworkSpec& net, ActionProfile actions, std::vector<int> seeds,
                      int revealed_best, double tau, InfoKind seed_kind = InfoKind::NeighborDisagrees);

/// Belief at time t given the last arrival: (1 - e^{-lambda dt})/2 + e^{-lambda dt} mu(T).
double update_belief(const BeliefState& b, double t, double lambda);

/// Checks that no agent strictly gains from a unilateral deviation. Agents
/// with unknown state (no entry) are checked against the network payoff only,
/// at belief exactly 1/2.
bool verify_equilibrium(const NetworkSpec& net, const ActionProfile& actions,
                        const std::vector<std::optional<int>>& knowledge, double tau);

/// One JSON-lines record per cascade step:
/// {time, agent, kind, revealed_best, action_before, action_after}.
std::string cascade_log_to_jsonl(double time, const std::vector<CascadeStep>& log);

}  // namespace weaklinks
