#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weaklinks/equilibrium.hpp"
#include "weaklinks/network.hpp"
#include "weaklinks/rng.hpp"

namespace weaklinks {

/// Rates and game parameters for one run.
struct SimParams {
  double lambda = 1.0;   // payoff-shock rate (> 0)
  double gamma = 0.0;    // weak-activation clock rate
  double phi = 0.0;      // inactive -> dormant recovery rate, per link
  double epsilon = 0.0;  // tremble clock rate
  double tau = 0.0;      // local-interaction weight
  std::optional<double> beta;  // discount factor, only read by the bound calculator
  std::uint64_t seed = 0;

  void validate() const;
};

enum class LinkState : std::uint8_t { Dormant, Inactive };

struct WorldState {
  double t = 0.0;
  ActionProfile actions;
  int better = 0;  // the action with the higher material payoff, A(t)
  std::vector<LinkState> link_state;  // per weak link, aligned with net.weak_edges
  long epoch_index = 0;
};

struct Event {
  enum class Kind { PayoffShock, Tremble, WeakActivation, LinkRecovery, NullActivation };
  double time = 0.0;
  Kind kind = Kind::PayoffShock;
  int agent = -1;  // Tremble
  int link = -1;   // WeakActivation / LinkRecovery
};

const char* to_string(Event::Kind k);

/// State observed at a payoff shock T_k, before the reward redraw.
struct EpochSnapshot {
  long k = 0;
  ActionProfile profile;      // P
  int better = 0;             // R, the action that was better over the ending epoch
  std::uint64_t dormant = 0;  // B as a bitmask over weak-link indices
  double fraction_correct = 0.0;
};

WorldState init_state(const NetworkSpec& net, const SimParams& params, Rng& rng);

Event next_event(const WorldState& state, const NetworkSpec& net, const SimParams& params,
                 Rng& rng);

struct ApplyResult {
  std::optional<EpochSnapshot> snapshot;
  std::vector<CascadeStep> info_log;
};

ApplyResult apply_event(WorldState& state, const Event& event, const NetworkSpec& net,
                        const SimParams& params, Rng& rng);

std::vector<EpochSnapshot> run_epochs(const NetworkSpec& net, const SimParams& params,
                                      long epochs, long burn_in, Rng& rng);

struct WelfareEstimate {
  enum class Method { MonteCarlo, ExactAMC, ClosedForm };
  double mean = 0.0;
  double stderror = 0.0;
  double ci_lo = 0.0;  // 95% normal approximation
  double ci_hi = 0.0;
  long epochs_used = 0;
  int replicas = 0;
  Method method = Method::MonteCarlo;

  static WelfareEstimate exact(double value, Method m = Method::ExactAMC);
};

const char* to_string(WelfareEstimate::Method m);

/// Pools retained snapshots across independently seeded replicas; the
/// standard error comes from the spread of replica means. Replicas run in
/// parallel (up to `workers` threads, 0 = hardware default) and merge
/// deterministically by index.
WelfareEstimate estimate_welfare(const NetworkSpec& net, const SimParams& params, long epochs,
                                 long burn_in, int replicas, int workers = 0);

/// Trace record for one engine event: {t, kind, payload, actions_after (RLE), better}.
std::string event_trace_jsonl(const Event& event, const WorldState& after);

/// Snapshot CSV: header "k,R,fraction_correct,dormant_count" plus one row each.
std::string snapshots_to_csv(const std::vector<EpochSnapshot>& snaps);

}  // namespace weaklinks
