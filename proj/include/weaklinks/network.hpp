#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "weaklinks/errors.hpp"

namespace weaklinks {

/// Unordered agent pair, normalized to first < second.
using Edge = std::pair<int, int>;

/// Validated graph of strong and weak links with derived degree statistics.
/// Immutable after construction; safe to share across threads.
struct NetworkSpec {
  int n = 0;
  std::vector<Edge> strong_edges;  // sorted, unique, normalized
  std::vector<Edge> weak_edges;    // sorted, unique, disjoint from strong
  std::vector<std::string> labels; // empty or one per node

  // derived
  std::vector<std::vector<int>> strong_adj;
  std::vector<int> strong_degree;
  int d_max = 0;
  int d_min = 0;
};

/// Partition of agents by strong-link connectivity (weak links ignored).
struct ComponentPartition {
  std::vector<int> component_of;      // agent -> component id (ids by lowest member)
  std::vector<int> component_sizes;   // indexed by component id
  std::vector<int> sizes;             // same counts, sorted descending
  int count() const { return static_cast<int>(component_sizes.size()); }
};

/// Equilibrium regime implied by tau and the degree range.
enum class Regime {
  Coordinated,   // tau <= 1/d_max: strong components act uniformly
  Frozen,        // tau >  1/d_min: nobody ever switches
  Intermediate,  // heterogeneous equilibria possible
};

const char* to_string(Regime r);

NetworkSpec build_network(int n, std::vector<Edge> strong, std::vector<Edge> weak,
                          std::vector<std::string> labels = {});

ComponentPartition strong_components(const NetworkSpec& net);

Regime classify_regime(const NetworkSpec& net, double tau);

/// Complete strong graph on n nodes, no weak links.
NetworkSpec gen_clique(int n);

/// Islands of internal strong cliques; one weak link per island-id pair in
/// `weak_topology`, attached at each island's lowest-index node. Pass
/// `endpoint_override` (same length as `weak_topology`) to pick explicit
/// node endpoints instead.
NetworkSpec gen_island(const std::vector<int>& sizes,
                       const std::vector<Edge>& weak_topology,
                       const std::vector<Edge>& endpoint_override = {});

/// Star network: core clique of n-m+1 nodes plus m-1 singleton leaves, each
/// leaf weakly linked to the core representative.
NetworkSpec gen_star(int n, int m);

/// True when every strong component induces a clique and all weak links run
/// between distinct components.
bool is_island_network(const NetworkSpec& net);

/// Canonical normalized text form (sorted pairs); stable across equal networks.
std::string canonical_string(const NetworkSpec& net);

/// FNV-1a 64-bit hash of the canonical form, hex-encoded.
std::string spec_hash(const NetworkSpec& net);

/// Network file format: JSON document with fields n, strong, weak, labels.
std::string to_network_json(const NetworkSpec& net);
NetworkSpec network_from_json_text(const std::string& text);
NetworkSpec load_network(const std::string& path);
void save_network(const NetworkSpec& net, const std::string& path);

}  // namespace weaklinks
