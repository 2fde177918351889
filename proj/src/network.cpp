#include "weaklinks/network.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace weaklinks {

namespace {

Edge normalize(Edge e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  return e;
}

void check_edges(int n, std::vector<Edge>& edges, const char* which) {
  for (auto& e : edges) {
    e = normalize(e);
    if (e.first == e.second)
      throw ValidationError(std::string(which) + " edge (" + std::to_string(e.first) +
                            "," + std::to_string(e.second) + ") is a self-loop");
    if (e.first < 0 || e.second >= n)
      throw ValidationError(std::string(which) + " edge (" + std::to_string(e.first) +
                            "," + std::to_string(e.second) + ") has an endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw ValidationError(std::string(which) + " edge list has a duplicate pair");
}

// Union-find over agent ids, path halving.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep lowest index as root
    parent[b] = a;
  }
};

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Coordinated: return "coordinated";
    case Regime::Frozen: return "frozen";
    case Regime::Intermediate: return "intermediate";
  }
  return "?";
}

NetworkSpec build_network(int n, std::vector<Edge> strong, std::vector<Edge> weak,
                          std::vector<std::string> labels) {
  if (n <= 0) throw ValidationError("agent count must be positive");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw ValidationError("labels must be empty or one per node");
  check_edges(n, strong, "strong");
  check_edges(n, weak, "weak");

  std::vector<Edge> both;
  std::set_intersection(strong.begin(), strong.end(), weak.begin(), weak.end(),
                        std::back_inserter(both));
  if (!both.empty())
    throw ValidationError("pair (" + std::to_string(both[0].first) + "," +
                          std::to_string(both[0].second) + ") appears in both edge sets");

  NetworkSpec net;
  net.n = n;
  net.strong_edges = std::move(strong);
  net.weak_edges = std::move(weak);
  net.labels = std::move(labels);
  net.strong_adj.assign(n, {});
  for (const auto& [i, j] : net.strong_edges) {
    net.strong_adj[i].push_back(j);
    net.strong_adj[j].push_back(i);
  }
  net.strong_degree.resize(n);
  for (int i = 0; i < n; ++i) {
    std::sort(net.strong_adj[i].begin(), net.strong_adj[i].end());
    net.strong_degree[i] = static_cast<int>(net.strong_adj[i].size());
  }
  net.d_max = *std::max_element(net.strong_degree.begin(), net.strong_degree.end());
  net.d_min = *std::min_element(net.strong_degree.begin(), net.strong_degree.end());
  return net;
}

ComponentPartition strong_components(const NetworkSpec& net) {
  UnionFind uf(net.n);
  for (const auto& [i, j] : net.strong_edges) uf.unite(i, j);

  ComponentPartition part;
  part.component_of.assign(net.n, -1);
  for (int v = 0; v < net.n; ++v) {
    int root = uf.find(v);
    if (part.component_of[root] < 0) {
      part.component_of[root] = static_cast<int>(part.component_sizes.size());
      part.component_sizes.push_back(0);
    }
    part.component_of[v] = part.component_of[root];
    ++part.component_sizes[part.component_of[v]];
  }
  part.sizes = part.component_sizes;
  std::sort(part.sizes.rbegin(), part.sizes.rend());
  return part;
}

Regime classify_regime(const NetworkSpec& net, double tau) {
  if (tau < 0) throw ValidationError("tau must be non-negative");
  if (net.d_max == 0) return Regime::Coordinated;  // no strong neighbors anywhere
  if (tau <= 1.0 / net.d_max) return Regime::Coordinated;
  if (net.d_min > 0 && tau > 1.0 / net.d_min) return Regime::Frozen;
  return Regime::Intermediate;
}

NetworkSpec gen_clique(int n) {
  std::vector<Edge> strong;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) strong.emplace_back(i, j);
  return build_network(n, std::move(strong), {});
}

NetworkSpec gen_island(const std::vector<int>& sizes, const std::vector<Edge>& weak_topology,
                       const std::vector<Edge>& endpoint_override) {
  if (sizes.empty()) throw ValidationError("island sizes must be nonempty");
  const int k = static_cast<int>(sizes.size());
  std::vector<int> offset(k + 1, 0);
  for (int c = 0; c < k; ++c) {
    if (sizes[c] <= 0) throw ValidationError("island of size 0");
    offset[c + 1] = offset[c] + sizes[c];
  }
  const int n = offset[k];

  std::vector<Edge> strong;
  for (int c = 0; c < k; ++c)
    for (int i = offset[c]; i < offset[c + 1]; ++i)
      for (int j = i + 1; j < offset[c + 1]; ++j) strong.emplace_back(i, j);

  if (!endpoint_override.empty() && endpoint_override.size() != weak_topology.size())
    throw ValidationError("endpoint override must match the weak topology length");

  std::vector<int> island_of(n);
  for (int c = 0; c < k; ++c)
    for (int i = offset[c]; i < offset[c + 1]; ++i) island_of[i] = c;

  std::vector<Edge> weak;
  for (std::size_t l = 0; l < weak_topology.size(); ++l) {
    auto [a, b] = weak_topology[l];
    if (a < 0 || a >= k || b < 0 || b >= k)
      throw ValidationError("weak topology references an invalid island");
    if (a == b) throw ValidationError("weak self-link between same island");
    if (endpoint_override.empty()) {
      weak.emplace_back(offset[a], offset[b]);  // lowest-index representatives
    } else {
      auto [u, v] = endpoint_override[l];
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw ValidationError("weak endpoint override out of range");
      if (island_of[u] != a || island_of[v] != b)
        throw ValidationError("weak endpoint override does not lie on the requested islands");
      weak.emplace_back(u, v);
    }
  }
  return build_network(n, std::move(strong), std::move(weak));
}

NetworkSpec gen_star(int n, int m) {
  if (m < 1 || n <= m) throw ValidationError("star network requires n > m >= 1");
  std::vector<int> sizes(m, 1);
  sizes[0] = n - m + 1;
  std::vector<Edge> topo;
  for (int leaf = 1; leaf < m; ++leaf) topo.emplace_back(0, leaf);
  return gen_island(sizes, topo);
}

bool is_island_network(const NetworkSpec& net) {
  auto part = strong_components(net);
  // every component a clique
  std::vector<long> internal_edges(part.count(), 0);
  for (const auto& [i, j] : net.strong_edges) {
    if (part.component_of[i] != part.component_of[j]) return false;  // unreachable
    ++internal_edges[part.component_of[i]];
  }
  for (int c = 0; c < part.count(); ++c) {
    long s = part.component_sizes[c];
    if (internal_edges[c] != s * (s - 1) / 2) return false;
  }
  for (const auto& [i, j] : net.weak_edges)
    if (part.component_of[i] == part.component_of[j]) return false;
  return true;
}

std::string to_network_json(const NetworkSpec& net) {
  nlohmann::json j;
  j["n"] = net.n;
  j["strong"] = nlohmann::json::array();
  for (const auto& [a, b] : net.strong_edges) j["strong"].push_back({a, b});
  j["weak"] = nlohmann::json::array();
  for (const auto& [a, b] : net.weak_edges) j["weak"].push_back({a, b});
  if (!net.labels.empty()) j["labels"] = net.labels;
  return j.dump(2);
}

std::string canonical_string(const NetworkSpec& net) {
  // edge lists are already normalized and sorted; labels excluded
  std::ostringstream os;
  os << "n=" << net.n << ";s=";
  for (const auto& [a, b] : net.strong_edges) os << a << "-" << b << ",";
  os << ";w=";
  for (const auto& [a, b] : net.weak_edges) os << a << "-" << b << ",";
  return os.str();
}

std::string spec_hash(const NetworkSpec& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_string(net)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

NetworkSpec network_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad network document: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n"))
    throw ParseError("network document must be an object with field 'n'");
  auto read_edges = [&](const char* field) {
    std::vector<Edge> out;
    if (!j.contains(field)) return out;
    for (const auto& e : j.at(field)) {
      if (!e.is_array() || e.size() != 2) throw ParseError("edge entries must be [i,j] pairs");
      out.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return out;
  };
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  return build_network(j.at("n").get<int>(), read_edges("strong"), read_edges("weak"),
                       std::move(labels));
}

NetworkSpec load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_json_text(ss.str());
}

void save_network(const NetworkSpec& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write network file: " + path);
  out << to_network_json(net) << "\n";
}

}  // namespace weaklinks
