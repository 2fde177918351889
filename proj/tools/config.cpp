#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace weaklinks::cli {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

nlohmann::json parse_value(const std::string& raw) {
  nlohmann::json v = nlohmann::json::parse(raw, nullptr, false);
  if (!v.is_discarded()) return v;
  return raw;  // bare strings need no quoting
}

void insert_dotted(nlohmann::json& root, const std::string& key, nlohmann::json value,
                   int line_no) {
  nlohmann::json* node = &root;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty key segment in '" + key +
                       "'");
    if (dot == std::string::npos) {
      if (node->contains(part))
        throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      (*node)[part] = std::move(value);
      return;
    }
    if (node->contains(part) && !(*node)[part].is_object())
      throw ParseError("line " + std::to_string(line_no) + ": key '" + key +
                       "' conflicts with an earlier scalar");
    node = &(*node)[part];
    start = dot + 1;
  }
}

const char* kTopKeys[] = {"mode", "seed",    "out",   "format",
                          "network", "params", "simulate", "compare", "sweep"};
const char* kNetworkKeys[] = {"kind", "name", "n", "m", "sizes", "weak", "endpoints",
                              "strong", "file", "labels"};
const char* kParamsKeys[] = {"lambda", "gamma", "phi", "epsilon", "tau", "beta"};
const char* kSimKeys[] = {"epochs", "burn_in", "replicas", "workers", "trace"};
const char* kCompareKeys[] = {"method", "networks", "epochs", "burn_in", "replicas", "workers"};
const char* kSweepKeys[] = {"kind",     "n_values", "axis",    "values",
                            "method",   "epochs",   "burn_in", "replicas", "workers"};

template <std::size_t N>
void check_keys(const nlohmann::json& obj, const char* (&allowed)[N], const char* where) {
  if (!obj.is_object())
    throw ValidationError(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(std::begin(allowed), std::end(allowed),
                     [&](const char* k) { return it.key() == k; }) == std::end(allowed))
      throw ValidationError("unknown key '" + it.key() + "' in " + where);
  }
}

double number_or(const nlohmann::json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    throw ValidationError(std::string("'") + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::vector<Edge> edges_from(const nlohmann::json& arr, const char* what) {
  std::vector<Edge> out;
  if (!arr.is_array()) throw ValidationError(std::string(what) + " must be a pair list");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw ValidationError(std::string(what) + " entries must be [i,j] pairs");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

}  // namespace

nlohmann::json parse_config_text(const std::string& text) {
  const std::string body = trim(text);
  if (body.empty()) throw ParseError("empty config");
  if (body.front() == '{') {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON config");
    return j;
  }

  nlohmann::json root = nlohmann::json::object();
  std::istringstream in(body);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string raw = trim(t.substr(eq + 1));
    if (key.empty() || raw.empty())
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    insert_dotted(root, key, parse_value(raw), line_no);
  }
  return root;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const nlohmann::json& config) {
  check_keys(config, kTopKeys, "config");
  if (!config.contains("mode") || !config.at("mode").is_string())
    throw ValidationError("config requires a string 'mode'");
  const std::string mode = config.at("mode").get<std::string>();
  static const std::vector<std::string> modes{"simulate", "exact",  "bounds",
                                              "compare",  "sweep",  "two_node"};
  if (std::find(modes.begin(), modes.end(), mode) == modes.end())
    throw ValidationError("unknown mode '" + mode + "'");

  if (config.contains("seed") &&
      (!config.at("seed").is_number_integer() ||
       (config.at("seed").is_number_integer() && !config.at("seed").is_number_unsigned() &&
        config.at("seed").get<long long>() < 0)))
    throw ValidationError("'seed' must be a non-negative integer");
  if (config.contains("format")) {
    const auto f = config.at("format");
    if (!f.is_string() || (f != "csv" && f != "json" && f != "both"))
      throw ValidationError("'format' must be csv, json or both");
  }
  if (config.contains("params")) check_keys(config.at("params"), kParamsKeys, "params");
  if (config.contains("network")) check_keys(config.at("network"), kNetworkKeys, "network");
  if (config.contains("simulate")) check_keys(config.at("simulate"), kSimKeys, "simulate");
  if (config.contains("sweep")) check_keys(config.at("sweep"), kSweepKeys, "sweep");
  if (config.contains("compare")) {
    check_keys(config.at("compare"), kCompareKeys, "compare");
    if (config.at("compare").contains("networks"))
      for (const auto& net : config.at("compare").at("networks"))
        check_keys(net, kNetworkKeys, "compare.networks entry");
  }

  if (mode == "simulate" || mode == "exact" || mode == "bounds") {
    if (!config.contains("network"))
      throw ValidationError("mode '" + mode + "' requires a 'network' section");
  } else if (mode == "compare") {
    if (!config.contains("compare") || !config.at("compare").contains("networks") ||
        !config.at("compare").at("networks").is_array() ||
        config.at("compare").at("networks").empty())
      throw ValidationError("mode 'compare' requires a nonempty 'compare.networks' list");
  } else if (mode == "sweep") {
    if (!config.contains("sweep") || !config.at("sweep").contains("kind"))
      throw ValidationError("mode 'sweep' requires 'sweep.kind'");
    const auto kind = config.at("sweep").at("kind");
    if (kind == "star_scaling") {
      if (!config.at("sweep").contains("n_values"))
        throw ValidationError("star_scaling sweep requires 'sweep.n_values'");
    } else if (kind == "param") {
      if (!config.at("sweep").contains("axis") || !config.at("sweep").contains("values"))
        throw ValidationError("param sweep requires 'sweep.axis' and 'sweep.values'");
      if (!config.contains("network"))
        throw ValidationError("param sweep requires a 'network' section");
    } else {
      throw ValidationError("unknown sweep kind");
    }
  }
}

NetworkSpec network_from_config(const nlohmann::json& net) {
  if (!net.is_object() || !net.contains("kind"))
    throw ValidationError("network section requires 'kind'");
  const std::string kind = net.at("kind").get<std::string>();
  auto require_int = [&](const char* key) {
    if (!net.contains(key) || !net.at(key).is_number_integer())
      throw ValidationError("network kind '" + kind + "' requires integer '" + key + "'");
    return net.at(key).get<int>();
  };

  if (kind == "clique") return gen_clique(require_int("n"));
  if (kind == "star") return gen_star(require_int("n"), require_int("m"));
  if (kind == "island") {
    if (!net.contains("sizes")) throw ValidationError("island network requires 'sizes'");
    std::vector<int> sizes = net.at("sizes").get<std::vector<int>>();
    std::vector<Edge> topo =
        net.contains("weak") ? edges_from(net.at("weak"), "network.weak") : std::vector<Edge>{};
    std::vector<Edge> endpoints = net.contains("endpoints")
                                      ? edges_from(net.at("endpoints"), "network.endpoints")
                                      : std::vector<Edge>{};
    return gen_island(sizes, topo, endpoints);
  }
  if (kind == "inline") {
    std::vector<std::string> labels;
    if (net.contains("labels")) labels = net.at("labels").get<std::vector<std::string>>();
    return build_network(
        require_int("n"),
        net.contains("strong") ? edges_from(net.at("strong"), "network.strong")
                               : std::vector<Edge>{},
        net.contains("weak") ? edges_from(net.at("weak"), "network.weak")
                             : std::vector<Edge>{},
        std::move(labels));
  }
  if (kind == "file") {
    if (!net.contains("file")) throw ValidationError("network kind 'file' requires 'file'");
    return load_network(net.at("file").get<std::string>());
  }
  throw ValidationError("unknown network kind '" + kind + "'");
}

SimParams params_from_config(const nlohmann::json& config) {
  SimParams p;
  if (config.contains("params")) {
    const auto& j = config.at("params");
    p.lambda = number_or(j, "lambda", 1.0);
    p.gamma = number_or(j, "gamma", 0.0);
    p.phi = number_or(j, "phi", 0.0);
    p.epsilon = number_or(j, "epsilon", 0.0);
    p.tau = number_or(j, "tau", 0.0);
    if (j.contains("beta")) p.beta = j.at("beta").get<double>();
  }
  if (config.contains("seed")) p.seed = config.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

}  // namespace weaklinks::cli
