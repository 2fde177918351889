#include "cli.hpp"

namespace weaklinks::cli {

namespace {

using nlohmann::json;

json island_entry(const std::string& name, std::vector<int> sizes) {
  json weak = json::array();
  for (std::size_t i = 1; i < sizes.size(); ++i) weak.push_back({0, static_cast<int>(i)});
  return json{{"kind", "island"}, {"name", name}, {"sizes", sizes}, {"weak", weak}};
}

json make_preset(const std::string& name) {
  if (name == "no_weak_clique") {
    return json{
        {"mode", "compare"},
        {"seed", 20240501},
        {"params", {{"lambda", 1.0}, {"epsilon", 0.1}, {"tau", 0.1}}},
        {"compare",
         {{"method", "monte_carlo"},
          {"epochs", 20000},
          {"burn_in", 500},
          {"replicas", 4},
          {"networks",
           {json{{"kind", "clique"}, {"name", "clique1"}, {"n", 1}},
            json{{"kind", "clique"}, {"name", "clique3"}, {"n", 3}},
            json{{"kind", "clique"}, {"name", "clique6"}, {"n", 6}}}}}},
    };
  }
  if (name == "frozen_clique") {
    return json{
        {"mode", "exact"},
        {"network", {{"kind", "clique"}, {"n", 4}}},
        {"params", {{"lambda", 1.0}, {"epsilon", 0.1}, {"tau", 0.5}}},
    };
  }
  if (name == "two_node") {
    return json{
        {"mode", "two_node"},
        {"params",
         {{"lambda", 1.0}, {"epsilon", 0.1}, {"gamma", 1.0}, {"phi", 1e4}}},
    };
  }
  if (name == "island_bound_grid") {
    return json{
        {"mode", "compare"},
        {"params",
         {{"lambda", 1.0}, {"epsilon", 0.01}, {"gamma", 2.0}, {"phi", 1e4}, {"tau", 0.1}}},
        {"compare",
         {{"method", "exact"},
          {"networks",
           {island_entry("split_6", {6}), island_entry("split_5_1", {5, 1}),
            island_entry("split_4_2", {4, 2}), island_entry("split_3_3", {3, 3}),
            island_entry("split_4_1_1", {4, 1, 1}), island_entry("split_3_2_1", {3, 2, 1}),
            island_entry("split_2_2_2", {2, 2, 2})}}}},
    };
  }
  if (name == "star_vs_islands_exact") {
    return json{
        {"mode", "compare"},
        {"params",
         {{"lambda", 1.0}, {"epsilon", 1e-4}, {"gamma", 2.0}, {"phi", 1e4}, {"tau", 0.1}}},
        {"compare",
         {{"method", "exact"},
          {"networks",
           {island_entry("star_4_1_1", {4, 1, 1}), island_entry("split_3_2_1", {3, 2, 1}),
            island_entry("split_2_2_2", {2, 2, 2})}}}},
    };
  }
  if (name == "star_scaling") {
    return json{
        {"mode", "sweep"},
        {"seed", 20240502},
        {"params", {{"lambda", 1.0}}},
        {"sweep",
         {{"kind", "star_scaling"},
          {"n_values", {9, 25, 64, 144}},
          {"epochs", 20000},
          {"burn_in", 1000},
          {"replicas", 8}}},
    };
  }
  throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"no_weak_clique",    "frozen_clique",        "two_node",
          "island_bound_grid", "star_vs_islands_exact", "star_scaling"};
}

nlohmann::json preset_config(const std::string& name) { return make_preset(name); }

}  // namespace weaklinks::cli
