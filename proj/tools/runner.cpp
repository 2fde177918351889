#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "weaklinks/amc.hpp"
#include "weaklinks/welfare.hpp"

namespace weaklinks::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string hash_text(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct OutputSink {
  std::filesystem::path dir;
  bool want_csv = true;
  bool want_json = true;

  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write output file: " + (dir / name).string());
    out << content;
  }
  void results(const std::string& csv, const json& j) const {
    if (want_csv) write("results.csv", csv);
    if (want_json) write("results.json", j.dump(2) + "\n");
  }
};

long integer_or(const json& obj, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer())
    throw ValidationError(std::string("'") + key + "' must be an integer");
  return obj.at(key).get<long>();
}

MonteCarloBudget budget_from(const json& section) {
  MonteCarloBudget b;
  b.epochs = integer_or(section, "epochs", 10000);
  b.burn_in = integer_or(section, "burn_in", std::min<long>(1000, b.epochs / 10));
  b.replicas = static_cast<int>(integer_or(section, "replicas", 4));
  b.workers = static_cast<int>(integer_or(section, "workers", 0));
  return b;
}

json estimate_json(const WelfareEstimate& e) {
  return json{{"method", to_string(e.method)}, {"welfare", e.mean},
              {"stderr", e.stderror},          {"ci_lo", e.ci_lo},
              {"ci_hi", e.ci_hi},              {"epochs_used", e.epochs_used},
              {"replicas", e.replicas}};
}

void write_trace(const OutputSink& sink, const NetworkSpec& net, const SimParams& params,
                 long epochs) {
  std::ostringstream trace;
  std::vector<EpochSnapshot> snaps;
  Rng rng = make_rng(params.seed, 0);
  WorldState state = init_state(net, params, rng);
  while (state.epoch_index < epochs) {
    Event ev = next_event(state, net, params, rng);
    auto res = apply_event(state, ev, net, params, rng);
    trace << event_trace_jsonl(ev, state);
    if (res.snapshot) snaps.push_back(std::move(*res.snapshot));
  }
  sink.write("trace.jsonl", trace.str());
  sink.write("snapshots.csv", snapshots_to_csv(snaps));
}

int run_simulate(const json& config, const OutputSink& sink, bool trace, int workers) {
  const NetworkSpec net = network_from_config(config.at("network"));
  const SimParams params = params_from_config(config);
  json section = config.contains("simulate") ? config.at("simulate") : json::object();
  MonteCarloBudget budget = budget_from(section);
  if (workers > 0) budget.workers = workers;
  if (section.contains("trace") && section.at("trace").get<bool>()) trace = true;

  const auto est = estimate_welfare(net, params, budget.epochs, budget.burn_in,
                                    budget.replicas, budget.workers);
  std::ostringstream csv;
  csv << "hash,n,regime,method,welfare,stderr,ci_lo,ci_hi,epochs_used,replicas\n"
      << spec_hash(net) << "," << net.n << "," << to_string(classify_regime(net, params.tau))
      << "," << to_string(est.method) << "," << fmt(est.mean) << "," << fmt(est.stderror)
      << "," << fmt(est.ci_lo) << "," << fmt(est.ci_hi) << "," << est.epochs_used << ","
      << est.replicas << "\n";
  json j = estimate_json(est);
  j["hash"] = spec_hash(net);
  j["n"] = net.n;
  j["regime"] = to_string(classify_regime(net, params.tau));
  sink.results(csv.str(), j);

  if (trace) write_trace(sink, net, params, budget.epochs);
  return 0;
}

int run_exact(const json& config, const OutputSink& sink) {
  const NetworkSpec net = network_from_config(config.at("network"));
  const SimParams params = params_from_config(config);
  AmcModel model = build_amc(net, params);
  sink.write("model.json", amc_model_json(model) + "\n");

  std::ostringstream csv;
  csv << "hash,n,regime,states,welfare,p_raw,p_conditional,eta_cg\n"
      << spec_hash(net) << "," << net.n << "," << to_string(model.regime) << ","
      << model.states.size() << "," << fmt(model.welfare) << "," << fmt(model.p_raw) << ","
      << (std::isnan(model.p_conditional) ? "" : fmt(model.p_conditional)) << ","
      << fmt(model.eta_cg) << "\n";
  json j{{"hash", spec_hash(net)},
         {"n", net.n},
         {"regime", to_string(model.regime)},
         {"states", model.states.size()},
         {"welfare", model.welfare},
         {"p_raw", model.p_raw},
         {"eta_cg", model.eta_cg},
         {"dk", model.dk}};
  if (!std::isnan(model.p_conditional)) j["p_conditional"] = model.p_conditional;
  sink.results(csv.str(), j);
  return 0;
}

int run_bounds(const json& config, const OutputSink& sink) {
  const NetworkSpec net = network_from_config(config.at("network"));
  const SimParams params = params_from_config(config);
  json j{{"hash", spec_hash(net)},
         {"tremble_learn_prob", tremble_learn_prob(params.lambda, params.epsilon)},
         {"no_weak_bound", bound_no_weak(params.lambda, params.epsilon)}};
  if (net.d_min >= 1) {
    const double bd = bound_discount(params.tau, net.d_min, net.d_max);
    j["discount_bound"] = bd;
    if (params.beta) j["beta_below_bound"] = *params.beta < bd;
  }
  if (!net.weak_edges.empty() && is_island_network(net) && params.epsilon > 0) {
    try {
      AmcModel model = build_amc(net, params);
      if (!std::isnan(model.p_conditional))
        j["island_bound"] = bound_island(model.p_conditional, params.lambda, params.epsilon,
                                         params.gamma, strong_components(net).sizes);
    } catch (const Error& e) {
      j["island_bound_error"] = e.what();
    }
  }

  std::ostringstream csv;
  csv << "quantity,value\n";
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it->is_number()) csv << it.key() << "," << fmt(it->get<double>()) << "\n";
  sink.results(csv.str(), j);
  return 0;
}

int run_compare(const json& config, const OutputSink& sink, int workers) {
  const SimParams params = params_from_config(config);
  const json& section = config.at("compare");
  const std::string method_name =
      section.contains("method") ? section.at("method").get<std::string>() : "exact";
  WelfareEstimate::Method method;
  if (method_name == "exact")
    method = WelfareEstimate::Method::ExactAMC;
  else if (method_name == "monte_carlo")
    method = WelfareEstimate::Method::MonteCarlo;
  else
    throw ValidationError("compare.method must be 'exact' or 'monte_carlo'");

  MonteCarloBudget budget = budget_from(section);
  if (workers > 0) budget.workers = workers;

  std::vector<std::pair<std::string, NetworkSpec>> specs;
  int index = 0;
  for (const auto& entry : section.at("networks")) {
    NetworkSpec net = network_from_config(entry);
    std::string name = entry.contains("name") ? entry.at("name").get<std::string>()
                                              : "network_" + std::to_string(index);
    specs.emplace_back(std::move(name), std::move(net));
    ++index;
  }

  auto report = compare_networks(specs, params, method, budget);
  if (sink.want_csv) sink.write("results.csv", report_to_csv(report));
  if (sink.want_json)
    sink.write("results.json",
               nlohmann::json::parse(report_to_json(report)).dump(2) + "\n");
  return report.violations.empty() ? 0 : 1;
}

int run_two_node(const json& config, const OutputSink& sink) {
  const SimParams params = params_from_config(config);
  auto cmp = two_node_comparison(params);
  const bool ok = cmp.welfare_weak < cmp.welfare_strong || params.epsilon == 0;
  std::ostringstream csv;
  csv << "welfare_strong,welfare_weak,ordering_ok\n"
      << fmt(cmp.welfare_strong) << "," << fmt(cmp.welfare_weak) << "," << (ok ? 1 : 0)
      << "\n";
  sink.results(csv.str(), json{{"welfare_strong", cmp.welfare_strong},
                               {"welfare_weak", cmp.welfare_weak},
                               {"ordering_ok", ok}});
  return ok ? 0 : 1;
}

int run_sweep(const json& config, const OutputSink& sink, int workers) {
  const json& section = config.at("sweep");
  const std::string kind = section.at("kind").get<std::string>();
  MonteCarloBudget budget = budget_from(section);
  if (workers > 0) budget.workers = workers;
  const SimParams base = params_from_config(config);

  if (kind == "star_scaling") {
    // rates follow the scaling recipe: m = ceil(sqrt(n)), gamma = sqrt(m),
    // phi = m^(-1/4), epsilon = 1e-4, all relative to lambda
    std::ostringstream csv;
    csv << "n,m,gamma,phi,epsilon,welfare,stderr,ci_lo,ci_hi\n";
    json rows = json::array();
    double prev = -1.0;
    bool increasing = true;
    for (const auto& nv : section.at("n_values")) {
      const int n = nv.get<int>();
      const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
      SimParams p = base;
      p.gamma = std::sqrt(static_cast<double>(m)) * base.lambda;
      p.phi = std::pow(static_cast<double>(m), -0.25) * base.lambda;
      p.epsilon = 1e-4 * base.lambda;
      p.seed = mix_seed(base.seed ^ static_cast<std::uint64_t>(n));
      const NetworkSpec net = gen_star(n, m);
      const auto est = estimate_welfare(net, p, budget.epochs, budget.burn_in,
                                        budget.replicas, budget.workers);
      csv << n << "," << m << "," << fmt(p.gamma) << "," << fmt(p.phi) << ","
          << fmt(p.epsilon) << "," << fmt(est.mean) << "," << fmt(est.stderror) << ","
          << fmt(est.ci_lo) << "," << fmt(est.ci_hi) << "\n";
      json row = estimate_json(est);
      row["n"] = n;
      row["m"] = m;
      rows.push_back(row);
      if (est.mean <= prev) increasing = false;
      prev = est.mean;
    }
    sink.results(csv.str(), json{{"rows", rows}, {"increasing", increasing}});
    return 0;
  }

  // param sweep: one axis over a fixed network
  const std::string axis = section.at("axis").get<std::string>();
  if (axis.rfind("params.", 0) != 0)
    throw ValidationError("sweep.axis must name a parameter, e.g. params.gamma");
  const std::string field = axis.substr(7);
  const std::string method =
      section.contains("method") ? section.at("method").get<std::string>() : "exact";
  const NetworkSpec net = network_from_config(config.at("network"));

  std::ostringstream csv;
  csv << axis << ",method,welfare,stderr,ci_lo,ci_hi\n";
  json rows = json::array();
  for (const auto& value : section.at("values")) {
    json varied = config;
    varied["params"][field] = value;
    const SimParams p = params_from_config(varied);
    WelfareEstimate est;
    if (method == "exact") {
      est = WelfareEstimate::exact(exact_welfare(build_amc(net, p)));
    } else if (method == "monte_carlo") {
      est = estimate_welfare(net, p, budget.epochs, budget.burn_in, budget.replicas,
                             budget.workers);
    } else {
      throw ValidationError("sweep.method must be 'exact' or 'monte_carlo'");
    }
    csv << fmt(value.get<double>()) << "," << to_string(est.method) << "," << fmt(est.mean)
        << "," << fmt(est.stderror) << "," << fmt(est.ci_lo) << "," << fmt(est.ci_hi) << "\n";
    json row = estimate_json(est);
    row["value"] = value;
    rows.push_back(row);
  }
  sink.results(csv.str(), json{{"axis", axis}, {"rows", rows}});
  return 0;
}

}  // namespace

int run(nlohmann::json config, const Overrides& ov) {
  if (config.contains("manifest_version")) {
    if (!config.contains("config"))
      throw ParseError("manifest document lacks an embedded config");
    config = config.at("config");
  }

  if (ov.seed) config["seed"] = *ov.seed;
  if (ov.out) config["out"] = *ov.out;
  if (ov.format) config["format"] = *ov.format;
  validate_config(config);

  std::string out_dir;
  if (config.contains("out")) {
    out_dir = config.at("out").get<std::string>();
  } else if (const char* env = std::getenv("WEAKLINKS_OUT")) {
    out_dir = env;
  } else {
    out_dir = "out";
  }

  OutputSink sink;
  sink.dir = out_dir;
  const std::string format =
      config.contains("format") ? config.at("format").get<std::string>() : "both";
  sink.want_csv = format != "json";
  sink.want_json = format != "csv";
  std::filesystem::create_directories(sink.dir);

  const int workers = ov.workers.value_or(0);
  const std::string mode = config.at("mode").get<std::string>();
  int status;
  if (mode == "simulate")
    status = run_simulate(config, sink, ov.trace, workers);
  else if (mode == "exact")
    status = run_exact(config, sink);
  else if (mode == "bounds")
    status = run_bounds(config, sink);
  else if (mode == "compare")
    status = run_compare(config, sink, workers);
  else if (mode == "two_node")
    status = run_two_node(config, sink);
  else
    status = run_sweep(config, sink, workers);

  json manifest{{"manifest_version", 1},
                {"config", config},
                {"config_hash", hash_text(config.dump())},
                {"seed", config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 0},
                {"version", kVersion}};
  sink.write("manifest.json", manifest.dump(2) + "\n");
  return status;
}

}  // namespace weaklinks::cli
