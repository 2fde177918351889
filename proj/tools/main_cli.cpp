#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace weaklinks::cli {

namespace {

struct Args {
  std::string command;
  std::string config_path;
  std::string preset_name;
  Overrides ov;
};

int dispatch(const Args& args) {
  nlohmann::json config;
  if (args.command == "preset") {
    config = preset_config(args.preset_name);
  } else {
    config = load_config_file(args.config_path);
    if (!config.contains("manifest_version")) {
      if (!config.contains("mode")) {
        config["mode"] = args.command;
      } else if (config.at("mode") != args.command) {
        throw ValidationError("config mode '" + config.at("mode").get<std::string>() +
                              "' does not match subcommand '" + args.command + "'");
      }
    }
  }
  return run(std::move(config), args.ov);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"event-driven simulator and exact chain analyzer for adaptation "
               "dynamics over strong and weak links"};
  app.require_subcommand(1);

  Args args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { args.ov.seed = v; }, "override the RNG seed");
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& v) { args.ov.out = v; }, "output directory");
    sub->add_option_function<std::string>(
           "--format", [&](const std::string& v) { args.ov.format = v; }, "results format")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option_function<int>(
        "--workers", [&](int v) { args.ov.workers = v; }, "parallel replica workers");
    sub->add_flag("--trace", args.ov.trace, "write an event trace (simulate mode)");
  };

  for (const char* name : {"simulate", "exact", "bounds", "compare", "sweep", "two_node"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config_path, "experiment config or manifest")
        ->required();
    add_common(sub);
    sub->callback([&args, name] { args.command = name; });
  }
  auto* preset = app.add_subcommand("preset", "run a shipped experiment preset");
  preset->add_option("name", args.preset_name, "preset name")
      ->required()
      ->check(CLI::IsMember(preset_names()));
  add_common(preset);
  preset->callback([&args] { args.command = "preset"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // CLI11 prints help/errors; nonzero on bad usage
  }

  try {
    return dispatch(args);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 5;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace weaklinks::cli
