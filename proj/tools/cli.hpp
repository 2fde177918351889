#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaklinks/engine.hpp"
#include "weaklinks/network.hpp"

namespace weaklinks::cli {

/// Command-line overrides applied on top of the config document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;  // csv | json | both
  std::optional<int> workers;
  bool trace = false;
};

/// Accepts either a JSON document or dotted-key text:
///   mode = exact
///   network.kind = star
///   network.n = 8
/// Values parse as JSON fragments, falling back to plain strings.
nlohmann::json parse_config_text(const std::string& text);

nlohmann::json load_config_file(const std::string& path);

/// Rejects unknown keys at every level and checks mode-specific requirements.
void validate_config(const nlohmann::json& config);

NetworkSpec network_from_config(const nlohmann::json& net);
SimParams params_from_config(const nlohmann::json& config);

std::vector<std::string> preset_names();
nlohmann::json preset_config(const std::string& name);

/// Executes one experiment config (or a previously written manifest), writing
/// results plus a manifest into the output directory. Returns 0 on success
/// and 1 when a declared ordering or bound is violated; other failures throw.
int run(nlohmann::json config, const Overrides& ov = {});

/// Full front door: subcommand dispatch, flag handling, error-to-exit-code
/// mapping (2 parse, 3 validation, 4 capacity, 5 numerical).
int run_cli(int argc, const char* const* argv);

}  // namespace weaklinks::cli
