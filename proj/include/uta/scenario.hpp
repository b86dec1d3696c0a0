#pragma once

// Scenario files: versioned JSON descriptions of either an explicit
// instance (values matrix, optional named bid sets, optional initial
// targets) or an ad setting, plus optional simulation defaults.  See
// README.md for the schema.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uta/ad_auction.hpp"
#include "uta/core.hpp"
#include "uta/dynamics.hpp"

namespace uta {

inline constexpr int kScenarioSchemaVersion = 1;

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  enum class Kind { Explicit, Ad } kind = Kind::Explicit;

  // Explicit kind.
  std::optional<Instance> instance;
  std::map<std::string, BidProfile> bid_sets;
  std::optional<std::vector<Money>> initial_targets;

  // Ad kind.
  std::optional<AdSetting> ad;

  SimConfig simulation;  // file values layered over defaults
};

// Parse errors throw ScenarioError with a field-path message like
// "e1.json: /values/2: row has 2 entries, expected 3".
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin = "<string>");

// Round-trip support (used by tooling and tests).
std::string scenario_to_json(const Scenario& scenario);

const char* axiom_set_name(AxiomSet axioms);
const char* winner_policy_name(WinnerPolicy policy);
const char* convergence_target_name(ConvergenceTarget target);
std::optional<AxiomSet> axiom_set_from_name(const std::string& name);
std::optional<WinnerPolicy> winner_policy_from_name(const std::string& name);
std::optional<ConvergenceTarget> convergence_target_from_name(
    const std::string& name);

}  // namespace uta
