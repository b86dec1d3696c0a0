#include "uta/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uta {

using nlohmann::json;

const char* axiom_set_name(AxiomSet axioms) {
  switch (axioms) {
    case AxiomSet::A1A2: return "a1a2";
    case AxiomSet::A1A3: return "a1a3";
    case AxiomSet::A1A2A3: return "a1a2a3";
    case AxiomSet::All: return "all";
  }
  return "?";
}

const char* winner_policy_name(WinnerPolicy policy) {
  return policy == WinnerPolicy::RoundRobin ? "round-robin" : "seeded-random";
}

const char* convergence_target_name(ConvergenceTarget target) {
  switch (target) {
    case ConvergenceTarget::CefEps: return "cef";
    case ConvergenceTarget::NcefEps: return "ncef";
    case ConvergenceTarget::Boundary: return "boundary";
    case ConvergenceTarget::Egalitarian: return "egalitarian";
  }
  return "?";
}

std::optional<AxiomSet> axiom_set_from_name(const std::string& name) {
  if (name == "a1a2") return AxiomSet::A1A2;
  if (name == "a1a3") return AxiomSet::A1A3;
  if (name == "a1a2a3") return AxiomSet::A1A2A3;
  if (name == "all" || name == "a1a2a3a4") return AxiomSet::All;
  return std::nullopt;
}

std::optional<WinnerPolicy> winner_policy_from_name(const std::string& name) {
  if (name == "round-robin") return WinnerPolicy::RoundRobin;
  if (name == "seeded-random") return WinnerPolicy::SeededRandom;
  return std::nullopt;
}

std::optional<ConvergenceTarget> convergence_target_from_name(
    const std::string& name) {
  if (name == "cef") return ConvergenceTarget::CefEps;
  if (name == "ncef") return ConvergenceTarget::NcefEps;
  if (name == "boundary") return ConvergenceTarget::Boundary;
  if (name == "egalitarian") return ConvergenceTarget::Egalitarian;
  return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& what) {
  throw ScenarioError(origin + ": " + path + ": " + what);
}

double number_at(const json& j, const std::string& origin,
                 const std::string& path) {
  if (!j.is_number()) fail(origin, path, "expected a number");
  return j.get<double>();
}

std::vector<Money> number_list(const json& j, const std::string& origin,
                               const std::string& path) {
  if (!j.is_array()) fail(origin, path, "expected an array of numbers");
  std::vector<Money> out;
  for (size_t k = 0; k < j.size(); ++k)
    out.push_back(number_at(j[k], origin, path + "/" + std::to_string(k)));
  return out;
}

std::vector<std::vector<Money>> matrix(const json& j, const std::string& origin,
                                       const std::string& path) {
  if (!j.is_array() || j.empty()) fail(origin, path, "expected a non-empty array of rows");
  std::vector<std::vector<Money>> rows;
  for (size_t r = 0; r < j.size(); ++r)
    rows.push_back(number_list(j[r], origin, path + "/" + std::to_string(r)));
  for (size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != rows[0].size())
      fail(origin, path + "/" + std::to_string(r),
           "row has " + std::to_string(rows[r].size()) + " entries, expected " +
               std::to_string(rows[0].size()));
  return rows;
}

SimConfig parse_sim(const json& j, const std::string& origin) {
  SimConfig cfg;
  if (j.contains("epsilon")) cfg.epsilon = number_at(j["epsilon"], origin, "/simulation/epsilon");
  if (j.contains("max_steps")) {
    if (!j["max_steps"].is_number_integer())
      fail(origin, "/simulation/max_steps", "expected an integer");
    cfg.max_steps = j["max_steps"].get<long long>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail(origin, "/simulation/seed", "expected an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("axioms")) {
    auto a = axiom_set_from_name(j["axioms"].get<std::string>());
    if (!a) fail(origin, "/simulation/axioms", "unknown axiom set (a1a2, a1a3, a1a2a3, all)");
    cfg.axioms = *a;
  }
  if (j.contains("winner_policy")) {
    auto p = winner_policy_from_name(j["winner_policy"].get<std::string>());
    if (!p) fail(origin, "/simulation/winner_policy", "unknown policy (round-robin, seeded-random)");
    cfg.winner_policy = *p;
  }
  if (j.contains("target")) {
    auto t = convergence_target_from_name(j["target"].get<std::string>());
    if (!t) fail(origin, "/simulation/target", "unknown target (cef, ncef, boundary, egalitarian)");
    cfg.target = *t;
  }
  if (cfg.epsilon <= 0) fail(origin, "/simulation/epsilon", "must be positive");
  return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ScenarioError(origin + ": top level must be an object");

  Scenario sc;
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    fail(origin, "/schema_version", "missing or non-integer");
  sc.schema_version = j["schema_version"].get<int>();
  if (sc.schema_version != kScenarioSchemaVersion)
    fail(origin, "/schema_version",
         "unsupported version " + std::to_string(sc.schema_version) +
             " (expected " + std::to_string(kScenarioSchemaVersion) + ")");

  if (j.contains("name")) sc.name = j["name"].get<std::string>();
  if (j.contains("description")) sc.description = j["description"].get<std::string>();

  std::string kind = j.value("kind", "explicit");
  if (kind == "explicit") {
    sc.kind = Scenario::Kind::Explicit;
    if (!j.contains("values")) fail(origin, "/values", "missing (required for explicit scenarios)");
    sc.instance = Instance::from_values(matrix(j["values"], origin, "/values"));

    ValidationReport vrep = validate_instance(*sc.instance);
    if (!vrep.valid) fail(origin, "/values", vrep.issues.front());

    if (j.contains("initial_targets")) {
      sc.initial_targets = number_list(j["initial_targets"], origin, "/initial_targets");
      if (sc.initial_targets->size() != static_cast<size_t>(sc.instance->num_bidders))
        fail(origin, "/initial_targets", "count != bidders");
      for (size_t i = 0; i < sc.initial_targets->size(); ++i)
        if ((*sc.initial_targets)[i] < 0)
          fail(origin, "/initial_targets/" + std::to_string(i),
               "negative utility-target");
    }

    if (j.contains("bid_sets")) {
      const json& sets = j["bid_sets"];
      if (!sets.is_object()) fail(origin, "/bid_sets", "expected an object");
      for (auto it = sets.begin(); it != sets.end(); ++it) {
        std::string base = "/bid_sets/" + it.key();
        const json& set = it.value();
        std::vector<std::vector<Money>> x;
        if (set.contains("x"))
          x = matrix(set["x"], origin, base + "/x");
        else
          x = sc.instance->values;  // quasi-truthful bid set
        if (!set.contains("pi")) fail(origin, base + "/pi", "missing");
        std::vector<Money> pi = number_list(set["pi"], origin, base + "/pi");
        if (x.size() != static_cast<size_t>(sc.instance->num_bidders) ||
            pi.size() != x.size())
          fail(origin, base, "bidder count mismatch");
        BidProfile profile;
        for (size_t i = 0; i < x.size(); ++i) {
          if (x[i].size() != static_cast<size_t>(sc.instance->num_outcomes))
            fail(origin, base + "/x/" + std::to_string(i), "outcome count mismatch");
          if (pi[i] < 0)
            fail(origin, base + "/pi/" + std::to_string(i), "negative utility-target");
          profile.emplace_back(x[i], pi[i]);
        }
        sc.bid_sets.emplace(it.key(), std::move(profile));
      }
    }
  } else if (kind == "ad") {
    sc.kind = Scenario::Kind::Ad;
    if (!j.contains("ad")) fail(origin, "/ad", "missing (required for ad scenarios)");
    const json& ad = j["ad"];
    AdSetting setting;
    if (!ad.contains("alpha")) fail(origin, "/ad/alpha", "missing");
    for (Money a : number_list(ad["alpha"], origin, "/ad/alpha"))
      setting.slot_ctrs.push_back(a);
    if (!ad.contains("values")) fail(origin, "/ad/values", "missing");
    setting.per_click_values = number_list(ad["values"], origin, "/ad/values");
    if (ad.contains("beta"))
      for (Money b : number_list(ad["beta"], origin, "/ad/beta"))
        setting.quality.push_back(b);
    else
      setting.quality.assign(setting.per_click_values.size(), 1.0);
    if (ad.contains("bids")) {
      const json& bids = ad["bids"];
      if (bids.contains("x"))
        setting.value_bids = number_list(bids["x"], origin, "/ad/bids/x");
      if (bids.contains("pi"))
        setting.targets = number_list(bids["pi"], origin, "/ad/bids/pi");
    }
    ValidationReport vrep = validate_ad_setting(setting);
    if (!vrep.valid) fail(origin, "/ad", vrep.issues.front());
    sc.ad = std::move(setting);
  } else {
    fail(origin, "/kind", "unknown kind \"" + kind + "\" (explicit, ad)");
  }

  if (j.contains("simulation")) {
    if (!j["simulation"].is_object()) fail(origin, "/simulation", "expected an object");
    sc.simulation = parse_sim(j["simulation"], origin);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.filename().string());
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = sc.schema_version;
  if (!sc.name.empty()) j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;
  if (sc.kind == Scenario::Kind::Explicit) {
    j["kind"] = "explicit";
    j["values"] = sc.instance->values;
    if (sc.initial_targets) j["initial_targets"] = *sc.initial_targets;
    if (!sc.bid_sets.empty()) {
      json sets = json::object();
      for (const auto& [name, profile] : sc.bid_sets) {
        json set;
        json x = json::array();
        json pi = json::array();
        for (const Bid& b : profile) {
          x.push_back(b.value_bid);
          pi.push_back(b.target);
        }
        set["x"] = std::move(x);
        set["pi"] = std::move(pi);
        sets[name] = std::move(set);
      }
      j["bid_sets"] = std::move(sets);
    }
  } else {
    j["kind"] = "ad";
    json ad;
    ad["alpha"] = sc.ad->slot_ctrs;
    ad["beta"] = sc.ad->quality;
    ad["values"] = sc.ad->per_click_values;
    if (!sc.ad->value_bids.empty() || !sc.ad->targets.empty()) {
      json bids;
      if (!sc.ad->value_bids.empty()) bids["x"] = sc.ad->value_bids;
      if (!sc.ad->targets.empty()) bids["pi"] = sc.ad->targets;
      ad["bids"] = std::move(bids);
    }
    j["ad"] = std::move(ad);
  }
  json sim;
  sim["epsilon"] = sc.simulation.epsilon;
  sim["max_steps"] = sc.simulation.max_steps;
  sim["seed"] = sc.simulation.seed;
  sim["axioms"] = axiom_set_name(sc.simulation.axioms);
  sim["winner_policy"] = winner_policy_name(sc.simulation.winner_policy);
  sim["target"] = convergence_target_name(sc.simulation.target);
  j["simulation"] = std::move(sim);
  return j.dump(2) + "\n";
}

}  // namespace uta
