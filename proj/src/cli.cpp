#include "uta/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "uta/ad_auction.hpp"
#include "uta/analysis.hpp"
#include "uta/auction.hpp"
#include "uta/core.hpp"
#include "uta/dynamics.hpp"
#include "uta/oracles.hpp"
#include "uta/scenario.hpp"

namespace uta::cli {

std::string fmt9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    return buf;
}

namespace {

std::string join9(const std::vector<Money>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += fmt9(xs[i]);
    }
    return out;
}

std::vector<Money> parse_csv_numbers(const std::string& text) {
    std::vector<Money> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("trailing junk in number list: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

// Scenarios of kind "ad" are compiled down to an explicit outcome enumeration
// so the generic commands can operate on them.
Instance instance_of(const Scenario& sc, std::ostream& out, bool announce) {
    if (sc.kind == Scenario::Kind::Explicit) return *sc.instance;
    Instance inst = to_explicit_instance(*sc.ad);
    if (announce)
        out << "compiled ad setting: " << inst.num_bidders << " bidders, "
            << inst.num_outcomes << " outcomes\n";
    return inst;
}

void print_auction(const Instance& inst, const AuctionOutcome& res, std::ostream& out) {
    out << "winning outcome: " << res.winning_outcome << "\n";
    if (res.tied_outcomes.size() > 1) {
        out << "tied outcomes:";
        for (int o : res.tied_outcomes) out << ' ' << o;
        out << "\n";
    }
    out << "totals: " << join9(res.totals) << "\n";
    out << "payments: " << join9(res.payments) << "\n";
    out << "utilities: " << join9(res.utilities) << "\n";
    out << "revenue: " << fmt9(std::accumulate(res.payments.begin(), res.payments.end(), 0.0)) << "\n";
    out << "winners:";
    bool any = false;
    for (int i = 0; i < inst.num_bidders; ++i)
        if (res.is_winner[i]) { out << ' ' << i; any = true; }
    if (!any) out << " none";
    out << "\n";
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        Scenario sc = load_scenario(path);
        if (sc.kind == Scenario::Kind::Explicit) {
            ValidationReport rep = validate_instance(*sc.instance);
            if (!rep.valid) {
                for (const auto& msg : rep.issues) err << "issue: " << msg << "\n";
                return kExitFailure;
            }
            out << "ok: " << sc.instance->num_bidders << " bidders, "
                << sc.instance->num_outcomes << " outcomes\n";
            out << "welfare-optimal outcome: " << rep.optimal_outcome
                << (rep.unique_optimum ? " (unique)" : " (tied)") << "\n";
        } else {
            ValidationReport rep = validate_ad_setting(*sc.ad);
            if (!rep.valid) {
                for (const auto& msg : rep.issues) err << "issue: " << msg << "\n";
                return kExitFailure;
            }
            out << "ok: " << sc.ad->num_bidders() << " bidders, " << sc.ad->num_slots()
                << " slots\n";
        }
        return kExitOk;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_solve(const std::string& path, std::ostream& out, std::ostream& err) {
    Scenario sc = load_scenario(path);
    Instance inst = instance_of(sc, out, true);
    ValidationReport vrep = validate_instance(inst);
    if (!vrep.valid) {
        for (const auto& msg : vrep.issues) err << "issue: " << msg << "\n";
        return kExitFailure;
    }
    out << "welfare-optimal outcome: " << vrep.optimal_outcome
        << (vrep.unique_optimum ? " (unique)" : " (tied)") << "\n";
    out << "optimal welfare: " << fmt9(inst.welfare(vrep.optimal_outcome)) << "\n";

    VcgResult v = vcg(inst);
    out << "vcg prices: " << join9(v.prices) << "\n";
    out << "vcg revenue: " << fmt9(v.revenue) << "\n";
    out << "second-price threat: " << fmt9(second_price_threat(inst, vrep.optimal_outcome)) << "\n";

    EgalitarianResult eg = egalitarian(inst);
    out << "egalitarian targets: " << join9(eg.targets) << "\n";
    Money rev = 0;
    for (int i = 0; i < inst.num_bidders; ++i)
        rev += std::max(inst.value(i, eg.optimal_outcome) - eg.targets[i], 0.0);
    out << "egalitarian revenue: " << fmt9(rev) << "\n";
    for (const auto& ev : eg.events) {
        out << "phase " << ev.phase << ": raise " << fmt9(ev.delta) << ", fixed";
        for (int i : ev.fixed) out << ' ' << i;
        out << "\n";
    }

    EquilibriumReport eq = check_equilibrium(inst, eg.targets);
    out << "egalitarian equilibrium: " << (eq.is_equilibrium ? "yes" : "no") << "\n";
    if (!eq.is_equilibrium) {
        for (const auto& d : eq.improvements)
            out << "  bidder " << d.bidder << " gains " << fmt9(d.gain) << "\n";
        return kExitFailure;
    }

    LevelPartition lp = levels_and_bounds(inst, eg.targets);
    for (std::size_t l = 0; l < lp.levels.size(); ++l) {
        out << "level " << l << " target " << fmt9(lp.level_targets[l]) << " bidders";
        for (int i : lp.levels[l]) out << ' ' << i;
        out << " factors " << lp.lower_factors[l] << " " << lp.upper_factors[l] << "\n";
    }
    return kExitOk;
}

int cmd_check_cef(const std::string& path, const std::string& bids_name,
                  const std::string& pi_csv, std::ostream& out, std::ostream& err) {
    Scenario sc = load_scenario(path);
    Instance inst = instance_of(sc, out, true);

    BidProfile profile;
    if (!pi_csv.empty()) {
        auto pis = parse_csv_numbers(pi_csv);
        if (static_cast<int>(pis.size()) != inst.num_bidders)
            throw std::invalid_argument("--pi expects one value per bidder");
        profile = quasi_truthful_profile(inst, pis);
    } else if (!bids_name.empty()) {
        auto it = sc.bid_sets.find(bids_name);
        if (it == sc.bid_sets.end()) {
            err << "error: no bid set named '" << bids_name << "'\n";
            return kExitUsage;
        }
        profile = it->second;
    } else if (sc.initial_targets) {
        profile = quasi_truthful_profile(inst, *sc.initial_targets);
    } else {
        profile = quasi_truthful_profile(inst, std::vector<Money>(inst.num_bidders, 0.0));
    }

    AuctionOutcome res = run_auction(inst, profile, {});
    print_auction(inst, res, out);

    CefReport rep = is_cef(inst, profile);
    out << "competitive: " << (rep.is_cef ? "yes" : "no") << "\n";
    out << "slack: " << fmt9(rep.slack) << "\n";
    for (const auto& viol : rep.violations)
        out << "violated at outcome " << viol.outcome << ": envy " << fmt9(viol.lhs)
            << " > headroom " << fmt9(viol.rhs) << "\n";
    return rep.is_cef ? kExitOk : kExitFailure;
}

struct SimOverrides {
    std::optional<Money> epsilon;
    std::optional<long long> max_steps;
    std::optional<std::uint64_t> seed;
    std::optional<AxiomSet> axioms;
    std::optional<ConvergenceTarget> target;
    std::optional<WinnerPolicy> winner_policy;
};

int cmd_simulate(const std::string& path, const SimOverrides& ov,
                 const std::string& pi0_csv, const std::string& trace_path,
                 const std::string& trace_json_path, std::ostream& out,
                 std::ostream& err) {
    Scenario sc = load_scenario(path);
    Instance inst = instance_of(sc, out, true);

    SimConfig cfg = sc.simulation;  // scenario file over built-in defaults
    if (ov.epsilon) cfg.epsilon = *ov.epsilon;
    if (ov.max_steps) cfg.max_steps = *ov.max_steps;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.axioms) cfg.axioms = *ov.axioms;
    if (ov.target) cfg.target = *ov.target;
    if (ov.winner_policy) cfg.winner_policy = *ov.winner_policy;

    std::vector<Money> pi0;
    if (pi0_csv == "caps" || (pi0_csv.empty() && !sc.initial_targets)) {
        pi0.resize(inst.num_bidders);
        for (int i = 0; i < inst.num_bidders; ++i) pi0[i] = inst.cap(i);
    } else if (!pi0_csv.empty()) {
        pi0 = parse_csv_numbers(pi0_csv);
        if (static_cast<int>(pi0.size()) != inst.num_bidders)
            throw std::invalid_argument("--pi0 expects one value per bidder");
    } else {
        pi0 = *sc.initial_targets;
    }

    auto [trace, rep] = simulate(inst, pi0, cfg);

    out << "axioms: " << axiom_set_name(cfg.axioms) << ", epsilon: " << fmt9(cfg.epsilon)
        << ", seed: " << cfg.seed << "\n";
    out << "steps taken: " << trace.events.size()
        << (trace.halted_steady ? " (steady)" : "") << "\n";
    out << "final targets: " << join9(rep.final_targets) << "\n";
    if (rep.first_all_winners_step) {
        out << "first all-winners step: " << *rep.first_all_winners_step
            << " (bound " << rep.all_winners_bound << ")\n";
    }
    out << "target: " << convergence_target_name(cfg.target) << "\n";
    if (rep.entered_at_step)
        out << "entered at step: " << *rep.entered_at_step << "\n";
    else
        out << "entered at step: never\n";
    out << "stayed: " << (rep.stayed ? "yes" : "no") << "\n";
    if (!rep.band_lo.empty()) {
        out << "band low:  " << join9(rep.band_lo) << "\n";
        out << "band high: " << join9(rep.band_hi) << "\n";
    }

    if (!trace_path.empty()) {
        std::ofstream f(trace_path);
        if (!f) {
            err << "error: cannot write " << trace_path << "\n";
            return kExitFailure;
        }
        write_trace_csv(f, trace);
        out << "trace written: " << trace_path << "\n";
    }
    if (!trace_json_path.empty()) {
        std::ofstream f(trace_json_path);
        if (!f) {
            err << "error: cannot write " << trace_json_path << "\n";
            return kExitFailure;
        }
        write_trace_json(f, trace);
        out << "trace written: " << trace_json_path << "\n";
    }

    bool converged = rep.entered_at_step.has_value() && rep.stayed;
    return converged ? kExitOk : kExitNoConvergence;
}

int cmd_ad_auction(const std::string& path, bool run_gfp, double gfp_epsilon,
                   long long gfp_steps, const std::string& gfp_out,
                   std::ostream& out, std::ostream& err) {
    Scenario sc = load_scenario(path);
    if (sc.kind != Scenario::Kind::Ad) {
        err << "error: scenario is not an ad setting\n";
        return kExitUsage;
    }
    const AdSetting& setting = *sc.ad;
    ValidationReport vrep = validate_ad_setting(setting);
    if (!vrep.valid) {
        for (const auto& msg : vrep.issues) err << "issue: " << msg << "\n";
        return kExitFailure;
    }

    Assignment asg = optimal_assignment(setting);
    out << "assignment (slot -> bidder):";
    for (int j = 0; j < setting.num_slots(); ++j) {
        int who = -1;
        for (int i = 0; i < setting.num_bidders(); ++i)
            if (asg.slot_of[i] == j) who = i;
        out << ' ';
        if (who < 0) out << '-';
        else out << who;
    }
    out << "\n";
    out << "expected payments: " << join9(asg.expected_payments) << "\n";
    out << "expected revenue: " << fmt9(asg.total) << "\n";

    for (PricingScheme scheme : {PricingScheme::SlotPriced, PricingScheme::Rebate}) {
        PricingResult pr = price_assignment(setting, asg, scheme);
        out << (scheme == PricingScheme::SlotPriced ? "slot-priced" : "rebate")
            << " ppc: " << join9(pr.ppc);
        if (scheme == PricingScheme::Rebate) out << " rebates: " << join9(pr.rebate);
        out << "\n";
    }

    if (run_gfp) {
        GfpRun run = gfp_best_response_run(setting, gfp_epsilon, gfp_steps);
        out << "gfp steps: " << run.events.size() << "\n";
        if (run.fixed_point) {
            out << "gfp fixed point at step " << run.fixed_point_step << ": "
                << join9(run.events.empty() ? run.initial_bids
                                            : run.events.back().bids)
                << "\n";
        } else if (run.cycled) {
            out << "gfp cycle detected at step " << run.revisit_step
                << " (state first seen at step " << run.first_seen_step << ")\n";
        } else {
            out << "gfp budget exhausted without fixed point or cycle\n";
        }
        if (!gfp_out.empty()) {
            std::ofstream f(gfp_out);
            if (!f) {
                err << "error: cannot write " << gfp_out << "\n";
                return kExitFailure;
            }
            write_gfp_csv(f, run);
            out << "gfp trace written: " << gfp_out << "\n";
        }
        if (!run.fixed_point && !run.cycled) return kExitNoConvergence;
    }
    return kExitOk;
}

int cmd_oracle_compare(const std::string& path, double step, long long max_points,
                       std::ostream& out, std::ostream& err) {
    Scenario sc = load_scenario(path);
    Instance inst = instance_of(sc, out, true);

    oracles::GridSpec spec;
    spec.step = step;
    spec.max_points = max_points;

    oracles::GridClassification grid = oracles::enumerate_cef_grid(inst, spec);
    long long total = grid.shape.total;
    out << "grid: " << total << " points, step " << fmt9(spec.step) << "\n";
    out << "competitive points: " << grid.cef_count << "\n";

    long long disagreements = 0;
    for (long long idx = 0; idx < total; ++idx) {
        std::vector<Money> pi = grid.point(idx);
        bool fast = in_cef_set(inst, pi);
        if (fast != grid.in_cef[static_cast<std::size_t>(idx)]) ++disagreements;
    }
    out << "membership disagreements: " << disagreements << "\n";

    oracles::GridEquilibria eqs = oracles::enumerate_equilibria_grid(inst, spec);
    out << "grid equilibria: " << eqs.points.size() << "\n";

    oracles::BruteEgalitarian brute = oracles::brute_force_egalitarian(inst, spec);
    EgalitarianResult eg = egalitarian(inst);
    out << "egalitarian targets: " << join9(eg.targets) << "\n";
    bool egal_ok = true;
    if (brute.found) {
        out << "grid egalitarian:    " << join9(brute.argmax.front()) << "\n";
        for (int i = 0; i < inst.num_bidders; ++i) {
            if (std::abs(brute.argmax.front()[i] - eg.targets[i]) > spec.step + kTol) {
                egal_ok = false;
            }
        }
        out << "egalitarian within one grid step: " << (egal_ok ? "yes" : "no") << "\n";
    } else {
        out << "grid egalitarian: no grid equilibrium found\n";
    }

    if (disagreements > 0 || !egal_ok) {
        err << "error: oracle disagreement\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"utility-target auction laboratory"};
    app.require_subcommand(1);

    std::string path;

    auto* validate = app.add_subcommand("validate", "check a scenario file for internal consistency");
    validate->add_option("scenario", path, "scenario JSON file")->required();

    auto* solve = app.add_subcommand("solve", "static benchmarks and egalitarian targets");
    solve->add_option("scenario", path, "scenario JSON file")->required();

    std::string bids_name, pi_csv;
    auto* check = app.add_subcommand("check-cef", "run one auction and test the competitive condition");
    check->add_option("scenario", path, "scenario JSON file")->required();
    check->add_option("--bids", bids_name, "named bid set from the scenario");
    check->add_option("--pi", pi_csv, "comma-separated utility targets (quasi-truthful bids)");

    double sim_epsilon = 0;
    long long sim_max_steps = 0;
    std::uint64_t sim_seed = 0;
    std::string pi0_csv, trace_path, trace_json_path;
    std::string axioms_name, target_name, policy_name;
    auto* sim = app.add_subcommand("simulate", "run bidder dynamics");
    sim->add_option("scenario", path, "scenario JSON file")->required();
    auto* opt_eps = sim->add_option("--epsilon", sim_epsilon, "step size");
    auto* opt_seed = sim->add_option("--seed", sim_seed, "rng seed");
    auto* opt_steps = sim->add_option("--max-steps", sim_max_steps,
                                      "step budget (default scales with caps/epsilon)");
    sim->add_option("--axioms", axioms_name, "a1a2 | a1a3 | a1a2a3 | all");
    sim->add_option("--target", target_name, "cef | ncef | boundary | egalitarian");
    sim->add_option("--winner-policy", policy_name, "round-robin | seeded-random");
    sim->add_option("--pi0", pi0_csv, "initial targets: comma-separated list or 'caps'");
    sim->add_option("--out", trace_path, "write trace CSV here");
    sim->add_option("--json-out", trace_json_path, "write trace JSON here");

    bool run_gfp = false;
    double gfp_epsilon = 0.1;
    long long gfp_steps = 100000;
    std::string gfp_out;
    auto* ad = app.add_subcommand("ad-auction", "position auction assignment and pricing");
    ad->add_option("scenario", path, "scenario JSON file")->required();
    ad->add_flag("--gfp", run_gfp, "also run greedy first-price best-response dynamics");
    ad->add_option("--gfp-epsilon", gfp_epsilon, "bid grid step for the dynamics");
    ad->add_option("--gfp-steps", gfp_steps, "step budget for the dynamics");
    ad->add_option("--gfp-out", gfp_out, "write dynamics trace CSV here");

    double grid_step = 0.25;
    long long max_points = 2'000'000;
    auto* oracle = app.add_subcommand("oracle-compare", "exhaustive grid checks against the fast paths");
    oracle->add_option("scenario", path, "scenario JSON file")->required();
    oracle->add_option("--step", grid_step, "grid resolution");
    oracle->add_option("--max-points", max_points, "refuse grids larger than this");

    std::vector<const char*> argv;
    argv.push_back("uta");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(path, out, err);
        if (app.got_subcommand(solve)) return cmd_solve(path, out, err);
        if (app.got_subcommand(check)) return cmd_check_cef(path, bids_name, pi_csv, out, err);
        if (app.got_subcommand(sim)) {
            SimOverrides ov;
            if (opt_eps->count()) ov.epsilon = sim_epsilon;
            if (opt_seed->count()) ov.seed = sim_seed;
            if (opt_steps->count()) ov.max_steps = sim_max_steps;
            if (!axioms_name.empty()) {
                ov.axioms = axiom_set_from_name(axioms_name);
                if (!ov.axioms) { err << "error: unknown axiom set '" << axioms_name << "'\n"; return kExitUsage; }
            }
            if (!target_name.empty()) {
                ov.target = convergence_target_from_name(target_name);
                if (!ov.target) { err << "error: unknown target '" << target_name << "'\n"; return kExitUsage; }
            }
            if (!policy_name.empty()) {
                ov.winner_policy = winner_policy_from_name(policy_name);
                if (!ov.winner_policy) { err << "error: unknown winner policy '" << policy_name << "'\n"; return kExitUsage; }
            }
            return cmd_simulate(path, ov, pi0_csv, trace_path, trace_json_path, out, err);
        }
        if (app.got_subcommand(ad))
            return cmd_ad_auction(path, run_gfp, gfp_epsilon, gfp_steps, gfp_out, out, err);
        if (app.got_subcommand(oracle))
            return cmd_oracle_compare(path, grid_step, max_points, out, err);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace uta::cli
