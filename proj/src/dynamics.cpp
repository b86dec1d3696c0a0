#include "uta/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace uta {

long long default_max_steps(const Instance& inst, Money epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  long long per_sweep = 0;
  for (int i = 0; i < inst.num_bidders; ++i)
    per_sweep += static_cast<long long>(std::ceil(inst.cap(i) / epsilon - kTol));
  return 10 * per_sweep * inst.num_bidders;
}

SimState make_sim_state(const Instance& inst, std::vector<Money> initial,
                        const SimConfig& cfg) {
  if (static_cast<int>(initial.size()) != inst.num_bidders)
    throw std::invalid_argument("make_sim_state: target count != bidders");
  SimState state;
  for (int i = 0; i < inst.num_bidders; ++i)
    initial[i] = std::min(std::max(initial[i], 0.0), inst.cap(i));
  state.targets = std::move(initial);
  state.rng.seed(cfg.seed);
  // Seed the most-recent-winner context with the opening classification
  // round so every subsequent auction has a winner to defer to.
  AuctionOutcome first = run_auction(
      inst, quasi_truthful_profile(inst, state.targets), TieBreakContext{});
  state.previous_winner = first.winning_outcome;
  return state;
}

namespace {

bool has_a3(AxiomSet axioms) {
  return axioms == AxiomSet::A1A3 || axioms == AxiomSet::A1A2A3 ||
         axioms == AxiomSet::All;
}

bool has_a4(AxiomSet axioms) { return axioms == AxiomSet::All; }

// Deterministic across platforms, unlike uniform_int_distribution.
int draw(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

}  // namespace

std::optional<std::pair<int, Direction>> next_mover(SimState& state,
                                                    const Instance& inst,
                                                    const SimConfig& cfg) {
  TieBreakContext ctx{state.previous_winner};
  AuctionOutcome out =
      run_auction(inst, quasi_truthful_profile(inst, state.targets), ctx);

  std::vector<int> losers;
  for (int i = 0; i < inst.num_bidders; ++i)
    if (!out.is_winner[i]) losers.push_back(i);

  if (!losers.empty()) {
    // Losers go first.  With the impatience axiom the highest target moves
    // (ties to the lowest index); otherwise a seeded draw.
    int mover;
    if (has_a4(cfg.axioms)) {
      mover = losers.front();
      for (int i : losers)
        if (state.targets[i] > state.targets[mover] + kTol) mover = i;
    } else {
      mover = losers[draw(state.rng, static_cast<int>(losers.size()))];
    }
    return std::make_pair(mover, Direction::Raise);
  }

  if (!has_a3(cfg.axioms)) return std::nullopt;  // steady state

  int mover;
  if (cfg.winner_policy == WinnerPolicy::RoundRobin) {
    mover = state.round_robin_cursor % inst.num_bidders;
    state.round_robin_cursor = (state.round_robin_cursor + 1) % inst.num_bidders;
  } else {
    mover = draw(state.rng, inst.num_bidders);
  }
  return std::make_pair(mover, Direction::Lower);
}

void apply_move(SimState& state, const Instance& inst, int mover,
                Direction dir, const SimConfig& cfg) {
  Money& t = state.targets[mover];
  if (dir == Direction::Raise)
    t = std::max(t - cfg.epsilon, 0.0);
  else
    t = std::min(t + cfg.epsilon, inst.cap(mover));

  TieBreakContext ctx{state.previous_winner};
  AuctionOutcome out =
      run_auction(inst, quasi_truthful_profile(inst, state.targets), ctx);
  state.previous_winner = out.winning_outcome;
  ++state.step;
}

std::pair<Trace, ConvergenceReport> simulate(const Instance& inst,
                                             std::vector<Money> initial,
                                             const SimConfig& cfg) {
  SimState state = make_sim_state(inst, std::move(initial), cfg);
  long long max_steps =
      cfg.max_steps >= 0 ? cfg.max_steps : default_max_steps(inst, cfg.epsilon);

  Trace trace;
  trace.initial_targets = state.targets;
  {
    AuctionOutcome first = run_auction(
        inst, quasi_truthful_profile(inst, state.targets), TieBreakContext{});
    trace.initial_all_winners = std::all_of(
        first.is_winner.begin(), first.is_winner.end(), [](bool w) { return w; });
  }
  trace.events.reserve(static_cast<size_t>(std::min<long long>(max_steps, 1 << 16)));

  while (state.step < max_steps) {
    auto choice = next_mover(state, inst, cfg);
    if (!choice) {
      trace.halted_steady = true;
      break;
    }
    auto [mover, dir] = *choice;

    TraceEvent ev;
    ev.step = state.step;
    ev.mover = mover;
    ev.direction = dir;
    ev.winner_before = *state.previous_winner;
    apply_move(state, inst, mover, dir, cfg);
    ev.winner_after = *state.previous_winner;
    ev.targets = state.targets;
    {
      TieBreakContext ctx{state.previous_winner};
      AuctionOutcome after =
          run_auction(inst, quasi_truthful_profile(inst, state.targets), ctx);
      ev.is_winner = after.is_winner;
    }
    ev.in_cef = in_cef_set(inst, state.targets);
    trace.events.push_back(std::move(ev));
  }

  ConvergenceReport report = [&] {
    if (cfg.target == ConvergenceTarget::Egalitarian) {
      EgalitarianResult egal = egalitarian(inst);
      return check_convergence(trace, inst, cfg, &egal);
    }
    return check_convergence(trace, inst, cfg, nullptr);
  }();
  return {std::move(trace), std::move(report)};
}

ConvergenceReport check_convergence(const Trace& trace, const Instance& inst,
                                    const SimConfig& cfg,
                                    const EgalitarianResult* egal) {
  ConvergenceReport report;
  report.target = cfg.target;
  report.epsilon = cfg.epsilon;
  report.final_targets =
      trace.events.empty() ? trace.initial_targets : trace.events.back().targets;

  for (Money t : trace.initial_targets)
    report.all_winners_bound +=
        static_cast<long long>(std::ceil(t / cfg.epsilon - kTol));
  if (trace.initial_all_winners) {
    report.first_all_winners_step = 0;
  } else {
    for (const TraceEvent& ev : trace.events) {
      if (std::all_of(ev.is_winner.begin(), ev.is_winner.end(),
                      [](bool w) { return w; })) {
        report.first_all_winners_step = ev.step + 1;
        break;
      }
    }
  }

  if (cfg.target == ConvergenceTarget::Egalitarian) {
    if (egal == nullptr)
      throw std::invalid_argument(
          "check_convergence: egalitarian target needs the reference result");
    LevelPartition levels = levels_and_bounds(inst, egal->targets);
    report.band_lo.resize(inst.num_bidders);
    report.band_hi.resize(inst.num_bidders);
    for (int i = 0; i < inst.num_bidders; ++i) {
      int level = levels.level_of(i);
      report.band_lo[i] =
          egal->targets[i] - cfg.epsilon * static_cast<Money>(levels.lower_factors[level]);
      report.band_hi[i] =
          egal->targets[i] + cfg.epsilon * static_cast<Money>(levels.upper_factors[level]);
    }
  }

  auto inside = [&](const std::vector<Money>& targets) {
    switch (cfg.target) {
      case ConvergenceTarget::CefEps:
        return in_cef_eps(inst, targets, cfg.epsilon);
      case ConvergenceTarget::NcefEps:
        return in_ncef_eps(inst, targets, cfg.epsilon);
      case ConvergenceTarget::Boundary:
        // Within eps of both sets, i.e. hugging the frontier.
        return in_cef_eps(inst, targets, cfg.epsilon) &&
               in_ncef_eps(inst, targets, cfg.epsilon);
      case ConvergenceTarget::Egalitarian:
        for (int i = 0; i < inst.num_bidders; ++i)
          if (targets[i] < report.band_lo[i] - kTol ||
              targets[i] > report.band_hi[i] + kTol)
            return false;
        return true;
    }
    return false;
  };

  bool entered = false;
  bool stayed = true;
  // The starting profile is part of the run; a simulation that begins inside
  // the target and halts without moving still counts as having entered.
  if (inside(trace.initial_targets)) {
    entered = true;
    report.entered_at_step = 0;
  }
  for (const TraceEvent& ev : trace.events) {
    bool in = inside(ev.targets);
    if (!entered && in) {
      entered = true;
      report.entered_at_step = ev.step;
    } else if (entered && !in) {
      stayed = false;
    }
  }
  report.stayed = entered && stayed;
  return report;
}

namespace {

void append_fmt9(std::string& s, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  s += buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  size_t n = trace.initial_targets.size();
  std::string line = "step,mover,direction";
  for (size_t i = 0; i < n; ++i) line += ",pi_" + std::to_string(i);
  line += ",winner,cef_flag\n";
  out << line;
  for (const TraceEvent& ev : trace.events) {
    line.clear();
    line += std::to_string(ev.step);
    line += ',';
    line += std::to_string(ev.mover);
    line += ',';
    line += ev.direction == Direction::Raise ? "raise" : "lower";
    for (Money t : ev.targets) {
      line += ',';
      append_fmt9(line, t);
    }
    line += ',';
    line += std::to_string(ev.winner_after);
    line += ',';
    line += ev.in_cef ? '1' : '0';
    line += '\n';
    out << line;
  }
}

void write_trace_json(std::ostream& out, const Trace& trace) {
  out << "{\n  \"initial_targets\": [";
  for (size_t i = 0; i < trace.initial_targets.size(); ++i) {
    if (i) out << ", ";
    std::string s;
    append_fmt9(s, trace.initial_targets[i]);
    out << s;
  }
  out << "],\n  \"halted_steady\": " << (trace.halted_steady ? "true" : "false")
      << ",\n  \"events\": [\n";
  for (size_t e = 0; e < trace.events.size(); ++e) {
    const TraceEvent& ev = trace.events[e];
    out << "    {\"step\": " << ev.step << ", \"mover\": " << ev.mover
        << ", \"direction\": \""
        << (ev.direction == Direction::Raise ? "raise" : "lower")
        << "\", \"targets\": [";
    for (size_t i = 0; i < ev.targets.size(); ++i) {
      if (i) out << ", ";
      std::string s;
      append_fmt9(s, ev.targets[i]);
      out << s;
    }
    out << "], \"winner\": " << ev.winner_after
        << ", \"cef\": " << (ev.in_cef ? "true" : "false") << "}";
    out << (e + 1 < trace.events.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
}

}  // namespace uta
