#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "saga/games.hpp"
#include "saga/learners.hpp"

namespace saga::sim {

struct ConvergenceSettings {
  int window = 500;   // recorded samples
  double tol = 0.01;  // max per-component policy range across the window
};

struct RunConfig {
  games::NormalFormGame game;
  std::vector<std::string> learner_specs;  // one per seat
  long steps = 10000;
  std::uint64_t seed = 0;
  int record_every = 10;
  ConvergenceSettings convergence;
  int final_window = 1000;  // steps averaged for the converged-state payoff
};

struct AgentTrace {
  std::string spec;
  std::vector<std::vector<double>> policies;  // [sample][action]
  std::vector<double> w;                      // empty unless the learner has one
};

struct RunResult {
  std::vector<long> recorded_steps;            // 0, record_every, ..., steps
  std::vector<AgentTrace> agents;
  std::vector<std::vector<double>> rewards;    // [agent][step]
  std::vector<std::vector<int>> actions;       // [agent][step]
  bool converged = false;
  std::vector<std::vector<double>> final_policies;
  // Converged-state payoff, two readings: mean realized reward over the last
  // final_window steps, and the expected payoff of the final policies.
  std::vector<double> final_window_payoff;
  std::vector<double> final_policy_payoff;
  double usw = 0, nsw = 0;  // from final_window_payoff
  double usw_final_policies = 0, nsw_final_policies = 0;
};

// Play the repeated game: every learner samples an action, payoffs resolve,
// and every learner observes (own reward, group average). Learners that
// declare the capability additionally observe the opponent's action.
// Fully deterministic given the config (including the seed).
RunResult run(const RunConfig& config);

// True iff the max per-component policy change over the trailing `window`
// samples is <= tol for every agent. Requires window >= 2.
bool detect_convergence(const std::vector<std::vector<double>>& policy_history,
                        int window, double tol);

struct BatchStats {
  double mean_usw = 0, se_usw = 0;
  double mean_nsw = 0, se_nsw = 0;
  std::vector<double> per_config_usw, per_config_nsw;  // means over runs
  long total_runs = 0;
};

// Independent seeded runs: config i, repeat k runs with seed
// derive_seed(seed_base, i, k). Executes on `jobs` threads (0 = hardware
// parallelism); results are identical to serial execution.
BatchStats run_batch(const std::vector<RunConfig>& configs, int runs_per_config,
                     std::uint64_t seed_base, int jobs = 1);

// CSV with header step,agent,p_action0,...,w,reward (one row per recorded
// step per agent; w and reward are nan where not applicable).
void write_run_csv(std::ostream& out, const RunResult& result);

// JSON summary {usw, nsw, converged, final_policies, ...}.
std::string run_summary_json(const RunConfig& config, const RunResult& result);

}  // namespace saga::sim
