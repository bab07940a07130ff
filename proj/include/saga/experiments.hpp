#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "saga/dynamics.hpp"
#include "saga/simulate.hpp"

namespace saga::experiments {

// Discrete self-play runs and the projected flow integrated from the same
// starting points, time-aligned by t = step * alpha.
struct StartComparison {
  double p1_0 = 0, p2_0 = 0;
  double sim_end_p1 = 0, sim_end_p2 = 0;
  double ode_end_p1 = 0, ode_end_p2 = 0;
  double deviation = 0;     // sup over aligned samples of the (p1,p2) gap
  double endpoint_gap = 0;  // same metric at the final sample
  bool endpoint_match = false;  // endpoint_gap <= 0.05
  std::vector<double> times;
  std::vector<std::array<double, 2>> sim_path, ode_path;
};

struct ComparisonReport {
  std::string game_id;
  double alpha = 0, w0 = 0, beta = 0;
  long steps = 0;
  std::uint64_t seed = 0;
  std::vector<StartComparison> starts;
  int endpoint_matches = 0;
  double median_deviation = 0;
};

// Self-play of two socially-aware hill climbers from n_starts seeded random
// initial policies in [0.05, 0.95]^2, against the projected flow from the
// same starts with epsilon = alpha_w / alpha_pi (= 1 here).
ComparisonReport trajectory_comparison(const games::NormalFormGame& game,
                                       int n_starts = 20, double w0 = 0.85,
                                       double alpha = 0.001, double beta = 0.8,
                                       long steps = 10000,
                                       std::uint64_t seed = 20240901,
                                       int jobs = 1);

struct BenchRow {
  std::string algo;
  double mean_usw = 0, se_usw = 0;
  double mean_nsw = 0, se_nsw = 0;
};

// Self-play welfare benchmark on seeded random ordinal conflict games: the
// same game set for every algorithm, runs_per_game seeds each, welfare taken
// from the final-window average payoffs.
std::vector<BenchRow> benchmark_table6(int n_games = 100, int runs = 20,
                                       long steps = 10000,
                                       const std::vector<std::string>& algos =
                                           {"sapga", "cjal", "wolfphc"},
                                       std::uint64_t seed = 42, int jobs = 0);

// Socially-aware learner (w0, p0 as given) against a selfish hill climber.
sim::RunResult against_selfish(const games::NormalFormGame& game, double w0 = 1.0,
                               double p_sapga0 = 0.2, double p_selfish0 = 0.8,
                               long steps = 10000, std::uint64_t seed = 7,
                               double alpha = 0.001, double beta = 0.8);

// Public goods game with n_sapga socially-aware seats and n_selfish selfish
// hill climbers, everyone starting at cooperation probability p0.
sim::RunResult pgg_experiment(int n_sapga, int n_selfish, double r = 2, double c = 2,
                              double p0 = 0.5, double w0 = 0.85, long steps = 10000,
                              std::uint64_t seed = 7, double alpha = 0.001,
                              double beta = 0.8);

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "fig_pd",     "fig_cg",     "fig_mixonly", "table6",       "selfish_pd",
      "selfish_cg", "selfish_mixonly", "pgg_all_sapga", "pgg_2v1", "pgg_1v2"};
  return ids;
}

struct ExperimentSpec {
  std::string id;
  std::map<std::string, std::string> overrides;  // steps, runs, games, n_starts, ...
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  int jobs = 1;
};

// Run a canned experiment and write <id>.csv, <id>.dat (gnuplot-style) and
// <id>_summary.json into out_dir. Returns the summary JSON.
std::string run_experiment(const ExperimentSpec& spec);

}  // namespace saga::experiments
