#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "saga/dynamics.hpp"
#include "saga/experiments.hpp"
#include "saga/games.hpp"
#include "saga/simulate.hpp"

namespace {

using nlohmann::ordered_json;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw saga::ConfigError("cannot write '" + out_path + "'");
  out << text << "\n";
}

ordered_json game_info_json(const saga::games::NormalFormGame& game) {
  namespace g = saga::games;
  ordered_json j;
  j["id"] = game.id();
  j["players"] = game.n_players();
  j["actions"] = game.actions_per_player();
  ordered_json payoffs = ordered_json::array();
  for (int i = 0; i < game.n_players(); ++i) {
    ordered_json row = ordered_json::array();
    for (int cell = 0; cell < game.n_cells(); ++cell)
      row.push_back(game.payoff_flat(cell, i));
    payoffs.push_back(std::move(row));
  }
  j["payoffs"] = payoffs;
  j["pure_nash_equilibria"] = g::pure_nash_equilibria(game);
  if (game.is_2x2()) {
    ordered_json reduced = ordered_json::array();
    for (int i = 0; i < 2; ++i) {
      const g::ReducedCoefficients rc = g::reduced_coefficients(game, i);
      reduced.push_back(
          {{"u", rc.u}, {"c", rc.c}, {"d", rc.d}, {"e", rc.e}});
    }
    j["reduced_coefficients"] = reduced;
    j["symmetric"] = g::is_symmetric(game);
    try {
      const g::GameCategory cat = g::classify_game(game);
      j["category"] = g::to_string(cat.tag);
      ordered_json dom = ordered_json::array();
      for (int i = 0; i < 2; ++i)
        dom.push_back(cat.dominant_action[static_cast<size_t>(i)]
                          ? ordered_json(*cat.dominant_action[static_cast<size_t>(i)])
                          : ordered_json());
      j["dominant_actions"] = dom;
    } catch (const saga::DegenerateGame& e) {
      j["category"] = "degenerate";
      j["degenerate_cells"] = e.tying_cells();
    }
    if (const auto mixed = g::mixed_ne_2x2(game)) {
      j["mixed_ne"] = {mixed->probs[0][0], mixed->probs[1][0]};
    } else {
      j["mixed_ne"] = nullptr;
    }
  }
  return j;
}

saga::dynamics::DynamicsState parse_x0(const std::string& text) {
  saga::dynamics::DynamicsState x;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> x.p1 >> c1 >> x.p2 >> c2 >> x.w1 >> c3 >> x.w2) || c1 != ',' ||
      c2 != ',' || c3 != ',' || (in >> std::ws, !in.eof()))
    throw saga::ConfigError("bad state '" + text + "', expected p1,p2,w1,w2");
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially-aware gradient-ascent game laboratory"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run a repeated game between learners");
  std::string sim_game, sim_agents, sim_out, sim_summary;
  long sim_steps = 10000;
  std::uint64_t sim_seed = 0;
  int sim_record = 10, sim_window = 500, sim_final_window = 1000;
  double sim_tol = 0.01;
  sim_cmd->add_option("--game", sim_game, "Game name (pd|cg|mixonly|pgg:N,r,c|ordinal:seed) or file")->required();
  sim_cmd->add_option("--agents", sim_agents, "Comma-separated learner specs, e.g. \"sapga(w0=0.85),phc()\"")->required();
  sim_cmd->add_option("--steps", sim_steps, "Number of interactions");
  sim_cmd->add_option("--seed", sim_seed, "Run seed");
  sim_cmd->add_option("--record-every", sim_record, "Trajectory sampling stride");
  sim_cmd->add_option("--window", sim_window, "Convergence window (recorded samples)");
  sim_cmd->add_option("--tol", sim_tol, "Convergence tolerance");
  sim_cmd->add_option("--final-window", sim_final_window, "Steps averaged for the converged-state payoff");
  sim_cmd->add_option("--out", sim_out, "Trajectory CSV path");
  sim_cmd->add_option("--summary", sim_summary, "Summary JSON path (default: stdout)");
  sim_cmd->set_config("--config");

  // dynamics
  auto* dyn_cmd = app.add_subcommand("dynamics", "Integrate the continuous policy/attitude flow");
  std::string dyn_game, dyn_x0 = "0.5,0.5,0.5,0.5", dyn_out;
  double dyn_eps = 1.0, dyn_dt = 1e-3;
  long dyn_steps = 10000;
  int dyn_record = 10;
  bool dyn_unconstrained = false;
  dyn_cmd->add_option("--game", dyn_game, "Game name or file")->required();
  dyn_cmd->add_option("--eps", dyn_eps, "Attitude/policy learning-rate ratio");
  dyn_cmd->add_option("--x0", dyn_x0, "Initial state p1,p2,w1,w2");
  dyn_cmd->add_option("--dt", dyn_dt, "Integration step");
  dyn_cmd->add_option("--steps", dyn_steps, "Number of integration steps");
  dyn_cmd->add_option("--record-every", dyn_record, "Recording stride");
  dyn_cmd->add_flag("--unconstrained", dyn_unconstrained, "Skip the [0,1] projection");
  dyn_cmd->add_option("--out", dyn_out, "Trajectory CSV path (default: stdout)");
  dyn_cmd->set_config("--config");

  // equilibria
  auto* eq_cmd = app.add_subcommand("equilibria", "Enumerate and classify equilibria of the flow");
  std::string eq_game, eq_out;
  double eq_eps = 1.0;
  eq_cmd->add_option("--game", eq_game, "Game name or file")->required();
  eq_cmd->add_option("--eps", eq_eps, "Attitude/policy learning-rate ratio");
  eq_cmd->add_option("--out", eq_out, "Output JSON path (default: stdout)");
  eq_cmd->set_config("--config");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Self-play welfare benchmark on random ordinal games");
  std::string bench_algos = "sapga,cjal,wolfphc", bench_out;
  int bench_games = 100, bench_runs = 20, bench_jobs = 0;
  long bench_steps = 10000;
  std::uint64_t bench_seed = 42;
  bench_cmd->add_option("--games", bench_games, "Number of random games");
  bench_cmd->add_option("--runs", bench_runs, "Runs per game");
  bench_cmd->add_option("--steps", bench_steps, "Interactions per run");
  bench_cmd->add_option("--algos", bench_algos, "Comma-separated algorithms");
  bench_cmd->add_option("--seed", bench_seed, "Benchmark seed");
  bench_cmd->add_option("--jobs", bench_jobs, "Worker threads (0 = all cores)");
  bench_cmd->add_option("--out", bench_out, "CSV path (default: stdout)");
  bench_cmd->set_config("--config");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run a canned experiment");
  std::string exp_id, exp_dir = ".";
  std::vector<std::string> exp_params;
  std::uint64_t exp_seed = 42;
  int exp_jobs = 0;
  {
    std::string ids;
    for (const std::string& id : saga::experiments::experiment_ids())
      ids += (ids.empty() ? "" : "|") + id;
    exp_cmd->add_option("--id", exp_id, "Experiment id (" + ids + ")")->required();
  }
  exp_cmd->add_option("--out", exp_dir, "Output directory");
  exp_cmd->add_option("--seed", exp_seed, "Experiment seed");
  exp_cmd->add_option("--jobs", exp_jobs, "Worker threads (0 = all cores)");
  exp_cmd->add_option("--param", exp_params, "Override, key=value (repeatable)");
  exp_cmd->set_config("--config");

  // game-info
  auto* info_cmd = app.add_subcommand("game-info", "Describe a game: payoffs, coefficients, equilibria");
  std::string info_game, info_out;
  info_cmd->add_option("--game", info_game, "Game name or file")->required();
  info_cmd->add_option("--out", info_out, "Output JSON path (default: stdout)");
  info_cmd->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(sim_cmd)) {
      saga::sim::RunConfig cfg{saga::games::resolve_game(sim_game),
                               saga::learners::split_learner_specs(sim_agents),
                               sim_steps,
                               sim_seed,
                               sim_record,
                               {sim_window, sim_tol},
                               sim_final_window};
      const saga::sim::RunResult res = saga::sim::run(cfg);
      if (!sim_out.empty()) {
        std::ofstream out(sim_out);
        if (!out) throw saga::ConfigError("cannot write '" + sim_out + "'");
        saga::sim::write_run_csv(out, res);
      }
      emit(saga::sim::run_summary_json(cfg, res), sim_summary);
    } else if (app.got_subcommand(dyn_cmd)) {
      const saga::games::NormalFormGame game = saga::games::resolve_game(dyn_game);
      const auto params = saga::dynamics::DynamicsParams::from_game(game, dyn_eps);
      saga::dynamics::Trajectory traj = saga::dynamics::integrate(
          params, parse_x0(dyn_x0), dyn_dt, dyn_steps, !dyn_unconstrained, dyn_record);
      traj.game_id = game.id();
      if (dyn_out.empty()) {
        saga::dynamics::write_trajectory_csv(std::cout, traj);
      } else {
        std::ofstream out(dyn_out);
        if (!out) throw saga::ConfigError("cannot write '" + dyn_out + "'");
        saga::dynamics::write_trajectory_csv(out, traj);
      }
    } else if (app.got_subcommand(eq_cmd)) {
      const saga::games::NormalFormGame game = saga::games::resolve_game(eq_game);
      ordered_json j;
      j["game"] = game.id();
      j["eps"] = eq_eps;
      std::vector<saga::dynamics::EquilibriumReport> reports;
      if (saga::games::is_symmetric(game)) {
        j["analysis"] = "symmetric";
        reports = saga::dynamics::symmetric_equilibria(game, eq_eps);
      } else {
        try {
          reports = saga::dynamics::coordination_equilibria(game, eq_eps);
          j["analysis"] = "coordination";
        } catch (const saga::ContractViolation&) {
          j["analysis"] = "numeric_interior_only";
          const auto params = saga::dynamics::DynamicsParams::from_game(game, eq_eps);
          for (const auto& root : saga::dynamics::find_interior_equilibria(params)) {
            saga::dynamics::EquilibriumReport rep;
            rep.kind = saga::dynamics::EqKind::InteriorPoint;
            rep.stable = saga::dynamics::Stability::Unstable;
            rep.point = root;
            rep.condition = "interior zero of the flow";
            const auto ev = saga::dynamics::eigenvalues_4x4(
                saga::dynamics::linearize(params, root));
            rep.eigenvalues.assign(ev.begin(), ev.end());
            reports.push_back(std::move(rep));
          }
        }
      }
      j["reports"] = ordered_json::parse(saga::dynamics::equilibria_to_json(reports));
      emit(j.dump(2), eq_out);
    } else if (app.got_subcommand(bench_cmd)) {
      std::vector<std::string> algos;
      std::istringstream in(bench_algos);
      std::string a;
      while (std::getline(in, a, ',')) algos.push_back(a);
      const auto rows = saga::experiments::benchmark_table6(
          bench_games, bench_runs, bench_steps, algos, bench_seed, bench_jobs);
      std::ostringstream csv;
      csv << "algo,mean_usw,se_usw,mean_nsw,se_nsw\n";
      char buf[200];
      for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g\n",
                      row.algo.c_str(), row.mean_usw, row.se_usw, row.mean_nsw,
                      row.se_nsw);
        csv << buf;
      }
      if (bench_out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(bench_out);
        if (!out) throw saga::ConfigError("cannot write '" + bench_out + "'");
        out << csv.str();
      }
    } else if (app.got_subcommand(exp_cmd)) {
      saga::experiments::ExperimentSpec spec;
      spec.id = exp_id;
      spec.out_dir = exp_dir;
      spec.seed = exp_seed;
      spec.jobs = exp_jobs;
      for (const std::string& kv : exp_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw saga::ConfigError("bad --param '" + kv + "', expected key=value");
        spec.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      std::cout << saga::experiments::run_experiment(spec) << "\n";
    } else if (app.got_subcommand(info_cmd)) {
      emit(game_info_json(saga::games::resolve_game(info_game)).dump(2), info_out);
    }
  } catch (const saga::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const saga::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
