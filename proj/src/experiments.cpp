#include "saga/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "saga/parallel.hpp"

namespace saga::experiments {

namespace {

std::string learner_spec(const std::string& algo) {
  if (algo.find('(') != std::string::npos) return algo;  // already a full spec
  if (algo == "sapga") return "sapga(w0=0.85)";
  if (algo == "cjal") return "cjal()";
  if (algo == "wolfphc") return "wolfphc()";
  if (algo == "phc") return "phc()";
  throw ConfigError("unknown benchmark algorithm '" + algo + "'");
}

std::string fmt_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ComparisonReport trajectory_comparison(const games::NormalFormGame& game,
                                       int n_starts, double w0, double alpha,
                                       double beta, long steps, std::uint64_t seed,
                                       int jobs) {
  if (n_starts < 1) throw ConfigError("need at least one start");
  ComparisonReport report;
  report.game_id = game.id();
  report.alpha = alpha;
  report.w0 = w0;
  report.beta = beta;
  report.steps = steps;
  report.seed = seed;
  report.starts.resize(static_cast<size_t>(n_starts));

  // Starting policies away from the absorbing faces.
  Rng rng(seed);
  std::vector<std::array<double, 2>> starts;
  for (int s = 0; s < n_starts; ++s)
    starts.push_back({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)});

  const int record_every = static_cast<int>(std::max<long>(1, steps / 500));
  const dynamics::DynamicsParams params = dynamics::DynamicsParams::from_game(game, 1.0);

  parallel_for(static_cast<size_t>(n_starts), jobs, [&](size_t s) {
    StartComparison& cmp = report.starts[s];
    cmp.p1_0 = starts[s][0];
    cmp.p2_0 = starts[s][1];

    sim::RunConfig cfg{game, {}, steps, derive_seed(seed, s), record_every, {}, 1000};
    std::ostringstream spec1, spec2;
    spec1 << "sapga(w0=" << w0 << ",api=" << alpha << ",aw=" << alpha
          << ",beta=" << beta << ",p0=" << cmp.p1_0 << ")";
    spec2 << "sapga(w0=" << w0 << ",api=" << alpha << ",aw=" << alpha
          << ",beta=" << beta << ",p0=" << cmp.p2_0 << ")";
    cfg.learner_specs = {spec1.str(), spec2.str()};
    const sim::RunResult run = sim::run(cfg);

    // The flow, one integration step per interaction, so samples align.
    const dynamics::Trajectory ode = dynamics::integrate(
        params, {cmp.p1_0, cmp.p2_0, w0, w0}, alpha, steps, /*projected=*/true,
        record_every);

    const size_t n_samples = std::min(run.recorded_steps.size(), ode.states.size());
    cmp.deviation = 0;
    for (size_t k = 0; k < n_samples; ++k) {
      const double p1s = run.agents[0].policies[k][0];
      const double p2s = run.agents[1].policies[k][0];
      const double p1o = ode.states[k].p1;
      const double p2o = ode.states[k].p2;
      cmp.times.push_back(static_cast<double>(run.recorded_steps[k]) * alpha);
      cmp.sim_path.push_back({p1s, p2s});
      cmp.ode_path.push_back({p1o, p2o});
      const double gap = std::max(std::abs(p1s - p1o), std::abs(p2s - p2o));
      cmp.deviation = std::max(cmp.deviation, gap);
      if (k + 1 == n_samples) {
        cmp.sim_end_p1 = p1s;
        cmp.sim_end_p2 = p2s;
        cmp.ode_end_p1 = p1o;
        cmp.ode_end_p2 = p2o;
        cmp.endpoint_gap = gap;
        cmp.endpoint_match = gap <= 0.05;
      }
    }
  });

  report.endpoint_matches = 0;
  std::vector<double> devs;
  for (const StartComparison& cmp : report.starts) {
    report.endpoint_matches += cmp.endpoint_match ? 1 : 0;
    devs.push_back(cmp.deviation);
  }
  std::sort(devs.begin(), devs.end());
  const size_t mid = devs.size() / 2;
  report.median_deviation = devs.size() % 2 == 1
                                ? devs[mid]
                                : 0.5 * (devs[mid - 1] + devs[mid]);
  return report;
}

std::vector<BenchRow> benchmark_table6(int n_games, int runs, long steps,
                                       const std::vector<std::string>& algos,
                                       std::uint64_t seed, int jobs) {
  if (n_games < 1 || runs < 1) throw ConfigError("need games >= 1 and runs >= 1");
  std::vector<games::NormalFormGame> game_set;
  for (int g = 0; g < n_games; ++g)
    game_set.push_back(games::random_ordinal_conflict_game(derive_seed(seed, 0xC0FFEE, g)));

  std::vector<BenchRow> table;
  for (size_t ai = 0; ai < algos.size(); ++ai) {
    const std::string spec = learner_spec(algos[ai]);
    std::vector<sim::RunConfig> configs;
    for (const games::NormalFormGame& g : game_set)
      configs.push_back({g, {spec, spec}, steps, 0, 10, {}, 1000});
    const sim::BatchStats stats =
        sim::run_batch(configs, runs, derive_seed(seed, 1 + ai), jobs);
    BenchRow row;
    row.algo = algos[ai];
    row.mean_usw = stats.mean_usw;
    row.se_usw = stats.se_usw;
    row.mean_nsw = stats.mean_nsw;
    row.se_nsw = stats.se_nsw;
    table.push_back(row);
  }
  return table;
}

sim::RunResult against_selfish(const games::NormalFormGame& game, double w0,
                               double p_sapga0, double p_selfish0, long steps,
                               std::uint64_t seed, double alpha, double beta) {
  std::ostringstream social, selfish;
  social << "sapga(w0=" << w0 << ",api=" << alpha << ",aw=" << alpha
         << ",beta=" << beta << ",p0=" << p_sapga0 << ")";
  selfish << "phc(alpha=" << alpha << ",beta=" << beta << ",p0=" << p_selfish0 << ")";
  sim::RunConfig cfg{game, {social.str(), selfish.str()}, steps, seed, 10, {}, 1000};
  return sim::run(cfg);
}

sim::RunResult pgg_experiment(int n_sapga, int n_selfish, double r, double c,
                              double p0, double w0, long steps, std::uint64_t seed,
                              double alpha, double beta) {
  if (n_sapga < 0 || n_selfish < 0 || n_sapga + n_selfish < 2)
    throw ConfigError("public goods lineup needs at least 2 seats");
  const games::NormalFormGame game = games::pgg_game(n_sapga + n_selfish, r, c);
  std::vector<std::string> specs;
  std::ostringstream social, selfish;
  social << "sapga(w0=" << w0 << ",api=" << alpha << ",aw=" << alpha
         << ",beta=" << beta << ",p0=" << p0 << ")";
  selfish << "phc(alpha=" << alpha << ",beta=" << beta << ",p0=" << p0 << ")";
  for (int i = 0; i < n_sapga; ++i) specs.push_back(social.str());
  for (int i = 0; i < n_selfish; ++i) specs.push_back(selfish.str());
  sim::RunConfig cfg{game, specs, steps, seed, 10, {}, 1000};
  return sim::run(cfg);
}

namespace {

using nlohmann::ordered_json;

double get_num(const std::map<std::string, std::string>& m, const std::string& key,
               double fallback) {
  const auto it = m.find(key);
  if (it == m.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("experiment parameter '" + key + "' is not a number");
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

std::string comparison_csv(const ComparisonReport& rep) {
  std::ostringstream out;
  out << "start,t,p1_sim,p2_sim,p1_ode,p2_ode\n";
  char buf[200];
  for (size_t s = 0; s < rep.starts.size(); ++s) {
    const StartComparison& cmp = rep.starts[s];
    for (size_t k = 0; k < cmp.times.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g,%.10g\n", s,
                    cmp.times[k], cmp.sim_path[k][0], cmp.sim_path[k][1],
                    cmp.ode_path[k][0], cmp.ode_path[k][1]);
      out << buf;
    }
  }
  return out.str();
}

std::string comparison_dat(const ComparisonReport& rep) {
  std::ostringstream out;
  out << "# t p1_sim p2_sim p1_ode p2_ode (blank-line separated blocks per start)\n";
  char buf[200];
  for (const StartComparison& cmp : rep.starts) {
    for (size_t k = 0; k < cmp.times.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g %.10g %.10g\n", cmp.times[k],
                    cmp.sim_path[k][0], cmp.sim_path[k][1], cmp.ode_path[k][0],
                    cmp.ode_path[k][1]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

ordered_json comparison_summary(const ComparisonReport& rep) {
  ordered_json j;
  j["game"] = rep.game_id;
  j["alpha"] = rep.alpha;
  j["w0"] = rep.w0;
  j["beta"] = rep.beta;
  j["steps"] = rep.steps;
  j["seed"] = rep.seed;
  j["n_starts"] = rep.starts.size();
  j["endpoint_matches"] = rep.endpoint_matches;
  j["median_deviation"] = rep.median_deviation;
  ordered_json arr = ordered_json::array();
  for (const StartComparison& cmp : rep.starts) {
    ordered_json s;
    s["start"] = {cmp.p1_0, cmp.p2_0};
    s["sim_end"] = {cmp.sim_end_p1, cmp.sim_end_p2};
    s["ode_end"] = {cmp.ode_end_p1, cmp.ode_end_p2};
    s["deviation"] = cmp.deviation;
    s["endpoint_gap"] = cmp.endpoint_gap;
    s["endpoint_match"] = cmp.endpoint_match;
    arr.push_back(std::move(s));
  }
  j["starts"] = arr;
  return j;
}

std::string run_csv(const sim::RunResult& res) {
  std::ostringstream out;
  sim::write_run_csv(out, res);
  return out.str();
}

std::string run_dat(const sim::RunResult& res) {
  std::ostringstream out;
  out << "# step";
  for (size_t i = 0; i < res.agents.size(); ++i) out << " p" << (i + 1);
  for (size_t i = 0; i < res.agents.size(); ++i)
    if (!res.agents[i].w.empty()) out << " w" << (i + 1);
  out << "\n";
  char buf[48];
  for (size_t k = 0; k < res.recorded_steps.size(); ++k) {
    out << res.recorded_steps[k];
    for (const sim::AgentTrace& tr : res.agents) {
      std::snprintf(buf, sizeof buf, " %.10g", tr.policies[k][0]);
      out << buf;
    }
    for (const sim::AgentTrace& tr : res.agents) {
      if (tr.w.empty()) continue;
      std::snprintf(buf, sizeof buf, " %.10g", tr.w[k]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string run_experiment(const ExperimentSpec& spec) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), spec.id) == ids.end())
    throw ConfigError("unknown experiment '" + spec.id + "'");

  std::filesystem::create_directories(spec.out_dir);
  const std::filesystem::path dir(spec.out_dir);
  ordered_json summary;
  summary["experiment"] = spec.id;
  summary["seed"] = spec.seed;

  const auto o = spec.overrides;
  const long steps = static_cast<long>(get_num(o, "steps", 10000));

  if (spec.id == "fig_pd" || spec.id == "fig_cg" || spec.id == "fig_mixonly") {
    const std::string name = spec.id.substr(4);
    const games::NormalFormGame game = games::game_by_name(name);
    const ComparisonReport rep = trajectory_comparison(
        game, static_cast<int>(get_num(o, "n_starts", 20)), get_num(o, "w0", 0.85),
        get_num(o, "alpha", 0.001), get_num(o, "beta", 0.8), steps, spec.seed,
        spec.jobs);
    write_file(dir / (spec.id + ".csv"), comparison_csv(rep));
    write_file(dir / (spec.id + ".dat"), comparison_dat(rep));
    summary.update(comparison_summary(rep));
  } else if (spec.id == "table6") {
    std::vector<std::string> algos = {"sapga", "cjal", "wolfphc"};
    if (const auto it = o.find("algos"); it != o.end()) {
      algos.clear();
      std::istringstream in(it->second);
      std::string a;
      while (std::getline(in, a, '+')) algos.push_back(a);
    }
    const std::vector<BenchRow> rows = benchmark_table6(
        static_cast<int>(get_num(o, "games", 100)),
        static_cast<int>(get_num(o, "runs", 20)), steps, algos, spec.seed, spec.jobs);
    std::ostringstream csv, dat;
    csv << "algo,mean_usw,se_usw,mean_nsw,se_nsw\n";
    dat << "# algo mean_usw se_usw mean_nsw se_nsw\n";
    ordered_json arr = ordered_json::array();
    for (const BenchRow& row : rows) {
      csv << row.algo << "," << fmt_num(row.mean_usw) << "," << fmt_num(row.se_usw)
          << "," << fmt_num(row.mean_nsw) << "," << fmt_num(row.se_nsw) << "\n";
      dat << row.algo << " " << fmt_num(row.mean_usw) << " " << fmt_num(row.se_usw)
          << " " << fmt_num(row.mean_nsw) << " " << fmt_num(row.se_nsw) << "\n";
      arr.push_back({{"algo", row.algo},
                     {"mean_usw", row.mean_usw},
                     {"se_usw", row.se_usw},
                     {"mean_nsw", row.mean_nsw},
                     {"se_nsw", row.se_nsw}});
    }
    write_file(dir / "table6.csv", csv.str());
    write_file(dir / "table6.dat", dat.str());
    summary["rows"] = arr;
  } else if (spec.id.rfind("selfish_", 0) == 0) {
    const games::NormalFormGame game = games::game_by_name(spec.id.substr(8));
    const sim::RunResult res = against_selfish(
        game, get_num(o, "w0", 1.0), get_num(o, "p_sapga0", 0.2),
        get_num(o, "p_selfish0", 0.8), steps, spec.seed, get_num(o, "alpha", 0.001),
        get_num(o, "beta", 0.8));
    write_file(dir / (spec.id + ".csv"), run_csv(res));
    write_file(dir / (spec.id + ".dat"), run_dat(res));
    summary["final_policies"] = res.final_policies;
    summary["usw"] = res.usw;
    summary["nsw"] = res.nsw;
    summary["converged"] = res.converged;
  } else {  // pgg_*
    int n_sapga = 3, n_selfish = 0;
    if (spec.id == "pgg_2v1") n_sapga = 2, n_selfish = 1;
    if (spec.id == "pgg_1v2") n_sapga = 1, n_selfish = 2;
    const sim::RunResult res = pgg_experiment(
        static_cast<int>(get_num(o, "n_sapga", n_sapga)),
        static_cast<int>(get_num(o, "n_selfish", n_selfish)), get_num(o, "r", 2),
        get_num(o, "c", 2), get_num(o, "p0", 0.5), get_num(o, "w0", 0.85), steps,
        spec.seed, get_num(o, "alpha", 0.001), get_num(o, "beta", 0.8));
    write_file(dir / (spec.id + ".csv"), run_csv(res));
    write_file(dir / (spec.id + ".dat"), run_dat(res));
    summary["final_policies"] = res.final_policies;
    summary["usw"] = res.usw;
    summary["nsw"] = res.nsw;
    summary["converged"] = res.converged;
  }

  const std::string text = summary.dump(2);
  write_file(dir / (spec.id + "_summary.json"), text);
  return text;
}

}  // namespace saga::experiments
