#include "saga/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace saga::sim {

RunResult run(const RunConfig& config) {
  const games::NormalFormGame& game = config.game;
  const int n = game.n_players();
  if (static_cast<int>(config.learner_specs.size()) != n)
    throw ConfigError("game has " + std::to_string(n) + " seats but " +
                      std::to_string(config.learner_specs.size()) +
                      " learner specs were given");
  if (config.steps < 1) throw ConfigError("steps must be >= 1");
  if (config.record_every < 1) throw ConfigError("record_every must be >= 1");

  std::vector<std::unique_ptr<learners::Learner>> agents;
  std::vector<Rng> streams;
  Rng master(config.seed);
  for (int i = 0; i < n; ++i) {
    agents.push_back(learners::make_learner(config.learner_specs[static_cast<size_t>(i)],
                                            game.n_actions(i)));
    if (agents.back()->observes_opponent_action() && n != 2)
      throw ConfigError("learner '" + config.learner_specs[static_cast<size_t>(i)] +
                        "' needs an opponent action and only supports 2-player games");
    streams.push_back(master.split(static_cast<std::uint64_t>(i)));
  }

  RunResult res;
  res.agents.resize(static_cast<size_t>(n));
  res.rewards.assign(static_cast<size_t>(n), {});
  res.actions.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    res.agents[static_cast<size_t>(i)].spec = config.learner_specs[static_cast<size_t>(i)];
    res.rewards[static_cast<size_t>(i)].reserve(static_cast<size_t>(config.steps));
    res.actions[static_cast<size_t>(i)].reserve(static_cast<size_t>(config.steps));
  }

  const auto record = [&](long step) {
    res.recorded_steps.push_back(step);
    for (int i = 0; i < n; ++i) {
      AgentTrace& tr = res.agents[static_cast<size_t>(i)];
      tr.policies.push_back(agents[static_cast<size_t>(i)]->policy());
      if (auto w = agents[static_cast<size_t>(i)]->social_attitude())
        tr.w.push_back(*w);
    }
  };
  record(0);

  games::JointAction joint(static_cast<size_t>(n));
  for (long t = 0; t < config.steps; ++t) {
    for (int i = 0; i < n; ++i)
      joint[static_cast<size_t>(i)] =
          agents[static_cast<size_t>(i)]->choose_action(streams[static_cast<size_t>(i)]);
    const int cell = game.cell_index(joint);
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += game.payoff_flat(cell, i);
    const double group_average = sum / n;
    for (int i = 0; i < n; ++i) {
      const double reward = game.payoff_flat(cell, i);
      learners::Observation obs;
      obs.reward = reward;
      obs.group_average = group_average;
      // Information boundary: only capability-declaring learners see the
      // opponent's action.
      if (agents[static_cast<size_t>(i)]->observes_opponent_action())
        obs.opponent_action = joint[static_cast<size_t>(1 - i)];
      agents[static_cast<size_t>(i)]->observe(obs);
      res.rewards[static_cast<size_t>(i)].push_back(reward);
      res.actions[static_cast<size_t>(i)].push_back(joint[static_cast<size_t>(i)]);
    }
    if ((t + 1) % config.record_every == 0 || t + 1 == config.steps) record(t + 1);
  }

  res.converged = true;
  for (int i = 0; i < n; ++i) {
    const auto& hist = res.agents[static_cast<size_t>(i)].policies;
    const int window = std::min<int>(config.convergence.window,
                                     static_cast<int>(hist.size()));
    res.converged = res.converged &&
                    (window >= 2 && detect_convergence(hist, window, config.convergence.tol));
    res.final_policies.push_back(hist.back());
  }

  const long fw = std::min<long>(config.final_window, config.steps);
  for (int i = 0; i < n; ++i) {
    const auto& rw = res.rewards[static_cast<size_t>(i)];
    res.final_window_payoff.push_back(
        std::accumulate(rw.end() - fw, rw.end(), 0.0) / static_cast<double>(fw));
  }
  games::MixedProfile final_prof;
  final_prof.probs = res.final_policies;
  for (int i = 0; i < n; ++i)
    res.final_policy_payoff.push_back(games::expected_payoff(game, final_prof, i));

  const auto welfare = [](const std::vector<double>& v, double& usw_out, double& nsw_out) {
    usw_out = std::accumulate(v.begin(), v.end(), 0.0);
    nsw_out = 1;
    for (double x : v) nsw_out *= x;
  };
  welfare(res.final_window_payoff, res.usw, res.nsw);
  welfare(res.final_policy_payoff, res.usw_final_policies, res.nsw_final_policies);
  return res;
}

bool detect_convergence(const std::vector<std::vector<double>>& policy_history,
                        int window, double tol) {
  if (window < 2) throw ContractViolation("convergence window needs >= 2 samples");
  if (static_cast<int>(policy_history.size()) < window) return false;
  const size_t begin = policy_history.size() - static_cast<size_t>(window);
  const size_t dims = policy_history.back().size();
  for (size_t d = 0; d < dims; ++d) {
    double lo = policy_history[begin][d], hi = lo;
    for (size_t s = begin; s < policy_history.size(); ++s) {
      lo = std::min(lo, policy_history[s][d]);
      hi = std::max(hi, policy_history[s][d]);
    }
    if (hi - lo > tol) return false;
  }
  return true;
}

BatchStats run_batch(const std::vector<RunConfig>& configs, int runs_per_config,
                     std::uint64_t seed_base, int jobs) {
  if (runs_per_config < 1) throw ConfigError("runs_per_config must be >= 1");
  const size_t n_tasks = configs.size() * static_cast<size_t>(runs_per_config);
  std::vector<double> usw(n_tasks), nsw(n_tasks);

  std::atomic<size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      const size_t ci = task / static_cast<size_t>(runs_per_config);
      const size_t ri = task % static_cast<size_t>(runs_per_config);
      RunConfig cfg = configs[ci];
      cfg.seed = derive_seed(seed_base, ci, ri);
      const RunResult r = run(cfg);
      usw[task] = r.usw;
      nsw[task] = r.nsw;
    }
  };

  if (jobs == 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n_tasks)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  BatchStats stats;
  stats.total_runs = static_cast<long>(n_tasks);
  for (size_t ci = 0; ci < configs.size(); ++ci) {
    double su = 0, sn = 0;
    for (int ri = 0; ri < runs_per_config; ++ri) {
      su += usw[ci * static_cast<size_t>(runs_per_config) + static_cast<size_t>(ri)];
      sn += nsw[ci * static_cast<size_t>(runs_per_config) + static_cast<size_t>(ri)];
    }
    stats.per_config_usw.push_back(su / runs_per_config);
    stats.per_config_nsw.push_back(sn / runs_per_config);
  }
  const auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) {
      se = 0;
      return;
    }
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (static_cast<double>(v.size()) - 1)) /
         std::sqrt(static_cast<double>(v.size()));
  };
  mean_se(stats.per_config_usw, stats.mean_usw, stats.se_usw);
  mean_se(stats.per_config_nsw, stats.mean_nsw, stats.se_nsw);
  return stats;
}

void write_run_csv(std::ostream& out, const RunResult& res) {
  size_t max_actions = 0;
  for (const AgentTrace& tr : res.agents)
    max_actions = std::max(max_actions, tr.policies.front().size());
  out << "step,agent";
  for (size_t a = 0; a < max_actions; ++a) out << ",p_action" << a;
  out << ",w,reward\n";
  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.10g", v);
    out << buf;
  };
  for (size_t s = 0; s < res.recorded_steps.size(); ++s) {
    const long step = res.recorded_steps[s];
    for (size_t i = 0; i < res.agents.size(); ++i) {
      const AgentTrace& tr = res.agents[i];
      out << step << "," << i;
      for (size_t a = 0; a < max_actions; ++a)
        put(a < tr.policies[s].size() ? tr.policies[s][a]
                                      : std::numeric_limits<double>::quiet_NaN());
      put(tr.w.empty() ? std::numeric_limits<double>::quiet_NaN() : tr.w[s]);
      put(step > 0 ? res.rewards[i][static_cast<size_t>(step) - 1]
                   : std::numeric_limits<double>::quiet_NaN());
      out << "\n";
    }
  }
}

std::string run_summary_json(const RunConfig& config, const RunResult& res) {
  nlohmann::ordered_json j;
  j["game"] = config.game.id();
  j["agents"] = config.learner_specs;
  j["steps"] = config.steps;
  j["seed"] = config.seed;
  j["record_every"] = config.record_every;
  j["converged"] = res.converged;
  j["usw"] = res.usw;
  j["nsw"] = res.nsw;
  j["usw_final_policies"] = res.usw_final_policies;
  j["nsw_final_policies"] = res.nsw_final_policies;
  j["final_policies"] = res.final_policies;
  nlohmann::ordered_json w = nlohmann::ordered_json::array();
  for (const AgentTrace& tr : res.agents)
    w.push_back(tr.w.empty() ? nlohmann::ordered_json()
                             : nlohmann::ordered_json(tr.w.back()));
  j["final_w"] = w;
  j["final_window_payoff"] = res.final_window_payoff;
  return j.dump(2);
}

}  // namespace saga::sim
