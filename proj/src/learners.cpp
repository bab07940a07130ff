#include "saga/learners.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace saga::learners {

int sample_policy(const std::vector<double>& policy, double explore_prob, Rng& rng) {
  const double gate = rng.uniform();
  if (gate < explore_prob) return rng.uniform_int(static_cast<int>(policy.size()));
  const double u = rng.uniform();
  double cum = 0;
  for (size_t a = 0; a + 1 < policy.size(); ++a) {
    cum += policy[a];
    if (u < cum) return static_cast<int>(a);
  }
  return static_cast<int>(policy.size()) - 1;
}

int argmax_lowest(const std::vector<double>& values) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(values.size()); ++a)
    if (values[static_cast<size_t>(a)] > values[static_cast<size_t>(best)]) best = a;
  return best;
}

std::vector<double> initial_policy(int n_actions, double p0) {
  if (n_actions < 2) throw ContractViolation("learner needs at least 2 actions");
  if (std::isnan(p0))
    return std::vector<double>(static_cast<size_t>(n_actions), 1.0 / n_actions);
  if (p0 < 0 || p0 > 1) throw ConfigError("initial policy p0 must lie in [0,1]");
  // p0 is the probability of action 0; the rest is spread evenly.
  std::vector<double> pi(static_cast<size_t>(n_actions), (1.0 - p0) / (n_actions - 1));
  pi[0] = p0;
  return pi;
}

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Hill-climb toward the greedy action of `values`: every other action loses
// `step` (floored at 0) and the greedy action absorbs the slack, which keeps
// the policy summing to 1 by construction.
void hill_climb(std::vector<double>& policy, const std::vector<double>& values,
                double step) {
  const int greedy = argmax_lowest(values);
  double others = 0;
  for (int a = 0; a < static_cast<int>(policy.size()); ++a) {
    if (a == greedy) continue;
    policy[static_cast<size_t>(a)] = clamp01(policy[static_cast<size_t>(a)] - step);
    others += policy[static_cast<size_t>(a)];
  }
  policy[static_cast<size_t>(greedy)] = 1.0 - others;
}

}  // namespace

PhcLearner::PhcLearner(int n_actions, PhcConfig cfg)
    : cfg_(cfg),
      q_(static_cast<size_t>(n_actions), 0.0),
      policy_(initial_policy(n_actions, cfg.p0)) {
  if (!(cfg_.alpha > 0 && cfg_.alpha <= 1)) throw ConfigError("phc alpha must be in (0,1]");
  if (!(cfg_.beta > 0 && cfg_.beta <= 1)) throw ConfigError("phc beta must be in (0,1]");
}

int PhcLearner::choose_action(Rng& rng) {
  last_action_ = sample_policy(policy_, cfg_.explore.at(t_), rng);
  return last_action_;
}

void PhcLearner::observe(const Observation& obs) {
  if (last_action_ < 0) throw ContractViolation("observe before choose_action");
  update(last_action_, obs.reward);
}

void PhcLearner::update(int action, double reward) {
  q_[static_cast<size_t>(action)] =
      (1 - cfg_.beta) * q_[static_cast<size_t>(action)] + cfg_.beta * reward;
  hill_climb(policy_, q_, cfg_.alpha);
  ++t_;
}

SapgaLearner::SapgaLearner(int n_actions, SapgaConfig cfg)
    : cfg_(cfg),
      q_idv_(static_cast<size_t>(n_actions), 0.0),
      q_soc_(static_cast<size_t>(n_actions), 0.0),
      q_comb_(static_cast<size_t>(n_actions), 0.0),
      policy_(initial_policy(n_actions, cfg.p0)),
      w_(cfg.w0) {
  if (w_ < 0 || w_ > 1) throw ConfigError("sapga w0 must lie in [0,1]");
  if (!(cfg_.alpha_pi > 0 && cfg_.alpha_pi <= 1))
    throw ConfigError("sapga api must be in (0,1]");
  if (cfg_.alpha_w < 0 || cfg_.alpha_w > 1)
    throw ConfigError("sapga aw must be in [0,1]");
}

int SapgaLearner::choose_action(Rng& rng) {
  last_action_ = sample_policy(policy_, cfg_.explore.at(t_), rng);
  return last_action_;
}

void SapgaLearner::observe(const Observation& obs) {
  if (last_action_ < 0) throw ContractViolation("observe before choose_action");
  update(last_action_, obs.reward, obs.group_average);
}

void SapgaLearner::recompute_combined() {
  for (size_t a = 0; a < q_comb_.size(); ++a)
    q_comb_[a] = (1 - w_) * q_idv_[a] + w_ * q_soc_[a];
}

void SapgaLearner::update(int action, double reward, double group_average) {
  const size_t a = static_cast<size_t>(action);
  q_idv_[a] = (1 - cfg_.beta) * q_idv_[a] + cfg_.beta * reward;
  q_soc_[a] = (1 - cfg_.beta) * q_soc_[a] + cfg_.beta * group_average;
  recompute_combined();
  hill_climb(policy_, q_comb_, cfg_.alpha_pi);
  // Attitude moves with the sign of (own value - social value) under the
  // just-updated policy and tables.
  double v_idv = 0, v_soc = 0;
  for (size_t k = 0; k < policy_.size(); ++k) {
    v_idv += policy_[k] * q_idv_[k];
    v_soc += policy_[k] * q_soc_[k];
  }
  w_ = clamp01(w_ + cfg_.alpha_w * (v_idv - v_soc));
  recompute_combined();
  ++t_;
}

WolfPhcLearner::WolfPhcLearner(int n_actions, WolfPhcConfig cfg)
    : cfg_(cfg),
      q_(static_cast<size_t>(n_actions), 0.0),
      policy_(initial_policy(n_actions, cfg.p0)),
      avg_policy_(policy_) {
  if (std::isnan(cfg_.delta_win)) cfg_.delta_win = cfg_.alpha / 4;
  if (std::isnan(cfg_.delta_lose)) cfg_.delta_lose = cfg_.alpha;
  if (!(cfg_.delta_win > 0) || !(cfg_.delta_lose > 0))
    throw ConfigError("wolfphc step sizes must be positive");
  if (cfg_.delta_win > cfg_.delta_lose)
    throw ConfigError("wolfphc needs delta_win <= delta_lose");
}

int WolfPhcLearner::choose_action(Rng& rng) {
  last_action_ = sample_policy(policy_, cfg_.explore.at(t_), rng);
  return last_action_;
}

void WolfPhcLearner::observe(const Observation& obs) {
  if (last_action_ < 0) throw ContractViolation("observe before choose_action");
  update(last_action_, obs.reward);
}

void WolfPhcLearner::update(int action, double reward) {
  const size_t a = static_cast<size_t>(action);
  q_[a] = (1 - cfg_.beta) * q_[a] + cfg_.beta * reward;
  ++visits_;
  for (size_t k = 0; k < avg_policy_.size(); ++k)
    avg_policy_[k] += (policy_[k] - avg_policy_[k]) / static_cast<double>(visits_);
  double v_now = 0, v_avg = 0;
  for (size_t k = 0; k < policy_.size(); ++k) {
    v_now += policy_[k] * q_[k];
    v_avg += avg_policy_[k] * q_[k];
  }
  const double step = v_now >= v_avg ? cfg_.delta_win : cfg_.delta_lose;
  hill_climb(policy_, q_, step);
  ++t_;
}

CjalLearner::CjalLearner(int n_actions, CjalConfig cfg)
    : cfg_(cfg),
      n_actions_(n_actions),
      counts_(static_cast<size_t>(n_actions), std::vector<long>(static_cast<size_t>(n_actions), 0)),
      reward_sum_(static_cast<size_t>(n_actions), std::vector<double>(static_cast<size_t>(n_actions), 0.0)),
      policy_(static_cast<size_t>(n_actions), 1.0 / n_actions) {
  if (cfg_.n_explore < 0) throw ConfigError("cjal nexplore must be >= 0");
}

std::vector<double> CjalLearner::conditional_opponent(int own_action) const {
  const auto& row = counts_[static_cast<size_t>(own_action)];
  long total = 0;
  for (long c : row) total += c;
  std::vector<double> p(row.size(), 1.0 / static_cast<double>(row.size()));
  if (total > 0)
    for (size_t j = 0; j < row.size(); ++j)
      p[j] = static_cast<double>(row[j]) / static_cast<double>(total);
  return p;
}

std::vector<double> CjalLearner::expected_payoffs() const {
  std::vector<double> ep(static_cast<size_t>(n_actions_), 0.0);
  for (int i = 0; i < n_actions_; ++i) {
    const std::vector<double> cond = conditional_opponent(i);
    double v = 0;
    for (int j = 0; j < n_actions_; ++j) {
      const long n = counts_[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const double r_hat =
          n > 0 ? reward_sum_[static_cast<size_t>(i)][static_cast<size_t>(j)] /
                      static_cast<double>(n)
                : 0.0;
      v += cond[static_cast<size_t>(j)] * r_hat;
    }
    ep[static_cast<size_t>(i)] = v;
  }
  return ep;
}

void CjalLearner::refresh_policy() {
  if (t_ < cfg_.n_explore) {
    std::fill(policy_.begin(), policy_.end(), 1.0 / n_actions_);
    return;
  }
  const double eps = cfg_.explore.at(t_ - cfg_.n_explore);
  const int greedy = argmax_lowest(expected_payoffs());
  for (int a = 0; a < n_actions_; ++a)
    policy_[static_cast<size_t>(a)] =
        eps / n_actions_ + (a == greedy ? 1.0 - eps : 0.0);
}

int CjalLearner::choose_action(Rng& rng) {
  refresh_policy();
  // Uniform draws during the initial exploration phase, eps-greedy afterward.
  if (t_ < cfg_.n_explore) {
    rng.uniform();  // keep the two-draw consumption pattern
    last_action_ = rng.uniform_int(n_actions_);
    return last_action_;
  }
  const double eps = cfg_.explore.at(t_ - cfg_.n_explore);
  const double gate = rng.uniform();
  if (gate < eps) {
    last_action_ = rng.uniform_int(n_actions_);
  } else {
    last_action_ = argmax_lowest(expected_payoffs());
  }
  return last_action_;
}

void CjalLearner::observe(const Observation& obs) {
  if (last_action_ < 0) throw ContractViolation("observe before choose_action");
  if (!obs.opponent_action)
    throw ContractViolation("cjal requires the opponent's action");
  update(last_action_, *obs.opponent_action, obs.reward);
}

void CjalLearner::update(int own_action, int opponent_action, double reward) {
  counts_[static_cast<size_t>(own_action)][static_cast<size_t>(opponent_action)] += 1;
  reward_sum_[static_cast<size_t>(own_action)][static_cast<size_t>(opponent_action)] += reward;
  ++t_;
  refresh_policy();
}

FixedLearner::FixedLearner(int n_actions, FixedConfig cfg)
    : policy_(initial_policy(n_actions, cfg.p)) {}

FixedLearner::FixedLearner(int n_actions, std::vector<double> policy)
    : policy_(std::move(policy)) {
  if (static_cast<int>(policy_.size()) != n_actions)
    throw ConfigError("fixed policy arity mismatch");
}

int FixedLearner::choose_action(Rng& rng) {
  return sample_policy(policy_, 0.0, rng);
}

namespace {

struct ParsedSpec {
  std::string name;
  std::vector<std::pair<std::string, double>> kv;
};

ParsedSpec parse_spec(const std::string& spec) {
  ParsedSpec out;
  const auto open = spec.find('(');
  if (open == std::string::npos) {
    out.name = spec;
  } else {
    if (spec.back() != ')')
      throw ConfigError("learner spec '" + spec + "' missing closing ')'");
    out.name = spec.substr(0, open);
    const std::string args = spec.substr(open + 1, spec.size() - open - 2);
    std::istringstream in(args);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("learner spec token '" + item + "' is not key=value");
      const std::string key = item.substr(0, eq);
      try {
        size_t used = 0;
        const double value = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
        out.kv.emplace_back(key, value);
      } catch (const std::exception&) {
        throw ConfigError("learner spec value in '" + item + "' is not a number");
      }
    }
  }
  // strip whitespace around the name
  while (!out.name.empty() && std::isspace(static_cast<unsigned char>(out.name.front())))
    out.name.erase(out.name.begin());
  while (!out.name.empty() && std::isspace(static_cast<unsigned char>(out.name.back())))
    out.name.pop_back();
  return out;
}

[[noreturn]] void unknown_key(const std::string& learner, const std::string& key) {
  throw ConfigError("unknown " + learner + " parameter '" + key + "'");
}

}  // namespace

std::unique_ptr<Learner> make_learner(const std::string& spec, int n_actions) {
  const ParsedSpec p = parse_spec(spec);
  if (p.name == "sapga") {
    SapgaConfig cfg;
    for (const auto& [k, v] : p.kv) {
      if (k == "w0") cfg.w0 = v;
      else if (k == "api") cfg.alpha_pi = v;
      else if (k == "aw") cfg.alpha_w = v;
      else if (k == "beta") cfg.beta = v;
      else if (k == "p0") cfg.p0 = v;
      else if (k == "eps0") cfg.explore.eps0 = v;
      else if (k == "tau") cfg.explore.tau = v;
      else unknown_key("sapga", k);
    }
    return std::make_unique<SapgaLearner>(n_actions, cfg);
  }
  if (p.name == "phc") {
    PhcConfig cfg;
    for (const auto& [k, v] : p.kv) {
      if (k == "alpha") cfg.alpha = v;
      else if (k == "beta") cfg.beta = v;
      else if (k == "p0") cfg.p0 = v;
      else if (k == "eps0") cfg.explore.eps0 = v;
      else if (k == "tau") cfg.explore.tau = v;
      else unknown_key("phc", k);
    }
    return std::make_unique<PhcLearner>(n_actions, cfg);
  }
  if (p.name == "wolfphc") {
    WolfPhcConfig cfg;
    for (const auto& [k, v] : p.kv) {
      if (k == "alpha") cfg.alpha = v;
      else if (k == "beta") cfg.beta = v;
      else if (k == "dwin") cfg.delta_win = v;
      else if (k == "dlose") cfg.delta_lose = v;
      else if (k == "p0") cfg.p0 = v;
      else if (k == "eps0") cfg.explore.eps0 = v;
      else if (k == "tau") cfg.explore.tau = v;
      else unknown_key("wolfphc", k);
    }
    return std::make_unique<WolfPhcLearner>(n_actions, cfg);
  }
  if (p.name == "cjal") {
    CjalConfig cfg;
    for (const auto& [k, v] : p.kv) {
      if (k == "nexplore") cfg.n_explore = static_cast<long>(v);
      else if (k == "eps0") cfg.explore.eps0 = v;
      else if (k == "tau") cfg.explore.tau = v;
      else unknown_key("cjal", k);
    }
    return std::make_unique<CjalLearner>(n_actions, cfg);
  }
  if (p.name == "fixed") {
    FixedConfig cfg;
    for (const auto& [k, v] : p.kv) {
      if (k == "p" || k == "p0") cfg.p = v;
      else unknown_key("fixed", k);
    }
    return std::make_unique<FixedLearner>(n_actions, cfg);
  }
  throw ConfigError("unknown learner '" + p.name + "'");
}

std::vector<std::string> split_learner_specs(const std::string& list) {
  std::vector<std::string> specs;
  std::string cur;
  int depth = 0;
  for (char ch : list) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      specs.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) specs.push_back(cur);
  for (std::string& s : specs) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  }
  return specs;
}

}  // namespace saga::learners
