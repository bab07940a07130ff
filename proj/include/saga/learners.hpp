#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "saga/common.hpp"
#include "saga/rng.hpp"

namespace saga::learners {

// Exploration probability eps0 / (1 + t/tau) at round t.
struct ExplorationSchedule {
  double eps0 = 0.1;
  double tau = 2000;
  double at(long t) const { return eps0 / (1.0 + static_cast<double>(t) / tau); }
};

// What a learner is told at the end of a round. opponent_action is only
// populated for learners that declare observes_opponent_action(); the
// simulator enforces this information boundary.
struct Observation {
  double reward = 0;
  double group_average = 0;  // arithmetic mean of all agents' rewards this round
  std::optional<int> opponent_action;
};

// Round protocol: choose_action exactly once, then observe exactly once,
// after all agents have acted.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual int choose_action(Rng& rng) = 0;
  virtual void observe(const Observation& obs) = 0;
  virtual const std::vector<double>& policy() const = 0;
  virtual int n_actions() const = 0;
  virtual std::string name() const = 0;

  virtual std::optional<double> social_attitude() const { return std::nullopt; }
  virtual bool observes_opponent_action() const { return false; }
};

// Shared helpers. sample_policy always consumes one uniform draw for the
// explore/exploit branch and one for the action, so learners that differ only
// in parameters consume identical rng streams.
int sample_policy(const std::vector<double>& policy, double explore_prob, Rng& rng);
int argmax_lowest(const std::vector<double>& values);
std::vector<double> initial_policy(int n_actions, double p0 /* NaN = uniform */);

struct PhcConfig {
  double alpha = 0.001;  // policy step
  double beta = 0.8;     // value step
  double p0 = std::numeric_limits<double>::quiet_NaN();
  ExplorationSchedule explore;
};

// Q-learning plus a fixed-size policy shift toward the greedy action.
class PhcLearner : public Learner {
 public:
  PhcLearner(int n_actions, PhcConfig cfg);

  int choose_action(Rng& rng) override;
  void observe(const Observation& obs) override;
  const std::vector<double>& policy() const override { return policy_; }
  int n_actions() const override { return static_cast<int>(q_.size()); }
  std::string name() const override { return "phc"; }

  // Core update, exposed for direct-drive tests: value update for the taken
  // action, then the hill-climb on the policy.
  void update(int action, double reward);

  const std::vector<double>& q_values() const { return q_; }
  long rounds() const { return t_; }

 private:
  PhcConfig cfg_;
  std::vector<double> q_;
  std::vector<double> policy_;
  int last_action_ = -1;
  long t_ = 0;
};

struct SapgaConfig {
  double w0 = 0.85;
  double alpha_pi = 0.001;
  double alpha_w = 0.001;
  double beta = 0.8;
  double p0 = std::numeric_limits<double>::quiet_NaN();
  ExplorationSchedule explore;
};

// Socially-aware policy gradient ascent: twin value tables for own reward and
// the group average, blended by an adaptive social attitude w; the policy
// hill-climbs on the blend and w moves with the sign of (own value - social
// value).
class SapgaLearner : public Learner {
 public:
  SapgaLearner(int n_actions, SapgaConfig cfg);

  int choose_action(Rng& rng) override;
  void observe(const Observation& obs) override;
  const std::vector<double>& policy() const override { return policy_; }
  int n_actions() const override { return static_cast<int>(q_idv_.size()); }
  std::string name() const override { return "sapga"; }
  std::optional<double> social_attitude() const override { return w_; }

  void update(int action, double reward, double group_average);

  double w() const { return w_; }
  const std::vector<double>& q_individual() const { return q_idv_; }
  const std::vector<double>& q_social() const { return q_soc_; }
  const std::vector<double>& q_combined() const { return q_comb_; }

 private:
  void recompute_combined();

  SapgaConfig cfg_;
  std::vector<double> q_idv_, q_soc_, q_comb_;
  std::vector<double> policy_;
  double w_;
  int last_action_ = -1;
  long t_ = 0;
};

struct WolfPhcConfig {
  double alpha = 0.001;  // base step; delta_win = alpha/4, delta_lose = alpha
  double beta = 0.8;
  double delta_win = std::numeric_limits<double>::quiet_NaN();
  double delta_lose = std::numeric_limits<double>::quiet_NaN();
  double p0 = std::numeric_limits<double>::quiet_NaN();
  ExplorationSchedule explore;
};

// Variable-step hill climber: cautious steps while winning (current policy
// values above the average policy), fast steps while losing. Ties count as
// winning.
class WolfPhcLearner : public Learner {
 public:
  WolfPhcLearner(int n_actions, WolfPhcConfig cfg);

  int choose_action(Rng& rng) override;
  void observe(const Observation& obs) override;
  const std::vector<double>& policy() const override { return policy_; }
  int n_actions() const override { return static_cast<int>(q_.size()); }
  std::string name() const override { return "wolfphc"; }

  void update(int action, double reward);

  const std::vector<double>& average_policy() const { return avg_policy_; }

 private:
  WolfPhcConfig cfg_;
  std::vector<double> q_;
  std::vector<double> policy_, avg_policy_;
  long visits_ = 0;
  int last_action_ = -1;
  long t_ = 0;
};

struct CjalConfig {
  long n_explore = 500;  // initial uniformly random rounds
  ExplorationSchedule explore{0.04, 2000};
};

// Conditional joint-action learner: counts joint actions, estimates the
// opponent's behavior conditioned on its own action together with per-joint
// reward averages, and acts greedily on the conditional expected payoff.
// Requires opponent-action observability.
class CjalLearner : public Learner {
 public:
  CjalLearner(int n_actions, CjalConfig cfg);

  int choose_action(Rng& rng) override;
  void observe(const Observation& obs) override;
  const std::vector<double>& policy() const override { return policy_; }
  int n_actions() const override { return n_actions_; }
  std::string name() const override { return "cjal"; }
  bool observes_opponent_action() const override { return true; }

  void update(int own_action, int opponent_action, double reward);

  // P(opponent action | own action) estimates; uniform when unvisited.
  std::vector<double> conditional_opponent(int own_action) const;
  std::vector<double> expected_payoffs() const;

 private:
  void refresh_policy();

  CjalConfig cfg_;
  int n_actions_;
  std::vector<std::vector<long>> counts_;        // [own][opp]
  std::vector<std::vector<double>> reward_sum_;  // [own][opp]
  std::vector<double> policy_;
  int last_action_ = -1;
  long t_ = 0;
};

struct FixedConfig {
  double p = 0.5;  // probability of action 0 (two-action games)
};

class FixedLearner : public Learner {
 public:
  FixedLearner(int n_actions, FixedConfig cfg);
  FixedLearner(int n_actions, std::vector<double> policy);

  int choose_action(Rng& rng) override;
  void observe(const Observation&) override {}
  const std::vector<double>& policy() const override { return policy_; }
  int n_actions() const override { return static_cast<int>(policy_.size()); }
  std::string name() const override { return "fixed"; }

 private:
  std::vector<double> policy_;
};

// Build a learner from a spec string such as
//   sapga(w0=0.85,api=0.001,aw=0.001,beta=0.8)  phc(alpha=0.001)
//   wolfphc(alpha=0.001)  cjal()  fixed(p=0.8)
// Unknown learner names or keys raise ConfigError naming the offending token.
std::unique_ptr<Learner> make_learner(const std::string& spec, int n_actions);

// Split a comma-separated list of learner specs, respecting parentheses.
std::vector<std::string> split_learner_specs(const std::string& list);

}  // namespace saga::learners
