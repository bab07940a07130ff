#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saga/common.hpp"
#include "saga/rng.hpp"

namespace saga::games {

// One action index per player.
using JointAction = std::vector<int>;

// An N-player normal-form game. Payoffs are stored per player as a flat
// row-major tensor over joint actions (player 0's action varies slowest).
// Immutable after construction.
class NormalFormGame {
 public:
  NormalFormGame(std::vector<int> actions_per_player,
                 std::vector<std::vector<double>> payoffs_per_player,
                 std::string id = "");

  // Convenience for 2x2 games: payoffs in cell order
  // (0,0), (0,1), (1,0), (1,1), one array per player.
  static NormalFormGame make_2x2(const std::array<double, 4>& player1,
                                 const std::array<double, 4>& player2,
                                 std::string id = "");

  int n_players() const { return static_cast<int>(actions_.size()); }
  int n_actions(int player) const { return actions_.at(static_cast<size_t>(player)); }
  const std::vector<int>& actions_per_player() const { return actions_; }
  int n_cells() const { return n_cells_; }
  bool is_2x2() const;
  const std::string& id() const { return id_; }

  double payoff(const JointAction& joint, int player) const;
  double payoff_flat(int cell, int player) const {
    return payoff_[static_cast<size_t>(player)][static_cast<size_t>(cell)];
  }
  int cell_index(const JointAction& joint) const;
  JointAction cell_action(int cell) const;

  // 2x2 accessor in own-action-first indexing: the payoff to `player` when it
  // plays `own` and the opponent plays `opp`.
  double own_payoff(int player, int own, int opp) const;

  bool operator==(const NormalFormGame& other) const;

 private:
  std::vector<int> actions_;
  std::vector<int> strides_;
  int n_cells_ = 0;
  std::vector<std::vector<double>> payoff_;  // [player][cell]
  std::string id_;
};

// One probability vector per player.
struct MixedProfile {
  std::vector<std::vector<double>> probs;

  static MixedProfile pure(const NormalFormGame& game, const JointAction& joint);
  static MixedProfile uniform(const NormalFormGame& game);
  // Throws ContractViolation unless dimensions match the game and every
  // vector is a distribution (entries >= 0, sum within 1e-12 of 1).
  void validate(const NormalFormGame& game) const;
};

// Payoff-difference parameterization of a 2x2 game, per player:
//   u = r11 + r22 - r12 - r21, c = r12 - r22, d = r21 - r22,
//   e = own r22 minus the opponent's r22,
// with r^{jk} read own-action-first.
struct ReducedCoefficients {
  double u = 0, c = 0, d = 0, e = 0;
};

enum class CategoryTag { DominantStrategy, TwoPureNE, OneMixedNE };

struct GameCategory {
  CategoryTag tag;
  // Strictly dominant action per player, where one exists.
  std::array<std::optional<int>, 2> dominant_action;
  std::vector<JointAction> pure_ne;
};

const char* to_string(CategoryTag tag);

// Expected payoff of `player` under a mixed profile (sum over joint actions
// of the product of action probabilities times the payoff).
double expected_payoff(const NormalFormGame& game, const MixedProfile& profile,
                       int player);

// Average of all players' expected payoffs; identical for every player.
double social_payoff(const NormalFormGame& game, const MixedProfile& profile,
                     int player);

ReducedCoefficients reduced_coefficients(const NormalFormGame& game, int player);

// Best-response classification of a 2x2 game. Throws DegenerateGame when a
// payoff tie makes the dominance/NE structure non-strict.
GameCategory classify_game(const NormalFormGame& game);

// Exhaustive weak pure-NE enumeration: a joint action is returned iff no
// unilateral deviation strictly improves the deviator.
std::vector<JointAction> pure_nash_equilibria(const NormalFormGame& game);

// Interior mixed NE of a 2x2 game via the indifference conditions; absent
// when no interior solution exists.
std::optional<MixedProfile> mixed_ne_2x2(const NormalFormGame& game);

// True iff player 2's payoff matrix is the transpose of player 1's.
bool is_symmetric(const NormalFormGame& game);

inline double usw(double v1, double v2) { return v1 + v2; }
inline double nsw(double v1, double v2) { return v1 * v2; }

// Random 2x2 game whose payoffs are, per player, a permutation of {1,2,3,4},
// rejection-sampled so that no cell is ranked 4 by both players.
// Deterministic given the seed.
NormalFormGame random_ordinal_conflict_game(std::uint64_t seed);

// N-player public goods game: two actions (0 = contribute, 1 = withhold).
// In a joint action with k contributors, a withholder earns r*k*c/n and a
// contributor earns that minus c. Requires n >= 2, r > 1, c > 0.
NormalFormGame pgg_game(int n, double r, double c);

// Canonical benchmark games.
NormalFormGame pd_game();       // prisoner's dilemma, payoffs 3/0/5/1
NormalFormGame cg_game();       // two-NE coordination game, 3:4 vs 4:3
NormalFormGame mixonly_game();  // single-mixed-NE game with optimum at (C,D)

// Resolve `pd`, `cg`, `mixonly`, `pgg:N,r,c` or fall back to reading a game
// definition file at that path.
NormalFormGame resolve_game(const std::string& name_or_path);
NormalFormGame game_by_name(const std::string& name);  // canonical names only

// Text format: `players N`, `actions n1 ... nN`, and one
// `payoffs i v1 v2 ...` line per player (row-major over joint actions).
NormalFormGame parse_game_text(std::istream& in, const std::string& id = "");
NormalFormGame parse_game_file(const std::string& path);
std::string to_text(const NormalFormGame& game);

}  // namespace saga::games
