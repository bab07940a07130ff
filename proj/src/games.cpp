#include "saga/games.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace saga::games {

NormalFormGame::NormalFormGame(std::vector<int> actions_per_player,
                               std::vector<std::vector<double>> payoffs_per_player,
                               std::string id)
    : actions_(std::move(actions_per_player)),
      payoff_(std::move(payoffs_per_player)),
      id_(std::move(id)) {
  if (actions_.size() < 2)
    throw ContractViolation("game needs at least 2 players");
  for (int a : actions_)
    if (a < 2) throw ContractViolation("every player needs at least 2 actions");
  n_cells_ = 1;
  for (int a : actions_) n_cells_ *= a;
  strides_.assign(actions_.size(), 1);
  for (int i = static_cast<int>(actions_.size()) - 2; i >= 0; --i)
    strides_[static_cast<size_t>(i)] =
        strides_[static_cast<size_t>(i) + 1] * actions_[static_cast<size_t>(i) + 1];
  if (payoff_.size() != actions_.size())
    throw ContractViolation("need one payoff tensor per player");
  for (const auto& p : payoff_)
    if (static_cast<int>(p.size()) != n_cells_)
      throw ContractViolation("payoff tensor must cover every joint action");
}

NormalFormGame NormalFormGame::make_2x2(const std::array<double, 4>& player1,
                                        const std::array<double, 4>& player2,
                                        std::string id) {
  return NormalFormGame({2, 2},
                        {{player1.begin(), player1.end()},
                         {player2.begin(), player2.end()}},
                        std::move(id));
}

bool NormalFormGame::is_2x2() const {
  return n_players() == 2 && actions_[0] == 2 && actions_[1] == 2;
}

int NormalFormGame::cell_index(const JointAction& joint) const {
  if (joint.size() != actions_.size())
    throw ContractViolation("joint action arity mismatch");
  int idx = 0;
  for (size_t i = 0; i < joint.size(); ++i) {
    if (joint[i] < 0 || joint[i] >= actions_[i])
      throw ContractViolation("action index out of range");
    idx += joint[i] * strides_[i];
  }
  return idx;
}

JointAction NormalFormGame::cell_action(int cell) const {
  JointAction joint(actions_.size());
  for (size_t i = 0; i < actions_.size(); ++i) {
    joint[i] = (cell / strides_[i]) % actions_[i];
  }
  return joint;
}

double NormalFormGame::payoff(const JointAction& joint, int player) const {
  return payoff_flat(cell_index(joint), player);
}

double NormalFormGame::own_payoff(int player, int own, int opp) const {
  if (!is_2x2()) throw UnsupportedShape("own_payoff requires a 2x2 game");
  return player == 0 ? payoff({own, opp}, 0) : payoff({opp, own}, 1);
}

bool NormalFormGame::operator==(const NormalFormGame& other) const {
  return actions_ == other.actions_ && payoff_ == other.payoff_;
}

MixedProfile MixedProfile::pure(const NormalFormGame& game, const JointAction& joint) {
  MixedProfile mp;
  mp.probs.resize(static_cast<size_t>(game.n_players()));
  for (int i = 0; i < game.n_players(); ++i) {
    mp.probs[static_cast<size_t>(i)].assign(static_cast<size_t>(game.n_actions(i)), 0.0);
    mp.probs[static_cast<size_t>(i)].at(static_cast<size_t>(joint.at(static_cast<size_t>(i)))) = 1.0;
  }
  return mp;
}

MixedProfile MixedProfile::uniform(const NormalFormGame& game) {
  MixedProfile mp;
  mp.probs.resize(static_cast<size_t>(game.n_players()));
  for (int i = 0; i < game.n_players(); ++i)
    mp.probs[static_cast<size_t>(i)].assign(static_cast<size_t>(game.n_actions(i)),
                                            1.0 / game.n_actions(i));
  return mp;
}

void MixedProfile::validate(const NormalFormGame& game) const {
  if (static_cast<int>(probs.size()) != game.n_players())
    throw ContractViolation("profile player count mismatch");
  for (int i = 0; i < game.n_players(); ++i) {
    const auto& v = probs[static_cast<size_t>(i)];
    if (static_cast<int>(v.size()) != game.n_actions(i))
      throw ContractViolation("profile action count mismatch for player " +
                              std::to_string(i + 1));
    double sum = 0;
    for (double x : v) {
      if (x < 0) throw ContractViolation("negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ContractViolation("probabilities must sum to 1");
  }
}

double expected_payoff(const NormalFormGame& game, const MixedProfile& profile,
                       int player) {
  profile.validate(game);
  if (player < 0 || player >= game.n_players())
    throw ContractViolation("player index out of range");
  double total = 0;
  for (int cell = 0; cell < game.n_cells(); ++cell) {
    const JointAction joint = game.cell_action(cell);
    double prob = 1;
    for (size_t i = 0; i < joint.size(); ++i)
      prob *= profile.probs[i][static_cast<size_t>(joint[i])];
    total += prob * game.payoff_flat(cell, player);
  }
  return total;
}

double social_payoff(const NormalFormGame& game, const MixedProfile& profile,
                     int player) {
  if (player < 0 || player >= game.n_players())
    throw ContractViolation("player index out of range");
  double sum = 0;
  for (int i = 0; i < game.n_players(); ++i)
    sum += expected_payoff(game, profile, i);
  return sum / game.n_players();
}

ReducedCoefficients reduced_coefficients(const NormalFormGame& game, int player) {
  if (!game.is_2x2())
    throw UnsupportedShape("reduced coefficients require a 2x2 game");
  if (player < 0 || player > 1) throw ContractViolation("player index out of range");
  const int other = 1 - player;
  const double r11 = game.own_payoff(player, 0, 0);
  const double r12 = game.own_payoff(player, 0, 1);
  const double r21 = game.own_payoff(player, 1, 0);
  const double r22 = game.own_payoff(player, 1, 1);
  ReducedCoefficients rc;
  rc.u = r11 + r22 - r12 - r21;
  rc.c = r12 - r22;
  rc.d = r21 - r22;
  rc.e = r22 - game.own_payoff(other, 1, 1);
  return rc;
}

const char* to_string(CategoryTag tag) {
  switch (tag) {
    case CategoryTag::DominantStrategy: return "dominant_strategy";
    case CategoryTag::TwoPureNE: return "two_pure_ne";
    case CategoryTag::OneMixedNE: return "one_mixed_ne";
  }
  return "?";
}

GameCategory classify_game(const NormalFormGame& game) {
  if (!game.is_2x2()) throw UnsupportedShape("classification requires a 2x2 game");

  // diff[i][k] = gain of own action 0 over action 1 for player i when the
  // opponent plays k. A zero entry means the best response is ambiguous.
  double diff[2][2];
  std::vector<std::array<int, 2>> ties;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      diff[i][k] = game.own_payoff(i, 0, k) - game.own_payoff(i, 1, k);
      if (diff[i][k] == 0) {
        if (i == 0) {
          ties.push_back({0, k});
          ties.push_back({1, k});
        } else {
          ties.push_back({k, 0});
          ties.push_back({k, 1});
        }
      }
    }
  }
  if (!ties.empty())
    throw DegenerateGame("payoff tie makes best responses non-strict", ties);

  GameCategory cat;
  for (int i = 0; i < 2; ++i) {
    if (diff[i][0] > 0 && diff[i][1] > 0) cat.dominant_action[static_cast<size_t>(i)] = 0;
    if (diff[i][0] < 0 && diff[i][1] < 0) cat.dominant_action[static_cast<size_t>(i)] = 1;
  }
  cat.pure_ne = pure_nash_equilibria(game);
  if (cat.dominant_action[0] || cat.dominant_action[1]) {
    cat.tag = CategoryTag::DominantStrategy;
  } else if (cat.pure_ne.size() == 2) {
    cat.tag = CategoryTag::TwoPureNE;
  } else {
    cat.tag = CategoryTag::OneMixedNE;
  }
  return cat;
}

std::vector<JointAction> pure_nash_equilibria(const NormalFormGame& game) {
  std::vector<JointAction> result;
  for (int cell = 0; cell < game.n_cells(); ++cell) {
    const JointAction joint = game.cell_action(cell);
    bool is_ne = true;
    for (int i = 0; i < game.n_players() && is_ne; ++i) {
      const double here = game.payoff_flat(cell, i);
      JointAction dev = joint;
      for (int a = 0; a < game.n_actions(i); ++a) {
        if (a == joint[static_cast<size_t>(i)]) continue;
        dev[static_cast<size_t>(i)] = a;
        if (game.payoff(dev, i) > here) {
          is_ne = false;
          break;
        }
      }
    }
    if (is_ne) result.push_back(joint);
  }
  return result;
}

std::optional<MixedProfile> mixed_ne_2x2(const NormalFormGame& game) {
  if (!game.is_2x2()) throw UnsupportedShape("mixed NE solver requires a 2x2 game");
  const ReducedCoefficients rc1 = reduced_coefficients(game, 0);
  const ReducedCoefficients rc2 = reduced_coefficients(game, 1);
  if (rc1.u == 0 || rc2.u == 0) return std::nullopt;
  // Player i is indifferent when the opponent's action-0 probability solves
  // u_i * p_opp + c_i = 0.
  const double p2 = -rc1.c / rc1.u;
  const double p1 = -rc2.c / rc2.u;
  if (!(p1 > 0 && p1 < 1 && p2 > 0 && p2 < 1)) return std::nullopt;
  MixedProfile mp;
  mp.probs = {{p1, 1 - p1}, {p2, 1 - p2}};
  return mp;
}

bool is_symmetric(const NormalFormGame& game) {
  if (!game.is_2x2()) throw UnsupportedShape("symmetry test requires a 2x2 game");
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (game.payoff({a, b}, 1) != game.payoff({b, a}, 0)) return false;
  return true;
}

NormalFormGame random_ordinal_conflict_game(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> r1, r2;
  for (;;) {
    std::vector<double> a{1, 2, 3, 4}, b{1, 2, 3, 4};
    rng.shuffle(a);
    rng.shuffle(b);
    const auto top = [](const std::vector<double>& v) {
      return std::max_element(v.begin(), v.end()) - v.begin();
    };
    if (top(a) != top(b)) {
      r1 = std::move(a);
      r2 = std::move(b);
      break;
    }
  }
  return NormalFormGame({2, 2}, {r1, r2}, "ordinal:" + std::to_string(seed));
}

NormalFormGame pgg_game(int n, double r, double c) {
  if (n < 2) throw ContractViolation("public goods game needs n >= 2");
  if (!(r > 1)) throw ContractViolation("public goods game needs r > 1");
  if (!(c > 0)) throw ContractViolation("public goods game needs c > 0");
  std::vector<int> actions(static_cast<size_t>(n), 2);
  std::vector<std::vector<double>> payoffs(
      static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(1 << n)));
  NormalFormGame shape(actions, payoffs, "");  // for cell enumeration
  for (int cell = 0; cell < shape.n_cells(); ++cell) {
    const JointAction joint = shape.cell_action(cell);
    const int contributors =
        static_cast<int>(std::count(joint.begin(), joint.end(), 0));
    const double pool_share = r * contributors * c / n;
    for (int i = 0; i < n; ++i)
      payoffs[static_cast<size_t>(i)][static_cast<size_t>(cell)] =
          joint[static_cast<size_t>(i)] == 0 ? pool_share - c : pool_share;
  }
  std::ostringstream id;
  id << "pgg:" << n << "," << r << "," << c;
  return NormalFormGame(actions, payoffs, id.str());
}

NormalFormGame pd_game() {
  return NormalFormGame::make_2x2({3, 0, 5, 1}, {3, 5, 0, 1}, "pd");
}

NormalFormGame cg_game() {
  return NormalFormGame::make_2x2({3, 0, 0, 4}, {4, 0, 0, 3}, "cg");
}

NormalFormGame mixonly_game() {
  return NormalFormGame::make_2x2({3, 4, 1, 5}, {2, 4, 3, 1}, "mixonly");
}

NormalFormGame game_by_name(const std::string& name) {
  if (name == "pd") return pd_game();
  if (name == "cg") return cg_game();
  if (name == "mixonly") return mixonly_game();
  if (name.rfind("pgg:", 0) == 0) {
    int n = 0;
    double r = 0, c = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(name.substr(4));
    if (!(in >> n >> c1 >> r >> c2 >> c) || c1 != ',' || c2 != ',' ||
        (in >> std::ws, !in.eof()))
      throw ConfigError("bad pgg spec '" + name + "', expected pgg:N,r,c");
    return pgg_game(n, r, c);
  }
  if (name.rfind("ordinal:", 0) == 0) {
    std::uint64_t seed = 0;
    std::istringstream in(name.substr(8));
    if (!(in >> seed)) throw ConfigError("bad ordinal spec '" + name + "'");
    return random_ordinal_conflict_game(seed);
  }
  throw ConfigError("unknown game '" + name + "'");
}

NormalFormGame resolve_game(const std::string& name_or_path) {
  try {
    return game_by_name(name_or_path);
  } catch (const ConfigError&) {
    std::ifstream f(name_or_path);
    if (!f) throw;
    return parse_game_text(f, name_or_path);
  }
}

NormalFormGame parse_game_text(std::istream& in, const std::string& id) {
  int players = 0;
  std::vector<int> actions;
  std::vector<std::vector<double>> payoffs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const auto fail = [&](const std::string& msg) {
      throw ConfigError("game file line " + std::to_string(lineno) + ": " + msg);
    };
    if (key == "players") {
      if (!(ls >> players) || players < 2) fail("bad player count");
    } else if (key == "actions") {
      int a;
      while (ls >> a) actions.push_back(a);
      if (actions.empty()) fail("bad action counts");
    } else if (key == "payoffs") {
      int player;
      if (!(ls >> player) || player < 1) fail("bad player index after 'payoffs'");
      if (static_cast<size_t>(player) > payoffs.size())
        payoffs.resize(static_cast<size_t>(player));
      std::vector<double> vals;
      double v;
      while (ls >> v) vals.push_back(v);
      payoffs[static_cast<size_t>(player - 1)] = std::move(vals);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (players == 0) throw ConfigError("game file missing 'players'");
  if (static_cast<int>(actions.size()) != players)
    throw ConfigError("game file needs one 'actions' entry per player");
  if (static_cast<int>(payoffs.size()) != players)
    throw ConfigError("game file needs one 'payoffs' line per player");
  return NormalFormGame(actions, payoffs, id);
}

NormalFormGame parse_game_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open game file '" + path + "'");
  return parse_game_text(f, path);
}

std::string to_text(const NormalFormGame& game) {
  std::ostringstream out;
  out.precision(17);
  out << "players " << game.n_players() << "\n";
  out << "actions";
  for (int a : game.actions_per_player()) out << " " << a;
  out << "\n";
  for (int i = 0; i < game.n_players(); ++i) {
    out << "payoffs " << (i + 1);
    for (int cell = 0; cell < game.n_cells(); ++cell)
      out << " " << game.payoff_flat(cell, i);
    out << "\n";
  }
  return out.str();
}

}  // namespace saga::games
