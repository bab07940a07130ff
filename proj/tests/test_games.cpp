#include "saga/games.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "saga/rng.hpp"

using namespace saga;
using namespace saga::games;

namespace {

NormalFormGame random_2x2(Rng& rng, double lo = -5, double hi = 5) {
  std::array<double, 4> a{}, b{};
  for (double& v : a) v = rng.uniform(lo, hi);
  for (double& v : b) v = rng.uniform(lo, hi);
  return NormalFormGame::make_2x2(a, b);
}

NormalFormGame random_symmetric(Rng& rng) {
  const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5);
  const double c = rng.uniform(-5, 5), d = rng.uniform(-5, 5);
  return NormalFormGame::make_2x2({a, b, c, d}, {a, c, b, d});
}

// Independent deviation check used as the oracle for the NE enumerator.
bool oracle_is_pure_ne(const NormalFormGame& g, const JointAction& joint) {
  for (int i = 0; i < g.n_players(); ++i) {
    const double base = g.payoff(joint, i);
    for (int alt = 0; alt < g.n_actions(i); ++alt) {
      JointAction dev = joint;
      dev[static_cast<size_t>(i)] = alt;
      if (g.payoff(dev, i) > base) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("expected payoff on the prisoner's dilemma") {
  const NormalFormGame pd = pd_game();
  CHECK(expected_payoff(pd, MixedProfile::pure(pd, {0, 0}), 0) == doctest::Approx(3.0));
  CHECK(expected_payoff(pd, MixedProfile::pure(pd, {1, 1}), 0) == doctest::Approx(1.0));

  // Uniform play: direct average over the four cells.
  const double oracle = (3.0 + 0.0 + 5.0 + 1.0) / 4.0;
  CHECK(expected_payoff(pd, MixedProfile::uniform(pd), 0) == doctest::Approx(oracle));
  CHECK(oracle == doctest::Approx(2.25));

  MixedProfile bad;
  bad.probs = {{1.0, 0.0}};
  CHECK_THROWS_AS(expected_payoff(pd, bad, 0), ContractViolation);
  bad.probs = {{0.7, 0.2}, {0.5, 0.5}};
  CHECK_THROWS_AS(expected_payoff(pd, bad, 0), ContractViolation);
}

TEST_CASE("social payoff averages all players") {
  const NormalFormGame pd = pd_game();
  CHECK(social_payoff(pd, MixedProfile::pure(pd, {0, 0}), 0) == doctest::Approx(3.0));
  CHECK(social_payoff(pd, MixedProfile::pure(pd, {1, 0}), 0) == doctest::Approx(2.5));
  CHECK(social_payoff(pd, MixedProfile::pure(pd, {1, 0}), 1) ==
        social_payoff(pd, MixedProfile::pure(pd, {1, 0}), 0));

  const NormalFormGame pgg = pgg_game(3, 2, 2);
  CHECK(social_payoff(pgg, MixedProfile::pure(pgg, {0, 0, 0}), 1) == doctest::Approx(2.0));
}

TEST_CASE("reduced coefficients") {
  const ReducedCoefficients pd1 = reduced_coefficients(pd_game(), 0);
  CHECK(pd1.u == doctest::Approx(-1));
  CHECK(pd1.c == doctest::Approx(-1));
  CHECK(pd1.d == doctest::Approx(4));
  CHECK(pd1.e == doctest::Approx(0));

  const ReducedCoefficients cg1 = reduced_coefficients(cg_game(), 0);
  CHECK(cg1.u == doctest::Approx(7));
  CHECK(cg1.c == doctest::Approx(-4));
  CHECK(cg1.d == doctest::Approx(-4));
  CHECK(cg1.e == doctest::Approx(1));

  const NormalFormGame zero = NormalFormGame::make_2x2({0, 0, 0, 0}, {0, 0, 0, 0});
  const ReducedCoefficients z = reduced_coefficients(zero, 1);
  CHECK(z.u == 0);
  CHECK(z.c == 0);
  CHECK(z.d == 0);
  CHECK(z.e == 0);

  CHECK_THROWS_AS(reduced_coefficients(pgg_game(3, 2, 2), 0), UnsupportedShape);

  // Recomputation matches the defining payoff differences exactly.
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const NormalFormGame g = random_2x2(rng);
    for (int i = 0; i < 2; ++i) {
      const ReducedCoefficients rc = reduced_coefficients(g, i);
      CHECK(rc.u == g.own_payoff(i, 0, 0) + g.own_payoff(i, 1, 1) -
                        g.own_payoff(i, 0, 1) - g.own_payoff(i, 1, 0));
      CHECK(rc.c == g.own_payoff(i, 0, 1) - g.own_payoff(i, 1, 1));
      CHECK(rc.d == g.own_payoff(i, 1, 0) - g.own_payoff(i, 1, 1));
      CHECK(rc.e == g.own_payoff(i, 1, 1) - g.own_payoff(1 - i, 1, 1));
    }
  }
}

TEST_CASE("reduced form reproduces the expected payoff") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const NormalFormGame g = random_2x2(rng);
    const double p1 = rng.uniform(), p2 = rng.uniform();
    MixedProfile prof;
    prof.probs = {{p1, 1 - p1}, {p2, 1 - p2}};
    const ReducedCoefficients rc = reduced_coefficients(g, 0);
    const double reduced =
        rc.u * p1 * p2 + rc.c * p1 + rc.d * p2 + g.own_payoff(0, 1, 1);
    CHECK(std::abs(reduced - expected_payoff(g, prof, 0)) <= 1e-12);
  }
}

TEST_CASE("payoff is multilinear: finite-difference slope equals u*p + c") {
  Rng rng(13);
  const double h = 1e-3;
  for (int trial = 0; trial < 200; ++trial) {
    const NormalFormGame g = random_2x2(rng);
    const double p1 = rng.uniform(0.1, 0.9), p2 = rng.uniform(0.0, 1.0);
    const auto value = [&](double p) {
      MixedProfile prof;
      prof.probs = {{p, 1 - p}, {p2, 1 - p2}};
      return expected_payoff(g, prof, 0);
    };
    const double fd = (value(p1 + h) - value(p1 - h)) / (2 * h);
    const ReducedCoefficients rc = reduced_coefficients(g, 0);
    const double analytic = rc.u * p2 + rc.c;
    const double scale = std::max(1.0, std::abs(analytic));
    CHECK(std::abs(fd - analytic) / scale <= 1e-9);
  }
}

TEST_CASE("game classification") {
  const GameCategory pd = classify_game(pd_game());
  CHECK(pd.tag == CategoryTag::DominantStrategy);
  REQUIRE(pd.dominant_action[0].has_value());
  CHECK(*pd.dominant_action[0] == 1);
  CHECK(*pd.dominant_action[1] == 1);

  const GameCategory cg = classify_game(cg_game());
  CHECK(cg.tag == CategoryTag::TwoPureNE);
  REQUIRE(cg.pure_ne.size() == 2);
  CHECK(cg.pure_ne[0] == JointAction{0, 0});
  CHECK(cg.pure_ne[1] == JointAction{1, 1});

  CHECK(classify_game(mixonly_game()).tag == CategoryTag::OneMixedNE);

  // A tie in player 1's column makes the structure non-strict.
  const NormalFormGame tied = NormalFormGame::make_2x2({2, 0, 2, 1}, {3, 5, 0, 1});
  CHECK_THROWS_AS(classify_game(tied), DegenerateGame);
  try {
    classify_game(tied);
  } catch (const DegenerateGame& e) {
    REQUIRE(e.tying_cells().size() == 2);
    CHECK(e.tying_cells()[0] == std::array<int, 2>{0, 0});
    CHECK(e.tying_cells()[1] == std::array<int, 2>{1, 0});
  }
}

TEST_CASE("pure Nash equilibria") {
  CHECK(pure_nash_equilibria(pd_game()) == std::vector<JointAction>{{1, 1}});
  CHECK(pure_nash_equilibria(cg_game()) == std::vector<JointAction>{{0, 0}, {1, 1}});
  CHECK(pure_nash_equilibria(mixonly_game()).empty());

  // All-defect is the unique pure NE of the public goods game.
  const NormalFormGame pgg = pgg_game(3, 2, 2);
  CHECK(pure_nash_equilibria(pgg) == std::vector<JointAction>{{1, 1, 1}});
}

TEST_CASE("pure NE enumeration agrees with the deviation oracle") {
  Rng rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const NormalFormGame g = trial % 2 == 0
                                 ? random_2x2(rng)
                                 : random_ordinal_conflict_game(rng.next_u64());
    const auto found = pure_nash_equilibria(g);
    size_t idx = 0;
    for (int cell = 0; cell < g.n_cells(); ++cell) {
      const JointAction joint = g.cell_action(cell);
      const bool expected = oracle_is_pure_ne(g, joint);
      const bool listed = idx < found.size() && found[idx] == joint;
      CHECK(listed == expected);
      if (listed) ++idx;
    }
    CHECK(idx == found.size());
  }
}

TEST_CASE("interior mixed equilibrium of a 2x2 game") {
  const NormalFormGame pennies =
      NormalFormGame::make_2x2({1, -1, -1, 1}, {-1, 1, 1, -1}, "mp");
  const auto mp = mixed_ne_2x2(pennies);
  REQUIRE(mp.has_value());
  CHECK(mp->probs[0][0] == doctest::Approx(0.5));
  CHECK(mp->probs[1][0] == doctest::Approx(0.5));

  // Bisection oracle on the indifference gap, using raw payoff arithmetic.
  const NormalFormGame g = mixonly_game();
  const auto gap1 = [&](double p2) {  // player 1: value of C minus value of D
    return (p2 * 3 + (1 - p2) * 4) - (p2 * 1 + (1 - p2) * 5);
  };
  const auto gap2 = [&](double p1) {  // player 2: value of C minus value of D
    return (p1 * 2 + (1 - p1) * 3) - (p1 * 4 + (1 - p1) * 1);
  };
  const auto bisect = [](auto f) {
    double lo = 0, hi = 1;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((f(lo) <= 0) == (f(mid) <= 0)) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double p2_star = bisect(gap1);
  const double p1_star = bisect(gap2);
  const auto ne = mixed_ne_2x2(g);
  REQUIRE(ne.has_value());
  CHECK(ne->probs[0][0] == doctest::Approx(p1_star).epsilon(1e-9));
  CHECK(ne->probs[1][0] == doctest::Approx(p2_star).epsilon(1e-9));
  CHECK(ne->probs[0][0] == doctest::Approx(0.5));
  CHECK(ne->probs[1][0] == doctest::Approx(1.0 / 3.0));
  CHECK(ne->probs[0][0] > 0);
  CHECK(ne->probs[0][0] < 1);

  CHECK_FALSE(mixed_ne_2x2(pd_game()).has_value());
}

TEST_CASE("symmetry") {
  CHECK(is_symmetric(pd_game()));
  CHECK_FALSE(is_symmetric(cg_game()));
  CHECK(is_symmetric(NormalFormGame::make_2x2({1, 1, 1, 1}, {1, 1, 1, 1})));

  // Symmetric games have identical u coefficients, exactly.
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const NormalFormGame g = random_symmetric(rng);
    REQUIRE(is_symmetric(g));
    CHECK(reduced_coefficients(g, 0).u == reduced_coefficients(g, 1).u);
  }
}

TEST_CASE("welfare helpers") {
  CHECK(usw(3, 3) == 6);
  CHECK(nsw(3, 3) == 9);
  CHECK(usw(5, 0) == 5);
  CHECK(nsw(5, 0) == 0);
}

TEST_CASE("random ordinal conflict games") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const NormalFormGame g = random_ordinal_conflict_game(seed);
    for (int i = 0; i < 2; ++i) {
      std::vector<double> vals;
      for (int cell = 0; cell < 4; ++cell) vals.push_back(g.payoff_flat(cell, i));
      std::sort(vals.begin(), vals.end());
      CHECK(vals == std::vector<double>{1, 2, 3, 4});
    }
    int joint_top = 0;
    for (int cell = 0; cell < 4; ++cell)
      if (g.payoff_flat(cell, 0) == 4 && g.payoff_flat(cell, 1) == 4) ++joint_top;
    CHECK(joint_top == 0);
  }
  CHECK(random_ordinal_conflict_game(99) == random_ordinal_conflict_game(99));
  CHECK_FALSE(random_ordinal_conflict_game(99) == random_ordinal_conflict_game(100));
}

TEST_CASE("public goods game payoffs") {
  const NormalFormGame g = pgg_game(3, 2, 2);
  CHECK(g.payoff({0, 0, 0}, 0) == doctest::Approx(2.0));
  CHECK(g.payoff({1, 1, 1}, 1) == doctest::Approx(0.0));
  CHECK(g.payoff({1, 0, 0}, 0) == doctest::Approx(8.0 / 3.0));
  CHECK(g.payoff({1, 0, 0}, 1) == doctest::Approx(2.0 / 3.0));

  // Withholding beats contributing by exactly the contribution cost in every
  // joint action.
  for (int n : {2, 3, 5}) {
    const double cost = 1.5;
    const NormalFormGame game = pgg_game(n, 2.5, cost);
    for (int cell = 0; cell < game.n_cells(); ++cell) {
      const JointAction joint = game.cell_action(cell);
      const int contributors =
          static_cast<int>(std::count(joint.begin(), joint.end(), 0));
      if (contributors == 0 || contributors == n) continue;
      double coop = 0, defect = 0;
      for (int i = 0; i < n; ++i)
        (joint[static_cast<size_t>(i)] == 0 ? coop : defect) = game.payoff(joint, i);
      CHECK(defect - coop == doctest::Approx(cost).epsilon(1e-15));
    }
  }

  CHECK_THROWS_AS(pgg_game(1, 2, 2), ContractViolation);
  CHECK_THROWS_AS(pgg_game(3, 1, 2), ContractViolation);
  CHECK_THROWS_AS(pgg_game(3, 2, 0), ContractViolation);
}

TEST_CASE("canonical names and the game file format") {
  CHECK(game_by_name("pd") == pd_game());
  CHECK(game_by_name("cg") == cg_game());
  CHECK(game_by_name("mixonly") == mixonly_game());
  CHECK(game_by_name("pgg:3,2,2") == pgg_game(3, 2, 2));
  CHECK_THROWS_AS(game_by_name("nosuch"), ConfigError);
  CHECK_THROWS_AS(game_by_name("pgg:3"), ConfigError);

  for (const NormalFormGame& g :
       {pd_game(), cg_game(), mixonly_game(), pgg_game(3, 2, 2)}) {
    std::istringstream in(to_text(g));
    CHECK(parse_game_text(in) == g);
  }

  std::istringstream bad("players 2\nactions 2 2\npayoffs 1 1 2 3\npayoffs 2 1 2 3 4\n");
  CHECK_THROWS_AS(parse_game_text(bad), ContractViolation);
}
