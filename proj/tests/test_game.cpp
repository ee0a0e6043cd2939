#include <gtest/gtest.h>

#include <random>

#include "hgauge/error.hpp"
#include "hgauge/game.hpp"

using namespace hgauge;

namespace {

// A random transducer with bounded lag: each state gets an offset in
// {-1, 0, 1} (start at 0) and edges emit exactly the bits that keep the
// offsets consistent.
TreeMap random_transducer(std::mt19937_64& rng) {
  const int states = 1 + static_cast<int>(rng() % 3);
  std::vector<int> offset(static_cast<std::size_t>(states));
  for (int q = 1; q < states; ++q) offset[static_cast<std::size_t>(q)] = static_cast<int>(rng() % 3) - 1;
  TreeMap::Transducer a;
  a.delta.resize(static_cast<std::size_t>(states));
  for (int q = 0; q < states; ++q) {
    for (int b = 0; b < 2; ++b) {
      int next = 0;
      int len = -1;
      while (len < 0) {
        next = static_cast<int>(rng() % static_cast<std::uint64_t>(states));
        len = offset[static_cast<std::size_t>(next)] - offset[static_cast<std::size_t>(q)] + 1;
      }
      Node out;
      for (int i = 0; i < len; ++i) out.push_back(static_cast<int>(rng() & 1));
      a.delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(b)] = TreeMap::Transition{next, out};
    }
  }
  return TreeMap::transducer(a);
}

// The same map as an explicit table over every string up to length d.
TreeMap tabulate(const TreeMap& m, int d) {
  std::map<Node, Node> entries;
  for (int len = 0; len <= d; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      Node t;
      for (int i = len - 1; i >= 0; --i) t.push_back(static_cast<int>((v >> i) & 1u));
      entries.emplace(t, apply_map(m, t));
    }
  }
  return TreeMap::explicit_map(entries);
}

std::vector<Node> nodes(std::initializer_list<const char*> bits) {
  std::vector<Node> out;
  for (const char* b : bits) out.emplace_back(b);
  return out;
}

}  // namespace

TEST(TreeMap, SpecExamples) {
  EXPECT_EQ(apply_map(TreeMap::bit_flip(), Node("0110")), Node("1001"));
  EXPECT_EQ(apply_map(TreeMap::shift(), Node("0110")), Node("110"));
  EXPECT_EQ(apply_map(TreeMap::identity(), Node("0110")), Node("0110"));
  EXPECT_EQ(apply_map(TreeMap::shift(), Node()), Node());
  EXPECT_EQ(TreeMap::bit_flip().lag(), 0);
  EXPECT_EQ(TreeMap::shift().lag(), 1);

  TreeMap ex = TreeMap::explicit_map({{Node("0"), Node("1")}, {Node("01"), Node("10")}});
  EXPECT_EQ(apply_map(ex, Node("01")), Node("10"));
  EXPECT_THROW(apply_map(ex, Node("11")), OutOfRange);
}

TEST(TreeMap, RejectsBadInput) {
  EXPECT_THROW(TreeMap::explicit_map({{Node("0"), Node("1")}, {Node("01"), Node("00")}}), InvalidArgument);
  // A cycle that emits two bits per input bit has unbounded lag.
  TreeMap::Transducer doubling{0, {{TreeMap::Transition{0, Node("00")}, TreeMap::Transition{0, Node("11")}}}};
  EXPECT_THROW(TreeMap::transducer(doubling), InvalidArgument);
  TreeMap::Transducer dangling{0, {{TreeMap::Transition{3, Node("0")}, TreeMap::Transition{0, Node("1")}}}};
  EXPECT_THROW(TreeMap::transducer(dangling), InvalidArgument);
}

TEST(TreeMap, TransducerLagAndMonotonicity) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    TreeMap m = random_transducer(rng);
    Node t;
    Node prev = apply_map(m, t);
    for (int i = 0; i < 30; ++i) {
      t.push_back(static_cast<int>(rng() & 1));
      Node img = apply_map(m, t);
      ASSERT_TRUE(prev.is_prefix_of(img));
      ASSERT_LE(std::abs(static_cast<int>(img.size()) - static_cast<int>(t.size())), m.lag());
      prev = img;
    }
  }
}

TEST(BadSet, SpecExamples) {
  GameState id(BranchSchedule::odd_levels(8), {TreeMap::identity()}, {Requirement{0, Node("01")}}, 8);
  EXPECT_TRUE(bad_set(id, 0, 8).leaves.empty());
  EXPECT_TRUE(bad_measure(id, 0, 8).total.is_zero());

  GameState flip(BranchSchedule(6, {2}), {TreeMap::bit_flip()}, {Requirement{0, Node("0")}}, 6);
  BadSet b = bad_set(flip, 0, 6);
  EXPECT_EQ(b.measure, Dyadic::pow2(-1));
  EXPECT_EQ(bad_measure(flip, 0, 6).total, Dyadic::pow2(-1));

  GameState shift(BranchSchedule(8, {1, 4}), {TreeMap::shift()}, {Requirement{0, Node("00")}}, 8);
  BadSet s = bad_set(shift, 0, 8);
  Dyadic leaf = Dyadic::pow2(-8 + 2);
  EXPECT_EQ(s.measure, leaf * Dyadic(BigInt(s.leaves.size())));
  EXPECT_EQ(bad_measure(shift, 0, 8).total, s.measure);
}

TEST(BadMeasure, AutomatonMatchesLeafScan) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 150; ++trial) {
    const int depth = 4 + static_cast<int>(rng() % 9);
    std::vector<int> idx;
    for (int n = 0; n < depth; ++n) {
      if (rng() % 2) idx.push_back(n);
    }
    BranchSchedule a(depth, idx);
    std::vector<TreeMap> maps = {random_transducer(rng), TreeMap::bit_flip(), TreeMap::shift()};
    std::vector<Requirement> reqs;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      Node root;
      for (std::uint64_t len = rng() % 3; len > 0; --len) root.push_back(static_cast<int>(rng() & 1));
      reqs.push_back(Requirement{i, root});
    }
    // Arbitrary layers, not only game-produced ones.
    std::vector<SelectorLayer> layers;
    for (int n : idx) {
      if (rng() % 2) {
        Node root;
        for (std::uint64_t len = rng() % 4; len > 0; --len) root.push_back(static_cast<int>(rng() & 1));
        layers.push_back(SelectorLayer{n, root, static_cast<int>(rng() & 1)});
      }
    }
    GameState state(a, maps, reqs, depth, layers);
    for (std::size_t r = 0; r < reqs.size(); ++r) {
      const std::optional<int> split = static_cast<int>(rng() % static_cast<std::uint64_t>(depth));
      BadMeasure dp = bad_measure(state, r, depth, split);
      BadSet scan = bad_set(state, r, depth);
      ASSERT_EQ(dp.total, scan.measure) << "trial " << trial << " requirement " << r;
      ASSERT_EQ(dp.by_bit[0] + dp.by_bit[1] + dp.by_bit[2], dp.total);

      TreeMap table = tabulate(maps[r], depth);
      GameState explicit_state(a, {table}, {Requirement{0, reqs[r].root}}, depth, layers);
      BadMeasure fallback = bad_measure(explicit_state, 0, depth, split);
      ASSERT_EQ(fallback.total, dp.total);
      ASSERT_EQ(fallback.by_bit, dp.by_bit);
    }
  }
}

TEST(BadMeasure, AutomatonMatchesLeafScanAfterStages) {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int depth = 8 + static_cast<int>(rng() % 7);
    std::vector<TreeMap> maps = {random_transducer(rng), TreeMap::shift(), TreeMap::bit_flip()};
    GameState state(BranchSchedule::odd_levels(depth), maps, make_requirements(maps.size(), nodes({"0", "1"})), depth);
    for (std::size_t r = 0; r < state.requirements().size() && state.next_level(r); ++r) {
      state = stage_step(state, r);
      for (std::size_t q = 0; q < state.requirements().size(); ++q) {
        ASSERT_EQ(bad_measure(state, q, depth).total, bad_set(state, q, depth).measure);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(StageStep, BitFlipEmptiesBadSet) {
  GameState state(BranchSchedule::odd_levels(8), {TreeMap::bit_flip()}, {Requirement{0, Node("0")}}, 8);
  const Dyadic beta = state.bounds()[0];
  EXPECT_EQ(beta, Dyadic::pow2(-1));
  GameState next = stage_step(state, 0);
  EXPECT_EQ(next.bounds()[0], beta.half());
  EXPECT_TRUE(bad_set(next, 0, 8).leaves.empty());
  ASSERT_EQ(next.log().size(), 1u);
  EXPECT_EQ(next.log()[0].level, 1);
}

TEST(StageStep, IdentityIsNoOp) {
  GameState state(BranchSchedule::odd_levels(8), {TreeMap::identity()}, {Requirement{0, Node("1")}}, 8);
  GameState next = stage_step(state, 0);
  EXPECT_TRUE(next.bounds()[0].is_zero());
  EXPECT_EQ(next.log()[0].chosen_bit, 0);
}

TEST(StageStep, ContainmentAndHalvingLeafwise) {
  GameState state(BranchSchedule::odd_levels(12), {TreeMap::shift(), TreeMap::bit_flip()},
                  make_requirements(2, nodes({"0", "1"})), 12);
  for (std::size_t r = 0; r < state.requirements().size(); ++r) {
    const int level = *state.next_level(r);
    const Requirement& req = state.requirements()[r];
    BadSet before = bad_set(state, r, 12);
    GameState next = stage_step(state, r);
    const StageRecord& rec = next.log().back();
    EXPECT_EQ(next.bounds()[r], state.bounds()[r].half());
    EXPECT_LE(rec.halves[static_cast<std::size_t>(rec.chosen_bit)].scaled(1), rec.measure_before);
    // Every post-stage bad leaf was bad before and has image bit b at level.
    for (const Node& x : bad_set(next, r, 12).leaves) {
      EXPECT_NE(std::find(before.leaves.begin(), before.leaves.end(), x), before.leaves.end());
      EXPECT_EQ(apply_map(state.maps()[req.map_index], x)[static_cast<std::size_t>(level)], rec.chosen_bit);
    }
    for (std::size_t q = 0; q < next.requirements().size(); ++q) {
      EXPECT_LE(bad_measure(next, q, 12).total, next.bounds()[q]);
    }
    state = next;
  }
}

TEST(StageStep, DepthExhausted) {
  GameState state(BranchSchedule(4, {3}), {TreeMap::shift()}, {Requirement{0, Node("1")}}, 4);
  try {
    stage_step(state, 0);
    FAIL() << "expected DepthExhausted";
  } catch (const DepthExhausted& e) {
    EXPECT_EQ(e.requirement(), 0u);
  }
}

TEST(RunGame, FairHalvingOnOddLevels) {
  GameResult res = run_game(BranchSchedule::odd_levels(64), {TreeMap::bit_flip(), TreeMap::shift()},
                            nodes({"0", "1"}), 64, 5);
  ASSERT_EQ(res.certificate.requirements.size(), 4u);
  EXPECT_EQ(res.certificate.stages_executed, 20);
  for (const RequirementOutcome& r : res.certificate.requirements) {
    EXPECT_EQ(r.stages, 5);
    EXPECT_EQ(r.final_bound, r.initial * Dyadic::pow2(-5));
    EXPECT_LE(r.recomputed, r.final_bound);
  }
  std::vector<int> per(4, 0);
  for (const StageRecord& s : res.state.log()) ++per[s.requirement];
  EXPECT_EQ(per, (std::vector<int>{5, 5, 5, 5}));
  EXPECT_EQ(res.certificate.layers.size(), 20u);
  for (std::size_t i = 1; i < res.certificate.layers.size(); ++i) {
    EXPECT_GT(res.certificate.layers[i].level, res.certificate.layers[i - 1].level);
  }
}

TEST(RunGame, PowerLogScheduleIsTooThinForThreeStages) {
  BranchSchedule a = sparsity_schedule(Gauge::power_log(Rational(1), Rational(1)), 64);
  std::vector<TreeMap> maps = {TreeMap::bit_flip(), TreeMap::shift()};
  EXPECT_EQ(max_feasible_stages(a, maps, nodes({"0", "1"}), 64), 1);
  try {
    run_game(a, maps, nodes({"0", "1"}), 64, 3);
    FAIL() << "expected Infeasible";
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.max_feasible(), 1);
  }
  GameResult one = run_game(a, maps, nodes({"0", "1"}), 64, 1);
  for (const RequirementOutcome& r : one.certificate.requirements) {
    EXPECT_EQ(r.final_bound, r.initial.half());
    EXPECT_LE(r.recomputed, r.final_bound);
  }
}

TEST(RunGame, IdentityAndVacuousRuns) {
  GameResult id = run_game(BranchSchedule::odd_levels(32), {TreeMap::identity()}, nodes({"0", "1"}), 32, 3);
  for (const RequirementOutcome& r : id.certificate.requirements) EXPECT_TRUE(r.final_bound.is_zero());

  GameResult none = run_game(BranchSchedule::odd_levels(32), {TreeMap::bit_flip()}, nodes({"0"}), 32, 0);
  EXPECT_TRUE(none.certificate.layers.empty());
  EXPECT_EQ(none.certificate.requirements[0].final_bound, none.certificate.requirements[0].initial);
}

TEST(VerifyEscape, IdentityIsFixed) {
  SplittingTree tree(BranchSchedule::odd_levels(20), BranchSelector::seeded(1), 20);
  EscapeReport rep = verify_escape(tree, {TreeMap::identity()}, 200, 4);
  EXPECT_EQ(rep.per_map[0].fixed, 200u);
}

TEST(VerifyEscape, ConstantSelectorControl) {
  // Nothing decided on a fresh game tree, so no BitFlip image can escape.
  SplittingTree fresh(BranchSchedule::odd_levels(8), BranchSelector::game_built({}), 8);
  EscapeReport rep = verify_escape(fresh, {TreeMap::bit_flip()}, 500, 2, {Requirement{0, Node("0")}, Requirement{0, Node("1")}});
  EXPECT_EQ(rep.per_map[0].escaped, 0u);
  EXPECT_EQ(rep.per_map[0].undetermined, 500u);
  EXPECT_EQ(rep.per_map[0].covered_undetermined, 500u);
}

TEST(VerifyEscape, AfterGameMostBitFlipImagesEscape) {
  GameResult res = run_game(BranchSchedule::odd_levels(64), {TreeMap::bit_flip()}, nodes({"0", "1"}), 64, 4);
  EscapeReport rep = verify_escape(res.tree, {TreeMap::bit_flip()}, 1000, 9, res.state.requirements());
  const EscapeCounts& c = rep.per_map[0];
  EXPECT_EQ(c.fixed + c.escaped + c.undetermined, 1000u);
  Dyadic beta;
  for (const auto& r : res.certificate.requirements) beta += r.final_bound;
  EXPECT_LE(c.covered_undetermined, allowed_bad_samples(beta, 1000));
  EXPECT_GE(static_cast<double>(c.escaped) / 1000, 1.0 - std::ldexp(1.0, -4) - c.undetermined / 1000.0 - 0.05);
}

TEST(AllowedBadSamples, Formula) {
  EXPECT_EQ(allowed_bad_samples(Dyadic(), 1000), 0u);
  EXPECT_EQ(allowed_bad_samples(Dyadic(BigInt(1)), 1000), 1000u);
  // 1000/16 + 5 sqrt(1000 * 15/256) = 62.5 + 38.27...
  EXPECT_EQ(allowed_bad_samples(Dyadic::pow2(-4), 1000), 101u);
}
