#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "hgauge/error.hpp"
#include "hgauge/tree.hpp"

using namespace hgauge;

namespace {

// All 2^n strings of length n that satisfy the defining clause, by brute
// force over the full binary tree.
std::vector<Node> brute_level(const SplittingTree& tree, int n) {
  std::vector<Node> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    Node t;
    for (int i = n - 1; i >= 0; --i) t.push_back(static_cast<int>((v >> i) & 1u));
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      if (tree.schedule().contains(k)) ok = t[static_cast<std::size_t>(k)] == tree.selector().value(t.prefix(static_cast<std::size_t>(k)));
    }
    if (ok) out.push_back(t);
  }
  return out;
}

BranchSchedule random_schedule(std::mt19937_64& rng, int depth) {
  std::vector<int> idx;
  for (int n = 0; n < depth; ++n) {
    if (rng() % 3 == 0) idx.push_back(n);
  }
  return BranchSchedule(depth, idx);
}

}  // namespace

TEST(Contains, SpecExamples) {
  SplittingTree full(BranchSchedule::empty(4), BranchSelector::constant(0), 4);
  EXPECT_TRUE(contains(full, Node("0110")));
  EXPECT_TRUE(contains(full, Node()));

  SplittingTree one(BranchSchedule(4, {1}), BranchSelector::constant(0), 4);
  EXPECT_TRUE(contains(one, Node("10")));
  EXPECT_FALSE(contains(one, Node("11")));

  SplittingTree first(BranchSchedule(4, {0}), BranchSelector::constant(1), 4);
  EXPECT_FALSE(contains(first, Node("0")));
  EXPECT_FALSE(contains(first, Node("0110")));
  EXPECT_TRUE(contains(first, Node("1010")));

  EXPECT_THROW(contains(full, Node("01101")), OutOfRange);
}

TEST(CylinderMeasure, SpecExamples) {
  SplittingTree tree(BranchSchedule(6, {1, 3}), BranchSelector::constant(0), 6);
  EXPECT_EQ(cylinder_measure(tree, Node("1000")), Dyadic::pow2(-2));
  EXPECT_EQ(cylinder_measure(tree, Node()), Dyadic(BigInt(1)));
  EXPECT_THROW(cylinder_measure(tree, Node("11")), NotInTree);

  SplittingTree full(BranchSchedule::empty(10), BranchSelector::constant(0), 10);
  EXPECT_EQ(cylinder_measure(full, Node("0101010")), Dyadic::pow2(-7));
}

TEST(LevelCount, SpecExamples) {
  SplittingTree odds(BranchSchedule::odd_levels(6), BranchSelector::seeded(3), 6);
  EXPECT_EQ(level_count(odds, 6), BigInt(8));
  EXPECT_EQ(materialize(odds, 6).leaf_count(), 8u);
  EXPECT_EQ(level_count(odds, 0), BigInt(1));
  SplittingTree full(BranchSchedule::empty(10), BranchSelector::constant(0), 10);
  EXPECT_EQ(level_count(full, 10), BigInt(1024));
}

TEST(Materialize, SpecExamples) {
  SplittingTree full(BranchSchedule::empty(3), BranchSelector::constant(0), 3);
  EXPECT_EQ(materialize(full, 3).leaf_count(), 8u);
  SplittingTree forced(BranchSchedule::all_levels(3), BranchSelector::constant(1), 3);
  auto leaves = materialize(forced, 3).leaves();
  ASSERT_EQ(leaves.size(), 1u);
  EXPECT_EQ(leaves[0], Node("111"));
}

TEST(Materialize, BudgetIsEnforced) {
  SplittingTree full(BranchSchedule::empty(30), BranchSelector::constant(0), 30);
  try {
    materialize(full, 30, 1000);
    FAIL() << "expected ResourceExceeded";
  } catch (const ResourceExceeded& e) {
    EXPECT_EQ(e.requested(), std::size_t{1} << 30);
  }
}

TEST(Materialize, MatchesBruteForceOnRandomTrees) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int depth = static_cast<int>(rng() % 11);
    BranchSchedule a = random_schedule(rng, depth);
    BranchSelector ys[] = {BranchSelector::seeded(rng()), BranchSelector::constant(static_cast<int>(rng() & 1)),
                           BranchSelector::explicit_map({{Node(), 1}, {Node("0"), 1}, {Node("11"), 0}}, 0)};
    for (const auto& y : ys) {
      SplittingTree tree(a, y, depth);
      for (int d = 0; d <= depth; ++d) {
        auto expected = brute_level(tree, d);
        auto got = materialize(tree, d).leaves();
        ASSERT_EQ(got, expected) << "depth " << d;
        ASSERT_EQ(level_count(tree, d), BigInt(expected.size()));
        for (const Node& t : got) ASSERT_TRUE(materialize(tree, d).contains_prefix(t.prefix(t.size() / 2)));
      }
    }
  }
}

TEST(Measure, RefinementAndEqualLength) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int depth = 1 + static_cast<int>(rng() % 10);
    SplittingTree tree(random_schedule(rng, depth), BranchSelector::seeded(rng()), depth);
    for (int d = 0; d < depth; ++d) {
      for (const Node& t : materialize(tree, d).leaves()) {
        Dyadic children;
        for (int b = 0; b < 2; ++b) {
          if (contains(tree, t.child(b))) children += cylinder_measure(tree, t.child(b));
        }
        ASSERT_EQ(children, cylinder_measure(tree, t));
        ASSERT_EQ(cylinder_measure(tree, t), Dyadic::pow2(-d + tree.schedule().count_below(d)));
      }
    }
  }
}

TEST(Sample, ForcedTreeGivesUniqueBranch) {
  SplittingTree forced(BranchSchedule::all_levels(12), BranchSelector::seeded(9), 12);
  auto branch = materialize(forced, 12).leaves().at(0);
  for (const Node& x : sample(forced, 1, 50)) EXPECT_EQ(x, branch);
}

TEST(Sample, DeterministicPerSeed) {
  SplittingTree full(BranchSchedule::empty(3), BranchSelector::constant(0), 3);
  EXPECT_EQ(sample(full, 1, 20), sample(full, 1, 20));
  EXPECT_NE(sample(full, 1, 20), sample(full, 2, 20));
  EXPECT_THROW(sample(full, 1, 0), InvalidArgument);
}

TEST(Sample, CylinderFrequenciesWithinFiveSigma) {
  SplittingTree odds(BranchSchedule::odd_levels(12), BranchSelector::seeded(21), 12);
  const std::size_t count = 10000;
  std::map<Node, std::size_t> freq;
  for (const Node& x : sample(odds, 77, count)) {
    ASSERT_TRUE(contains(odds, x));
    ++freq[x.prefix(4)];
  }
  for (const Node& t : materialize(odds, 4).leaves()) {
    const double p = cylinder_measure(odds, t).to_double();
    const double sigma = std::sqrt(count * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(freq[t]), count * p, 5 * sigma) << t.str();
  }
  EXPECT_EQ(freq.size(), 4u);
}

TEST(Selector, GameBuiltLayers) {
  BranchSelector y = BranchSelector::game_built({SelectorLayer{2, Node("0"), 1}});
  EXPECT_TRUE(y.decided(2));
  EXPECT_FALSE(y.decided(3));
  EXPECT_EQ(y.value(Node("10")), 1);  // incomparable with the root
  EXPECT_EQ(y.value(Node("01")), 0);  // compatible: default rule
  EXPECT_EQ(y.value(Node("101")), 0); // undecided level
  EXPECT_THROW(y.with_layer(SelectorLayer{2, Node("1"), 0}), InvalidArgument);
  BranchSelector z = y.with_layer(SelectorLayer{5, Node("1"), 1});
  ASSERT_NE(z.layer_at(5), nullptr);
  EXPECT_EQ(z.layer_at(5)->root, Node("1"));
}
