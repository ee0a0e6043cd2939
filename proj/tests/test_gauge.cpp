#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "hgauge/error.hpp"
#include "hgauge/gauge.hpp"
#include "hgauge/transfer.hpp"

using namespace hgauge;

namespace {

Gauge power(std::int64_t p, std::int64_t q = 1) { return Gauge::power(Rational(p, q)); }
Gauge powerlog11() { return Gauge::power_log(Rational(1), Rational(1)); }

// Independent checks: the counting bound at every level from n0, and
// that no further level could be added.
void expect_dagger_and_maximal(const BranchSchedule& a, const std::vector<int>& c) {
  const int depth = a.depth();
  auto holds = [&](const std::vector<bool>& in) {
    int count = 0;
    for (int m = 0; m <= depth; ++m) {
      if (m > 0) count += in[static_cast<std::size_t>(m - 1)] ? 1 : 0;
      if (m >= a.n0() && count > c[static_cast<std::size_t>(m)]) return false;
    }
    return true;
  };
  std::vector<bool> in(static_cast<std::size_t>(depth), false);
  for (int n : a.indices()) in[static_cast<std::size_t>(n)] = true;
  EXPECT_TRUE(holds(in));
  for (int n = a.n0(); n < depth; ++n) {
    if (in[static_cast<std::size_t>(n)]) continue;
    auto more = in;
    more[static_cast<std::size_t>(n)] = true;
    EXPECT_FALSE(holds(more)) << "level " << n << " could still be added";
  }
}

}  // namespace

TEST(GaugeEval, DyadicValuesAreExact) {
  EXPECT_EQ(eval(power(1, 2), DyadicScale(8)), 0.0625);
  EXPECT_EQ(eval(powerlog11(), DyadicScale(8)), 0.03125);
  EXPECT_EQ(eval(power(1), DyadicScale(0)), 1.0);
  EXPECT_EQ(power(1, 2).exact_log2(9), Rational(-9, 2));
  EXPECT_EQ(powerlog11().exact_log2(16), Rational(-12));
  EXPECT_FALSE(powerlog11().exact_log2(3).has_value());
}

TEST(GaugeEval, TableRangeAndInterpolation) {
  std::vector<std::pair<int, double>> entries;
  for (int n = 1; n <= 10; ++n) entries.emplace_back(n, std::ldexp(1.0, -n));
  Gauge t = Gauge::table(entries);
  EXPECT_THROW(eval(t, DyadicScale(20)), OutOfRange);
  EXPECT_THROW(eval(t, DyadicScale(0)), OutOfRange);
  EXPECT_EQ(eval(t, DyadicScale(4)), 1.0 / 16);

  Gauge sparse = Gauge::table({{0, 1.0}, {4, 1.0 / 16}});
  EXPECT_DOUBLE_EQ(eval(sparse, DyadicScale(2)), 0.25);  // log-linear
}

TEST(GaugeEval, RejectsMalformedGauges) {
  EXPECT_THROW(Gauge::power(Rational(0)), InvalidArgument);
  EXPECT_THROW(Gauge::power_log(Rational(1, 2), Rational(1)), InvalidArgument);
  EXPECT_THROW(Gauge::table({}), InvalidArgument);
  EXPECT_THROW(Gauge::table({{2, 0.5}, {1, 0.25}}), InvalidArgument);
  EXPECT_THROW(Gauge::table({{1, 0.25}, {2, 0.5}}), InvalidArgument);
  EXPECT_THROW(DyadicScale(-1), InvalidArgument);
}

TEST(GaugeEval, MonotoneInExponentProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::int64_t q = std::uniform_int_distribution<std::int64_t>(1, 12)(rng);
    std::int64_t p = std::uniform_int_distribution<std::int64_t>(1, 2 * q)(rng);
    std::int64_t c = std::uniform_int_distribution<std::int64_t>(-3, p)(rng);
    Gauge gs[] = {Gauge::power(Rational(p, q)), Gauge::power_log(Rational(p, q), Rational(c, q))};
    for (const Gauge& g : gs) {
      for (int n = 0; n < 200; ++n) {
        ASSERT_GE(g.log2_value(n), g.log2_value(n + 1)) << g.description() << " at " << n;
      }
    }
  }
}

TEST(CompareOrder, IdentityAgainstPowerLog) {
  // id/g = 1/log2(1/t): 1/64 at n = 64 is above 0.01, 1/128 is below.
  EXPECT_EQ(compare_order(power(1), powerlog11(), 64, 0.01).relation, OrderRelation::inconclusive);
  EXPECT_EQ(compare_order(power(1), powerlog11(), 128, 0.01).relation, OrderRelation::second_lower_order);
  EXPECT_EQ(compare_order(power(1), powerlog11(), 512, 0.01).relation, OrderRelation::second_lower_order);
}

TEST(CompareOrder, PowerBelowPowerLog) {
  auto v = compare_order(power(9, 10), powerlog11(), 512, 0.01);
  EXPECT_EQ(v.relation, OrderRelation::first_lower_order);
  ASSERT_EQ(v.ratio_trace.size(), 512u);
  EXPECT_EQ(v.ratio_trace.front().first, 1);
  EXPECT_NEAR(v.ratio_trace[99].second, std::pow(2.0, -10.0) * 100, 1e-12);
}

TEST(CompareOrder, IdenticalAndSwapped) {
  EXPECT_EQ(compare_order(power(1, 2), power(1, 2), 64, 0.01).relation, OrderRelation::inconclusive);
  EXPECT_THROW(compare_order(power(1), power(1, 2), 3, 0.01), InsufficientData);
  for (auto [a, b] : {std::pair{power(1, 3), power(2, 3)}, std::pair{power(1, 10), powerlog11()}}) {
    auto ab = compare_order(a, b, 256, 0.01);
    auto ba = compare_order(b, a, 256, 0.01);
    EXPECT_EQ(ab.relation, OrderRelation::first_lower_order);
    EXPECT_EQ(ba.relation, OrderRelation::second_lower_order);
  }
}

TEST(BoundTable, SpecValues) {
  auto pl = bound_table(powerlog11(), 32);
  EXPECT_EQ(pl[16], 4);
  for (int n = 1; n < 32; ++n) EXPECT_EQ(pl[static_cast<std::size_t>(n)], std::bit_width(static_cast<unsigned>(n)) - 1);
  for (int c : bound_table(power(1), 40)) EXPECT_EQ(c, 0);
  EXPECT_EQ(bound_table(power(1, 2), 10)[9], 4);
  EXPECT_EQ(sparsity_bound(power(1, 2), 9), 4);
}

TEST(BoundTable, MatchesExactFloorForPowers) {
  for (std::int64_t q : {2, 3, 5, 7, 10}) {
    for (std::int64_t p = 1; p <= q; ++p) {
      auto c = bound_table(Gauge::power(Rational(p, q)), 100);
      for (int n = 0; n < 100; ++n) {
        // floor(n (1 - p/q)) in integers.
        EXPECT_EQ(c[static_cast<std::size_t>(n)], (n * (q - p)) / q) << p << "/" << q << " n=" << n;
      }
    }
  }
}

TEST(SparsitySchedule, SpecExamples) {
  EXPECT_EQ(sparsity_schedule(powerlog11(), 32).indices(), (std::vector<int>{1, 3, 7, 15, 31}));
  EXPECT_TRUE(sparsity_schedule(power(1), 32).vacuous());
  EXPECT_EQ(sparsity_schedule(power(1, 2), 10).indices(), (std::vector<int>{1, 3, 5, 7, 9}));
  EXPECT_EQ(sparsity_schedule(power(1, 2), 64).indices(), BranchSchedule::odd_levels(64).indices());
}

TEST(SparsitySchedule, DaggerAndMaximality) {
  std::vector<Gauge> gauges = {powerlog11(), power(1, 2), power(1, 3), power(3, 4),
                               Gauge::power_log(Rational(1), Rational(1, 2)),
                               Gauge::power_log(Rational(9, 10), Rational(-1))};
  for (const Gauge& g : gauges) {
    for (int depth : {1, 7, 33, 100}) {
      BranchSchedule a = sparsity_schedule(g, depth);
      expect_dagger_and_maximal(a, bound_table(g, depth + 1));
    }
  }
}

TEST(Schedule, Validation) {
  EXPECT_THROW(BranchSchedule(5, {1, 1}), InvalidArgument);
  EXPECT_THROW(BranchSchedule(5, {5}), InvalidArgument);
  BranchSchedule a(10, {1, 4, 8});
  EXPECT_EQ(a.count_below(0), 0);
  EXPECT_EQ(a.count_below(5), 2);
  EXPECT_EQ(a.count_below(10), 3);
  EXPECT_TRUE(a.contains(4));
  EXPECT_FALSE(a.contains(5));
}

TEST(Conjugate, PowerDividesExponent) {
  Gauge g = gauge_conjugate(power(1, 2), 3);
  ASSERT_TRUE(std::holds_alternative<Gauge::Power>(g.kind()));
  EXPECT_EQ(std::get<Gauge::Power>(g.kind()).s, Rational(1, 6));
  Gauge same = gauge_conjugate(powerlog11(), 1);
  EXPECT_EQ(same.description(), powerlog11().description());
}

TEST(Conjugate, PowerLogValuesAndVerdict) {
  Gauge g = powerlog11();
  Gauge g2 = gauge_conjugate(g, 2);
  for (int m = 0; m <= 40; m += 2) EXPECT_DOUBLE_EQ(g2.log2_value(m), g.log2_value(m / 2));
  // Odd exponents sit between the neighbouring even ones.
  for (int m = 1; m < 40; m += 2) {
    EXPECT_LE(g2.log2_value(m), g.log2_value(m / 2));
    EXPECT_GE(g2.log2_value(m), g.log2_value(m / 2 + 1));
  }
  // g' below id exactly when g is below t^2.
  EXPECT_EQ(compare_order(g2, power(1), 512, 0.01).relation, compare_order(g, power(2), 256, 0.01).relation);
  EXPECT_EQ(compare_order(g2, power(1), 512, 0.01).relation, OrderRelation::first_lower_order);
}
