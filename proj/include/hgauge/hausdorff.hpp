#ifndef HGAUGE_HAUSDORFF_HPP
#define HGAUGE_HAUSDORFF_HPP

#include <optional>
#include <string>
#include <vector>

#include "hgauge/dyadic.hpp"
#include "hgauge/gauge.hpp"
#include "hgauge/node.hpp"
#include "hgauge/tree.hpp"

namespace hgauge {

// A finite family of cylinders, each named by its node.
struct CylinderCover {
  std::vector<Node> nodes;

  bool covers(const ExplicitTree& target) const;
  bool is_antichain() const;
};

struct FrostmanBound {
  double value = 1.0;  // μ of the whole tree
  int n0 = 0;          // valid for covers by cylinders of length >= n0
};

// Least n0 <= depth with 2^{-n+|A∩n|} <= g(2^-n) for every n in [n0, depth].
// Throws ConditionFailed carrying the worst violating level.
FrostmanBound frostman_lower(const SplittingTree& tree, const Gauge& g);

// Non-throwing form over an explicit truncation depth.
std::optional<int> frostman_threshold(const BranchSchedule& schedule, const Gauge& g, int depth);

struct CoverCost {
  double cost = 0.0;
  CylinderCover witness;
};

// Exact minimum of Σ g(2^-|t|) over cylinder covers of the leaves using
// nodes of length in [k, depth], by recursion over the explicit trie.
CoverCost optimal_cover_cost(const ExplicitTree& tree, const Gauge& g, int delta_exponent);

struct LevelCost {
  double cost = 0.0;
  int witness_level = 0;  // optimal cover = every tree node at this level
  BigInt witness_count;
};

// Same value as optimal_cover_cost(materialize(tree, depth)) in O(depth),
// using that every node of a level has the same subtree.
LevelCost level_dp_cost(const SplittingTree& tree, const Gauge& g, int delta_exponent, int depth);

// Maximum number of candidate nodes brute_force_cover_cost will enumerate
// antichains over.
inline constexpr std::size_t kBruteForceNodeLimit = 32;

// Test oracle: enumerates every antichain of nodes of length in [k, depth],
// keeps those covering all leaves, returns the least g-cost.
double brute_force_cover_cost(const ExplicitTree& tree, const Gauge& g, int delta_exponent);

struct DimensionConfig {
  double decay_threshold = 1.0 / 1024.0;    // H^s -> 0 evidence: cost below 2^-10
  double trend_margin = 1.0 / (1 << 20);     // or cost(N) < cost(N/2) * (1 - margin)
};

struct DimensionInterval {
  double lower = 0.0;
  double upper = 1.0;
  bool conclusive = true;
  // Last exponents at which each kind of evidence was seen; on an
  // inconclusive result, the exponent where neither was.
  std::optional<double> frostman_witness;
  std::optional<double> decay_witness;
  std::optional<double> stuck_at;
  // (n - |A ∩ n|) / n for n = 1..depth.
  std::vector<double> box_profile;
};

// Bisection on s in [0, 1] for Power(s) gauges.
DimensionInterval dimension_estimate(const SplittingTree& tree, double tolerance, int depth,
                                     const DimensionConfig& config = {});

struct LevelRow {
  int n = 0;
  BigInt count;
  Dyadic mu_cylinder;
  double gauge_value = 0.0;
  double level_cost = 0.0;
};

// Per-level table for n = 0..depth: node count, cylinder measure, gauge
// value and the cost of covering by the whole level.
std::vector<LevelRow> level_table(const SplittingTree& tree, const Gauge& g, int depth);

struct MeasureCertificate {
  Gauge gauge;
  int delta_exponent = 0;
  int depth = 0;
  std::optional<FrostmanBound> lower;
  std::optional<int> frostman_violation;  // worst violating level when lower is absent
  LevelCost upper;
  CylinderCover witness;                   // listed when it has at most witness_cap nodes
  bool witness_truncated = false;
};

MeasureCertificate measure_certificate(const SplittingTree& tree, const Gauge& g, int delta_exponent, int depth,
                                       std::size_t witness_cap = 1024);

}  // namespace hgauge

#endif  // HGAUGE_HAUSDORFF_HPP
