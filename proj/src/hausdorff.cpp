#include "hgauge/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hgauge/error.hpp"

namespace hgauge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 2^{-n+a} <= g(2^-n), exactly when log2 g is rational, otherwise with the
// log guard so rounding never certifies a false inequality.
bool frostman_holds(const Gauge& g, int n, int forced_below) {
  Rational lhs(forced_below - n);
  if (auto exact = g.exact_log2(n)) return lhs <= *exact;
  return g.log2_value(n) >= lhs.to_double() + kLogGuard;
}

std::vector<double> gauge_values(const Gauge& g, int depth) {
  std::vector<double> v(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) v[static_cast<std::size_t>(n)] = eval(g, DyadicScale(n));
  return v;
}

// Trie over the sorted leaves: the node of length `level` spanning leaves
// [lo, hi) splits at the first leaf whose bit at `level` is 1.
std::size_t split_point(const ExplicitTree& tree, std::size_t lo, std::size_t hi, int level) {
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (tree.bit(mid, level) == 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

struct TrieDp {
  const ExplicitTree& tree;
  const std::vector<double>& g;
  int k;

  double cost(std::size_t lo, std::size_t hi, int level) const {
    double stop = level >= k ? g[static_cast<std::size_t>(level)] : kInf;
    if (level == tree.depth()) return stop;
    std::size_t mid = split_point(tree, lo, hi, level);
    double below = 0.0;
    if (mid > lo) below += cost(lo, mid, level + 1);
    if (hi > mid) below += cost(mid, hi, level + 1);
    return std::min(stop, below);
  }

  void witness(std::size_t lo, std::size_t hi, int level, Node& prefix, std::vector<Node>& out) const {
    if (level == tree.depth()) {
      out.push_back(prefix);
      return;
    }
    std::size_t mid = split_point(tree, lo, hi, level);
    double below = 0.0;
    if (mid > lo) below += cost(lo, mid, level + 1);
    if (hi > mid) below += cost(mid, hi, level + 1);
    if (level >= k && g[static_cast<std::size_t>(level)] <= below) {
      out.push_back(prefix);
      return;
    }
    if (mid > lo) {
      prefix.push_back(0);
      witness(lo, mid, level + 1, prefix, out);
      prefix.pop_back();
    }
    if (hi > mid) {
      prefix.push_back(1);
      witness(mid, hi, level + 1, prefix, out);
      prefix.pop_back();
    }
  }
};

}  // namespace

bool CylinderCover::covers(const ExplicitTree& target) const {
  for (std::size_t i = 0; i < target.leaf_count(); ++i) {
    bool hit = false;
    for (const Node& c : nodes) {
      if (static_cast<int>(c.size()) > target.depth()) continue;
      bool prefix = true;
      for (std::size_t p = 0; p < c.size() && prefix; ++p) prefix = target.bit(i, static_cast<int>(p)) == c[p];
      if (prefix) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool CylinderCover::is_antichain() const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i != j && nodes[i].is_prefix_of(nodes[j])) return false;
    }
  }
  return true;
}

std::optional<int> frostman_threshold(const BranchSchedule& schedule, const Gauge& g, int depth) {
  int last_violation = -1;
  for (int n = 0; n <= depth; ++n) {
    if (!frostman_holds(g, n, schedule.count_below(n))) last_violation = n;
  }
  if (last_violation == depth) return std::nullopt;
  return last_violation + 1;
}

FrostmanBound frostman_lower(const SplittingTree& tree, const Gauge& g) {
  const int depth = tree.depth();
  if (auto n0 = frostman_threshold(tree.schedule(), g, depth)) return FrostmanBound{1.0, *n0};

  int worst = depth;
  double worst_gap = -kInf;
  for (int n = 0; n <= depth; ++n) {
    double gap = (tree.schedule().count_below(n) - n) - g.log2_value(n);
    if (!frostman_holds(g, n, tree.schedule().count_below(n)) && gap > worst_gap) {
      worst_gap = gap;
      worst = n;
    }
  }
  throw ConditionFailed("cylinder measure exceeds the gauge at level " + std::to_string(depth) +
                            "; worst violation at level " + std::to_string(worst),
                        worst);
}

CoverCost optimal_cover_cost(const ExplicitTree& tree, const Gauge& g, int delta_exponent) {
  if (delta_exponent < 0 || delta_exponent > tree.depth()) {
    throw InvalidArgument("delta exponent " + std::to_string(delta_exponent) + " outside [0, depth]");
  }
  std::vector<double> values = gauge_values(g, tree.depth());
  TrieDp dp{tree, values, delta_exponent};
  CoverCost out;
  out.cost = dp.cost(0, tree.leaf_count(), 0);
  Node prefix;
  dp.witness(0, tree.leaf_count(), 0, prefix, out.witness.nodes);
  return out;
}

LevelCost level_dp_cost(const SplittingTree& tree, const Gauge& g, int delta_exponent, int depth) {
  if (depth < 0 || depth > tree.depth()) throw InvalidArgument("depth outside the tree truncation");
  if (delta_exponent < 0 || delta_exponent > depth) {
    throw InvalidArgument("delta exponent " + std::to_string(delta_exponent) + " outside [0, depth]");
  }
  std::vector<double> values = gauge_values(g, depth);
  // per_node[n]: optimal cost of covering the subtree below one level-n node;
  // stop_at[n]: the level at which that optimal cover sits.
  std::vector<double> per_node(static_cast<std::size_t>(depth) + 1);
  std::vector<int> stop_at(per_node.size());
  per_node.back() = values.back();
  stop_at.back() = depth;
  for (int n = depth - 1; n >= 0; --n) {
    auto i = static_cast<std::size_t>(n);
    double branching = tree.schedule().contains(n) ? 1.0 : 2.0;
    double below = branching * per_node[i + 1];
    if (n >= delta_exponent && values[i] <= below) {
      per_node[i] = values[i];
      stop_at[i] = n;
    } else {
      per_node[i] = below;
      stop_at[i] = stop_at[i + 1];
    }
  }
  LevelCost out;
  out.cost = per_node[0];
  out.witness_level = stop_at[0];
  out.witness_count = level_count(tree, out.witness_level);
  return out;
}

double brute_force_cover_cost(const ExplicitTree& tree, const Gauge& g, int delta_exponent) {
  if (delta_exponent < 0 || delta_exponent > tree.depth()) {
    throw InvalidArgument("delta exponent " + std::to_string(delta_exponent) + " outside [0, depth]");
  }
  std::set<Node> unique;
  std::vector<Node> leaves = tree.leaves();
  for (const Node& leaf : leaves) {
    for (int len = delta_exponent; len <= tree.depth(); ++len) unique.insert(leaf.prefix(static_cast<std::size_t>(len)));
  }
  if (unique.size() > kBruteForceNodeLimit) {
    throw ResourceExceeded("brute force over " + std::to_string(unique.size()) + " nodes exceeds the limit of " +
                               std::to_string(kBruteForceNodeLimit),
                           unique.size());
  }
  // std::set order on bit strings is preorder: a node precedes its
  // descendants, which form a contiguous run after it.
  std::vector<Node> candidates(unique.begin(), unique.end());
  std::vector<std::size_t> skip(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::size_t j = i + 1;
    while (j < candidates.size() && candidates[i].is_prefix_of(candidates[j])) ++j;
    skip[i] = j;
  }

  double best = kInf;
  std::vector<const Node*> chosen;
  auto covered = [&] {
    for (const Node& leaf : leaves) {
      bool hit = std::any_of(chosen.begin(), chosen.end(), [&](const Node* c) { return c->is_prefix_of(leaf); });
      if (!hit) return false;
    }
    return true;
  };
  auto enumerate = [&](auto&& self, std::size_t i) -> void {
    if (i == candidates.size()) {
      if (!chosen.empty() && covered()) {
        double total = 0.0;
        for (const Node* c : chosen) total += eval(g, DyadicScale(static_cast<int>(c->size())));
        best = std::min(best, total);
      }
      return;
    }
    self(self, i + 1);
    chosen.push_back(&candidates[i]);
    self(self, skip[i]);
    chosen.pop_back();
  };
  enumerate(enumerate, 0);
  return best;
}

DimensionInterval dimension_estimate(const SplittingTree& tree, double tolerance, int depth,
                                     const DimensionConfig& config) {
  if (!(tolerance >= 1.0 / (1 << 20))) throw InvalidArgument("dimension tolerance must be >= 2^-20");
  if (depth < 1 || depth > tree.depth()) throw InvalidArgument("dimension depth outside [1, tree depth]");

  DimensionInterval out;
  for (int n = 1; n <= depth; ++n) {
    out.box_profile.push_back(static_cast<double>(n - tree.schedule().count_below(n)) / n);
  }

  // Bisection points are dyadic, so they are exact rationals with
  // denominator 2^steps.
  std::int64_t lo_num = 0;
  std::int64_t hi_num = 1;
  std::int64_t den = 1;
  auto decays = [&](const Gauge& gs) {
    double full = level_dp_cost(tree, gs, 0, depth).cost;
    double half = level_dp_cost(tree, gs, 0, depth / 2).cost;
    return full < config.decay_threshold || full < half * (1.0 - config.trend_margin);
  };
  while (static_cast<double>(hi_num - lo_num) / static_cast<double>(den) > tolerance) {
    lo_num *= 2;
    hi_num *= 2;
    den *= 2;
    std::int64_t mid = (lo_num + hi_num) / 2;
    Gauge gs = Gauge::power(Rational(mid, den));
    double s = static_cast<double>(mid) / static_cast<double>(den);
    if (frostman_threshold(tree.schedule(), gs, depth)) {
      lo_num = mid;
      out.frostman_witness = s;
    } else if (decays(gs)) {
      hi_num = mid;
      out.decay_witness = s;
    } else {
      out.conclusive = false;
      out.stuck_at = s;
      break;
    }
  }
  out.lower = static_cast<double>(lo_num) / static_cast<double>(den);
  out.upper = static_cast<double>(hi_num) / static_cast<double>(den);
  return out;
}

std::vector<LevelRow> level_table(const SplittingTree& tree, const Gauge& g, int depth) {
  if (depth < 0 || depth > tree.depth()) throw InvalidArgument("depth outside the tree truncation");
  std::vector<LevelRow> rows;
  rows.reserve(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) {
    LevelRow row;
    row.n = n;
    row.count = level_count(tree, n);
    row.mu_cylinder = Dyadic::pow2(-n + tree.schedule().count_below(n));
    row.gauge_value = eval(g, DyadicScale(n));
    row.level_cost = row.count.convert_to<double>() * row.gauge_value;
    rows.push_back(std::move(row));
  }
  return rows;
}

MeasureCertificate measure_certificate(const SplittingTree& tree, const Gauge& g, int delta_exponent, int depth,
                                       std::size_t witness_cap) {
  MeasureCertificate cert{g, delta_exponent, depth, std::nullopt, std::nullopt, {}, {}, false};
  if (auto n0 = frostman_threshold(tree.schedule(), g, depth)) {
    cert.lower = FrostmanBound{1.0, *n0};
  } else {
    try {
      SplittingTree truncated(tree.schedule(), tree.selector(), depth);
      (void)frostman_lower(truncated, g);
    } catch (const ConditionFailed& e) {
      cert.frostman_violation = e.worst_level();
    }
  }
  cert.upper = level_dp_cost(tree, g, delta_exponent, depth);
  if (cert.upper.witness_count <= witness_cap) {
    cert.witness.nodes = materialize(tree, cert.upper.witness_level, witness_cap).leaves();
  } else {
    cert.witness_truncated = true;
  }
  return cert;
}

}  // namespace hgauge
