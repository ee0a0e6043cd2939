#ifndef HGAUGE_TREE_HPP
#define HGAUGE_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "hgauge/dyadic.hpp"
#include "hgauge/gauge.hpp"
#include "hgauge/node.hpp"

namespace hgauge {

inline constexpr std::size_t kDefaultNodeBudget = std::size_t{1} << 22;

// One decided level of a game-built selector: every node t at `level` gets
// y(t) = bit when t is incomparable with root, and the default 0 otherwise.
struct SelectorLayer {
  int level = 0;
  Node root;
  int bit = 0;

  friend bool operator==(const SelectorLayer&, const SelectorLayer&) = default;
};

// The function y: 2^<ω -> 2 choosing the successor at forced levels. Values
// are computed lazily so arbitrarily deep trees stay representable.
class BranchSelector {
 public:
  struct Constant {
    int bit = 0;
  };
  struct Seeded {
    std::uint64_t seed = 0;
  };
  struct Explicit {
    std::map<Node, int> assignments;
    int default_bit = 0;
  };
  struct GameBuilt {
    std::vector<SelectorLayer> layers;  // sorted by level, one per level
  };
  using Kind = std::variant<Constant, Seeded, Explicit, GameBuilt>;

  BranchSelector() : kind_(GameBuilt{}) {}
  static BranchSelector constant(int bit);
  static BranchSelector seeded(std::uint64_t seed);
  static BranchSelector explicit_map(std::map<Node, int> assignments, int default_bit);
  static BranchSelector game_built(std::vector<SelectorLayer> layers);

  const Kind& kind() const { return kind_; }
  int value(const Node& t) const;
  // Whether y is decided at this level. Only game-built selectors have
  // undecided levels; there the default rule supplies the value.
  bool decided(int level) const;
  const SelectorLayer* layer_at(int level) const;

  // A copy with one more decided layer. Throws if the level is taken.
  BranchSelector with_layer(SelectorLayer layer) const;

 private:
  explicit BranchSelector(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

// T_{A,y} truncated at `depth`: levels in A are forced by y, all others split.
class SplittingTree {
 public:
  SplittingTree(BranchSchedule schedule, BranchSelector selector, int depth);

  const BranchSchedule& schedule() const { return schedule_; }
  const BranchSelector& selector() const { return selector_; }
  int depth() const { return depth_; }

 private:
  BranchSchedule schedule_;
  BranchSelector selector_;
  int depth_;
};

// A finite truncation with its leaves listed explicitly. Leaves are stored
// packed (one bit per level), sorted, all of length depth.
class ExplicitTree {
 public:
  ExplicitTree(int depth, const std::vector<Node>& leaves);

  int depth() const { return depth_; }
  std::size_t leaf_count() const { return count_; }
  Node leaf(std::size_t i) const;
  int bit(std::size_t leaf, int position) const {
    const std::uint64_t word = data_[leaf * words_ + static_cast<std::size_t>(position) / 64];
    return static_cast<int>((word >> (63 - static_cast<unsigned>(position) % 64)) & 1u);
  }
  std::vector<Node> leaves() const;
  // Some leaf extends t.
  bool contains_prefix(const Node& t) const;

 private:
  friend ExplicitTree materialize(const SplittingTree&, int, std::size_t);
  ExplicitTree(int depth) : depth_(depth), words_(static_cast<std::size_t>(depth + 63) / 64 + (depth == 0 ? 1 : 0)) {}
  void push_leaf(const Node& leaf);

  int depth_;
  std::size_t words_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> data_;
};

// t ∈ T_{A,y}. Throws OutOfRange when |t| exceeds the tree depth.
bool contains(const SplittingTree& tree, const Node& t);

// μ_{A,y}([t]) = 2^{-|t| + |A ∩ |t||}, exactly. Throws NotInTree.
Dyadic cylinder_measure(const SplittingTree& tree, const Node& t);

// Number of tree nodes of length n: 2^{n - |A ∩ n|}.
BigInt level_count(const SplittingTree& tree, int n);

// `count` μ_{A,y}-distributed nodes of length depth, deterministic in seed.
std::vector<Node> sample(const SplittingTree& tree, std::uint64_t seed, std::size_t count);

// All tree nodes of length depth, in lexicographic order. Throws
// ResourceExceeded when there are more than `budget` of them.
ExplicitTree materialize(const SplittingTree& tree, int depth, std::size_t budget = kDefaultNodeBudget);

}  // namespace hgauge

#endif  // HGAUGE_TREE_HPP
