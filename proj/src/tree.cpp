#include "hgauge/tree.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "hgauge/error.hpp"

namespace hgauge {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

int seeded_bit(std::uint64_t seed, const Node& t) {
  std::uint64_t h = splitmix64(seed ^ 0x243F6A8885A308D3ull);
  for (std::size_t i = 0; i < t.size(); ++i) h = splitmix64(h + static_cast<std::uint64_t>(t[i]) + 1);
  h = splitmix64(h ^ t.size());
  return static_cast<int>(h >> 63);
}

void check_bit(int bit) {
  if (bit != 0 && bit != 1) throw InvalidArgument("selector bits must be 0 or 1");
}

}  // namespace

BranchSelector BranchSelector::constant(int bit) {
  check_bit(bit);
  return BranchSelector(Constant{bit});
}

BranchSelector BranchSelector::seeded(std::uint64_t seed) { return BranchSelector(Seeded{seed}); }

BranchSelector BranchSelector::explicit_map(std::map<Node, int> assignments, int default_bit) {
  check_bit(default_bit);
  for (const auto& [node, bit] : assignments) check_bit(bit);
  return BranchSelector(Explicit{std::move(assignments), default_bit});
}

BranchSelector BranchSelector::game_built(std::vector<SelectorLayer> layers) {
  std::sort(layers.begin(), layers.end(), [](const auto& a, const auto& b) { return a.level < b.level; });
  for (std::size_t i = 0; i < layers.size(); ++i) {
    check_bit(layers[i].bit);
    if (layers[i].level < 0) throw InvalidArgument("selector layer level must be >= 0");
    if (i > 0 && layers[i].level == layers[i - 1].level) {
      throw InvalidArgument("two selector layers at level " + std::to_string(layers[i].level));
    }
  }
  return BranchSelector(GameBuilt{std::move(layers)});
}

const SelectorLayer* BranchSelector::layer_at(int level) const {
  const auto* game = std::get_if<GameBuilt>(&kind_);
  if (game == nullptr) return nullptr;
  auto it = std::lower_bound(game->layers.begin(), game->layers.end(), level,
                             [](const SelectorLayer& l, int x) { return l.level < x; });
  if (it == game->layers.end() || it->level != level) return nullptr;
  return &*it;
}

int BranchSelector::value(const Node& t) const {
  return std::visit(
      [&](const auto& k) -> int {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Constant>) {
          return k.bit;
        } else if constexpr (std::is_same_v<K, Seeded>) {
          return seeded_bit(k.seed, t);
        } else if constexpr (std::is_same_v<K, Explicit>) {
          auto it = k.assignments.find(t);
          return it == k.assignments.end() ? k.default_bit : it->second;
        } else {
          const SelectorLayer* layer = layer_at(static_cast<int>(t.size()));
          if (layer == nullptr || t.compatible_with(layer->root)) return 0;
          return layer->bit;
        }
      },
      kind_);
}

bool BranchSelector::decided(int level) const {
  if (!std::holds_alternative<GameBuilt>(kind_)) return true;
  return layer_at(level) != nullptr;
}

BranchSelector BranchSelector::with_layer(SelectorLayer layer) const {
  const auto* game = std::get_if<GameBuilt>(&kind_);
  if (game == nullptr) throw InvalidArgument("only game-built selectors take layers");
  std::vector<SelectorLayer> layers = game->layers;
  layers.push_back(std::move(layer));
  return game_built(std::move(layers));
}

SplittingTree::SplittingTree(BranchSchedule schedule, BranchSelector selector, int depth)
    : schedule_(std::move(schedule)), selector_(std::move(selector)), depth_(depth) {
  if (depth_ < 0) throw InvalidArgument("tree depth must be >= 0");
  if (depth_ > schedule_.depth()) {
    throw InvalidArgument("tree depth " + std::to_string(depth_) + " exceeds schedule depth " +
                          std::to_string(schedule_.depth()));
  }
}

ExplicitTree::ExplicitTree(int depth, const std::vector<Node>& leaves) : ExplicitTree(depth) {
  if (depth < 0) throw InvalidArgument("tree depth must be >= 0");
  if (leaves.empty()) throw InvalidArgument("explicit tree needs at least one leaf");
  std::vector<Node> sorted = leaves;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (static_cast<int>(sorted[i].size()) != depth) throw InvalidArgument("explicit tree leaves must have length depth");
    if (i > 0 && sorted[i] == sorted[i - 1]) throw InvalidArgument("duplicate leaf " + sorted[i].str());
    push_leaf(sorted[i]);
  }
}

void ExplicitTree::push_leaf(const Node& leaf) {
  std::size_t base = data_.size();
  data_.resize(base + words_, 0);
  for (std::size_t i = 0; i < leaf.size(); ++i) {
    if (leaf[i] != 0) data_[base + i / 64] |= std::uint64_t{1} << (63 - i % 64);
  }
  ++count_;
}

Node ExplicitTree::leaf(std::size_t i) const {
  Node out;
  for (int p = 0; p < depth_; ++p) out.push_back(bit(i, p));
  return out;
}

std::vector<Node> ExplicitTree::leaves() const {
  std::vector<Node> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(leaf(i));
  return out;
}

bool ExplicitTree::contains_prefix(const Node& t) const {
  if (static_cast<int>(t.size()) > depth_) return false;
  // Leaves are sorted, so the first leaf >= t padded with zeros decides it.
  std::size_t lo = 0;
  std::size_t hi = count_;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    int cmp = 0;
    for (std::size_t p = 0; p < t.size() && cmp == 0; ++p) cmp = bit(mid, static_cast<int>(p)) - t[p];
    if (cmp < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == count_) return false;
  for (std::size_t p = 0; p < t.size(); ++p) {
    if (bit(lo, static_cast<int>(p)) != t[p]) return false;
  }
  return true;
}

bool contains(const SplittingTree& tree, const Node& t) {
  if (static_cast<int>(t.size()) > tree.depth()) {
    throw OutOfRange("node of length " + std::to_string(t.size()) + " exceeds tree depth " +
                     std::to_string(tree.depth()));
  }
  for (int level : tree.schedule().indices()) {
    if (level >= static_cast<int>(t.size())) break;
    if (t[static_cast<std::size_t>(level)] != tree.selector().value(t.prefix(static_cast<std::size_t>(level)))) {
      return false;
    }
  }
  return true;
}

Dyadic cylinder_measure(const SplittingTree& tree, const Node& t) {
  if (!contains(tree, t)) throw NotInTree("node '" + t.str() + "' is not in the tree");
  auto n = static_cast<std::int64_t>(t.size());
  return Dyadic::pow2(-n + tree.schedule().count_below(static_cast<int>(n)));
}

BigInt level_count(const SplittingTree& tree, int n) {
  if (n < 0 || n > tree.depth()) throw OutOfRange("level " + std::to_string(n) + " outside the tree truncation");
  return BigInt(1) << static_cast<unsigned>(n - tree.schedule().count_below(n));
}

std::vector<Node> sample(const SplittingTree& tree, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw InvalidArgument("sample count must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<Node> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Node t;
    for (int level = 0; level < tree.depth(); ++level) {
      if (tree.schedule().contains(level)) {
        t.push_back(tree.selector().value(t));
      } else {
        t.push_back(static_cast<int>(gen() >> 63));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

ExplicitTree materialize(const SplittingTree& tree, int depth, std::size_t budget) {
  if (depth < 0 || depth > tree.depth()) throw OutOfRange("materialization depth outside the tree truncation");
  BigInt count = level_count(tree, depth);
  if (count > budget) {
    throw ResourceExceeded("materializing " + count.str() + " leaves exceeds the node budget of " +
                               std::to_string(budget),
                           count > BigInt(std::numeric_limits<std::size_t>::max())
                               ? std::numeric_limits<std::size_t>::max()
                               : count.convert_to<std::size_t>());
  }
  ExplicitTree out(depth);
  Node t;
  // Depth-first, 0 before 1, so leaves come out sorted.
  auto walk = [&](auto&& self) -> void {
    int level = static_cast<int>(t.size());
    if (level == depth) {
      out.push_leaf(t);
      return;
    }
    if (tree.schedule().contains(level)) {
      t.push_back(tree.selector().value(t));
      self(self);
    } else {
      t.push_back(0);
      self(self);
      t.pop_back();
      t.push_back(1);
      self(self);
    }
    t.pop_back();
  };
  walk(walk);
  return out;
}

}  // namespace hgauge
