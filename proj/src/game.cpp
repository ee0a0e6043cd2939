#include "hgauge/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "hgauge/error.hpp"

namespace hgauge {
namespace {

TreeMap::Transition edge(int next, const char* bits) { return TreeMap::Transition{next, Node(bits)}; }

// Distinct roots a bad-set computation must track compatibility with: the
// requirement's own root plus every layer root.
struct RootIndex {
  std::vector<Node> roots;

  std::size_t add(const Node& root) {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (roots[i] == root) return i;
    }
    if (roots.size() == 32) throw ResourceExceeded("more than 32 distinct roots in one bad-set computation", 33);
    roots.push_back(root);
    return roots.size() - 1;
  }

  // Clear the compatibility bit of every root that disagrees with `bit` at
  // position `pos`.
  std::uint32_t update(std::uint32_t mask, std::size_t pos, int bit) const {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (pos < roots[i].size() && roots[i][pos] != bit) mask &= ~(std::uint32_t{1} << i);
    }
    return mask;
  }
};

bool compatible(std::uint32_t mask, std::size_t idx) { return ((mask >> idx) & 1u) != 0; }

bool image_obeys_tree(const BranchSchedule& schedule, const BranchSelector& selector, const Node& image) {
  for (int n : schedule.indices()) {
    if (n >= static_cast<int>(image.size())) break;
    if (!selector.decided(n)) continue;
    if (image[static_cast<std::size_t>(n)] != selector.value(image.prefix(static_cast<std::size_t>(n)))) return false;
  }
  return true;
}

bool is_bad(const GameState& state, const Requirement& req, const Node& x) {
  if (!req.root.is_prefix_of(x)) return false;
  Node image = apply_map(state.maps()[req.map_index], x);
  if (!image.incomparable_with(req.root)) return false;
  return image_obeys_tree(state.schedule(), state.selector(), image);
}

BadMeasure scan_measure(const GameState& state, std::size_t r, int depth, std::optional<int> split_level) {
  BadSet set = bad_set(state, r, depth);
  BadMeasure out;
  out.total = set.measure;
  if (set.leaves.empty()) return out;
  Dyadic leaf_mass = Dyadic::pow2(-depth + state.schedule().count_below(depth));
  for (const Node& leaf : set.leaves) {
    std::size_t bucket = 2;
    if (split_level) {
      Node image = apply_map(state.maps()[set.requirement.map_index], leaf);
      if (*split_level < static_cast<int>(image.size())) bucket = static_cast<std::size_t>(image[static_cast<std::size_t>(*split_level)]);
    }
    out.by_bit[bucket] += leaf_mass;
  }
  return out;
}

struct DpKey {
  int state = 0;
  std::uint32_t x_mask = 0;
  std::uint32_t image_mask = 0;
  int split = -1;

  friend auto operator<=>(const DpKey&, const DpKey&) = default;
};

// Exact μ of the bad set by running the tree and the transducer side by side.
// A state remembers which roots the point and its image are still compatible
// with; that is all the layered selector can ask about.
BadMeasure automaton_measure(const GameState& state, std::size_t r, int depth, std::optional<int> split_level) {
  const Requirement& req = state.requirements()[r];
  const TreeMap& map = state.maps()[req.map_index];
  const TreeMap::Transducer& automaton = *map.automaton();
  const auto* game = std::get_if<BranchSelector::GameBuilt>(&state.selector().kind());

  RootIndex index;
  const std::size_t own = index.add(req.root);
  std::vector<std::size_t> layer_root;
  for (const SelectorLayer& layer : game->layers) layer_root.push_back(index.add(layer.root));
  auto layer_index = [&](int level) -> std::optional<std::size_t> {
    if (!state.schedule().contains(level)) return std::nullopt;
    for (std::size_t i = 0; i < game->layers.size(); ++i) {
      if (game->layers[i].level == level) return i;
    }
    return std::nullopt;
  };
  // Selector value at a node of length `level` given its compatibility mask.
  auto selector_bit = [&](std::size_t li, std::uint32_t mask) {
    return compatible(mask, layer_root[li]) ? 0 : game->layers[li].bit;
  };

  BadMeasure out;
  if (depth < static_cast<int>(req.root.size())) return out;

  const std::uint32_t all = index.roots.size() == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << index.roots.size()) - 1;
  std::map<DpKey, Dyadic> current;
  current[DpKey{automaton.start, all, all, -1}] = Dyadic(BigInt(1));

  for (int i = 0; i < depth; ++i) {
    std::map<DpKey, Dyadic> next;
    const bool forced = state.schedule().contains(i);
    const auto x_layer = layer_index(i);
    for (const auto& [key, mass] : current) {
      std::array<std::pair<int, Dyadic>, 2> options;
      std::size_t option_count = 0;
      if (forced) {
        int bit = x_layer ? selector_bit(*x_layer, key.x_mask) : 0;
        options[option_count++] = {bit, mass};
      } else {
        Dyadic half = mass.half();
        options[option_count++] = {0, half};
        options[option_count++] = {1, half};
      }
      for (std::size_t o = 0; o < option_count; ++o) {
        const auto& [bit, share] = options[o];
        if (static_cast<std::size_t>(i) < req.root.size() && req.root[static_cast<std::size_t>(i)] != bit) continue;
        DpKey out_key{0, index.update(key.x_mask, static_cast<std::size_t>(i), bit), key.image_mask, key.split};
        const TreeMap::Transition& step = automaton.delta[static_cast<std::size_t>(key.state)][static_cast<std::size_t>(bit)];
        int pos = i + map.offset(key.state);
        bool alive = true;
        for (std::size_t k = 0; k < step.output.size() && alive; ++k, ++pos) {
          int out_bit = step.output[k];
          if (auto li = layer_index(pos)) alive = out_bit == selector_bit(*li, out_key.image_mask);
          if (split_level && pos == *split_level) out_key.split = out_bit;
          out_key.image_mask = index.update(out_key.image_mask, static_cast<std::size_t>(pos), out_bit);
        }
        if (!alive) continue;
        out_key.state = step.next;
        next[out_key] += share;
      }
    }
    current = std::move(next);
  }

  for (const auto& [key, mass] : current) {
    if (compatible(key.image_mask, own)) continue;  // image still compatible with the root
    out.total += mass;
    out.by_bit[key.split < 0 ? 2 : static_cast<std::size_t>(key.split)] += mass;
  }
  return out;
}

int max_lag(const std::vector<TreeMap>& maps) {
  int lag = 0;
  for (const TreeMap& m : maps) lag = std::max(lag, m.lag());
  return lag;
}

std::size_t max_root_length(const std::vector<Requirement>& reqs) {
  std::size_t len = 0;
  for (const Requirement& r : reqs) len = std::max(len, r.root.size());
  return len;
}

// Least level in A a stage for `req` may decide. A level is eligible when it
// lies past every root (plus lag), past every decided level by more than the
// lag, and early enough that every depth-d image has its bit there. The lag
// gaps keep earlier image constraints and root tests of all requirements
// independent of the newly decided bit.
std::optional<int> pick_level(const BranchSchedule& schedule, const std::vector<TreeMap>& maps,
                              const std::vector<Requirement>& reqs, int depth, std::optional<int> last_decided,
                              const Requirement& req) {
  const int lag = max_lag(maps);
  const int floor_level = static_cast<int>(max_root_length(reqs)) + lag;
  const int own_lag = maps[req.map_index].lag();
  for (int n : schedule.indices()) {
    if (n < floor_level) continue;
    if (last_decided && n <= *last_decided + lag) continue;
    if (n + own_lag >= depth) break;
    return n;
  }
  return std::nullopt;
}

std::optional<int> last_layer_level(const BranchSelector& selector) {
  const auto* game = std::get_if<BranchSelector::GameBuilt>(&selector.kind());
  if (game == nullptr || game->layers.empty()) return std::nullopt;
  return game->layers.back().level;
}

}  // namespace

TreeMap::TreeMap(Kind kind, Transducer automaton) : kind_(kind), automaton_(std::move(automaton)) {
  if (kind_ == Kind::explicit_map) return;
  const auto states = automaton_.delta.size();
  if (states == 0) throw InvalidArgument("transducer needs at least one state");
  if (automaton_.start < 0 || static_cast<std::size_t>(automaton_.start) >= states) {
    throw InvalidArgument("transducer start state out of range");
  }
  // offset(q) = image length - input length whenever q is reached; it is
  // well defined exactly when every cycle emits one bit per input bit.
  constexpr int kUnset = std::numeric_limits<int>::min();
  offsets_.assign(states, kUnset);
  offsets_[static_cast<std::size_t>(automaton_.start)] = 0;
  std::queue<int> pending;
  pending.push(automaton_.start);
  while (!pending.empty()) {
    int q = pending.front();
    pending.pop();
    for (const Transition& t : automaton_.delta[static_cast<std::size_t>(q)]) {
      if (t.next < 0 || static_cast<std::size_t>(t.next) >= states) throw InvalidArgument("transducer transition out of range");
      int expected = offsets_[static_cast<std::size_t>(q)] + static_cast<int>(t.output.size()) - 1;
      int& slot = offsets_[static_cast<std::size_t>(t.next)];
      if (slot == kUnset) {
        slot = expected;
        pending.push(t.next);
      } else if (slot != expected) {
        throw InvalidArgument("transducer has unbounded lag (a cycle does not emit one bit per input bit)");
      }
    }
  }
  for (int& o : offsets_) {
    if (o == kUnset) o = 0;  // unreachable
    lag_ = std::max(lag_, std::abs(o));
  }
}

TreeMap TreeMap::bit_flip() {
  return TreeMap(Kind::bit_flip, Transducer{0, {{edge(0, "1"), edge(0, "0")}}});
}

TreeMap TreeMap::shift() {
  return TreeMap(Kind::shift, Transducer{0, {{edge(1, ""), edge(1, "")}, {edge(1, "0"), edge(1, "1")}}});
}

TreeMap TreeMap::identity() {
  return TreeMap(Kind::identity, Transducer{0, {{edge(0, "0"), edge(0, "1")}}});
}

TreeMap TreeMap::transducer(Transducer automaton) { return TreeMap(Kind::transducer, std::move(automaton)); }

TreeMap TreeMap::explicit_map(std::map<Node, Node> entries) {
  for (auto a = entries.begin(); a != entries.end(); ++a) {
    for (auto b = entries.begin(); b != entries.end(); ++b) {
      if (a != b && a->first.is_prefix_of(b->first) && !a->second.is_prefix_of(b->second)) {
        throw InvalidArgument("explicit map is not monotone at '" + a->first.str() + "' < '" + b->first.str() + "'");
      }
    }
  }
  TreeMap out(Kind::explicit_map, Transducer{});
  for (const auto& [k, v] : entries) {
    int diff = static_cast<int>(v.size()) - static_cast<int>(k.size());
    out.lag_ = std::max(out.lag_, std::abs(diff));
  }
  out.entries_ = std::move(entries);
  return out;
}

std::string TreeMap::name() const {
  switch (kind_) {
    case Kind::bit_flip:
      return "bit_flip";
    case Kind::shift:
      return "shift";
    case Kind::identity:
      return "identity";
    case Kind::transducer:
      return "transducer";
    case Kind::explicit_map:
      return "explicit";
  }
  return "unknown";
}

Node apply_map(const TreeMap& m, const Node& t) {
  if (const auto* automaton = m.automaton()) {
    Node out;
    int q = automaton->start;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& step = automaton->delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(t[i])];
      for (std::size_t k = 0; k < step.output.size(); ++k) out.push_back(step.output[k]);
      q = step.next;
    }
    return out;
  }
  auto it = m.entries().find(t);
  if (it == m.entries().end()) throw OutOfRange("explicit map has no entry for '" + t.str() + "'");
  return it->second;
}

GameState::GameState(BranchSchedule schedule, std::vector<TreeMap> maps, std::vector<Requirement> requirements,
                     int depth, std::vector<SelectorLayer> layers)
    : schedule_(std::move(schedule)),
      maps_(std::move(maps)),
      requirements_(std::move(requirements)),
      depth_(depth),
      selector_(BranchSelector::game_built(std::move(layers))) {
  if (depth_ < 0 || depth_ > schedule_.depth()) throw InvalidArgument("game depth outside the schedule truncation");
  for (const Requirement& r : requirements_) {
    if (r.map_index >= maps_.size()) throw InvalidArgument("requirement refers to a missing map");
  }
  for (std::size_t r = 0; r < requirements_.size(); ++r) initial_.push_back(bad_measure(*this, r, depth_).total);
  bounds_ = initial_;
  stages_done_.assign(requirements_.size(), 0);
}

std::optional<int> GameState::next_level(std::size_t r) const {
  return pick_level(schedule_, maps_, requirements_, depth_, last_layer_level(selector_), requirements_.at(r));
}

BadSet bad_set(const GameState& state, std::size_t r, int depth) {
  if (depth < 0 || depth > state.depth()) throw InvalidArgument("bad-set depth outside the working depth");
  const Requirement& req = state.requirements().at(r);
  ExplicitTree leaves = materialize(state.tree(), depth);
  BadSet out{req, depth, {}, {}};
  for (std::size_t i = 0; i < leaves.leaf_count(); ++i) {
    Node x = leaves.leaf(i);
    if (is_bad(state, req, x)) out.leaves.push_back(std::move(x));
  }
  Dyadic leaf_mass = Dyadic::pow2(-depth + state.schedule().count_below(depth));
  out.measure = leaf_mass * Dyadic(BigInt(out.leaves.size()));
  return out;
}

BadMeasure bad_measure(const GameState& state, std::size_t r, int depth, std::optional<int> split_level) {
  if (depth < 0 || depth > state.depth()) throw InvalidArgument("bad-set depth outside the working depth");
  const TreeMap& map = state.maps()[state.requirements().at(r).map_index];
  if (map.automaton() == nullptr) return scan_measure(state, r, depth, split_level);
  return automaton_measure(state, r, depth, split_level);
}

GameState stage_step(const GameState& state, std::size_t r) {
  const Requirement& req = state.requirements().at(r);
  std::optional<int> level = state.next_level(r);
  if (!level) {
    throw DepthExhausted("no eligible forced level left for requirement (map " + std::to_string(req.map_index) +
                             ", root '" + req.root.str() + "') at depth " + std::to_string(state.depth()),
                         r);
  }

  BadMeasure before = bad_measure(state, r, state.depth(), *level);
  if (before.total > state.bounds()[r]) throw std::logic_error("bad measure exceeds its recorded bound before a stage");
  if (!before.by_bit[2].is_zero()) throw std::logic_error("image too short at the chosen stage level");

  // The lighter half; B^0 + B^1 is the whole bad set so one of them
  // qualifies. Ties go to 0.
  const int bit = before.by_bit[0].scaled(1) <= before.total ? 0 : 1;

  GameState next = state;
  next.selector_ = state.selector().with_layer(SelectorLayer{*level, req.root, bit});
  next.bounds_[r] = state.bounds()[r].half();
  ++next.stages_done_[r];

  BadMeasure after = bad_measure(next, r, next.depth());
  if (after.total > before.by_bit[static_cast<std::size_t>(bit)]) {
    throw std::logic_error("re-derived bad set is larger than the chosen half");
  }
  for (std::size_t other = 0; other < next.requirements().size(); ++other) {
    if (bad_measure(next, other, next.depth()).total > next.bounds()[other]) {
      throw std::logic_error("a stage raised another requirement's bad measure above its bound");
    }
  }

  next.log_.push_back(StageRecord{static_cast<int>(state.log().size()) + 1, r, *level, bit, before.total,
                                  {before.by_bit[0], before.by_bit[1]}, after.total, next.bounds_[r]});
  return next;
}

std::vector<Requirement> make_requirements(std::size_t map_count, const std::vector<Node>& roots) {
  std::vector<Requirement> out;
  for (std::size_t i = 0; i < map_count; ++i) {
    for (const Node& root : roots) out.push_back(Requirement{i, root});
  }
  return out;
}

int max_feasible_stages(const BranchSchedule& schedule, const std::vector<TreeMap>& maps,
                        const std::vector<Node>& roots, int depth) {
  std::vector<Requirement> reqs = make_requirements(maps.size(), roots);
  if (reqs.empty()) return std::numeric_limits<int>::max();
  std::optional<int> last;
  int rounds = 0;
  while (true) {
    for (const Requirement& req : reqs) {
      auto n = pick_level(schedule, maps, reqs, depth, last, req);
      if (!n) return rounds;
      last = n;
    }
    ++rounds;
  }
}

GameResult run_game(const BranchSchedule& schedule, const std::vector<TreeMap>& maps, const std::vector<Node>& roots,
                    int depth, int stages_per_requirement) {
  if (stages_per_requirement < 0) throw InvalidArgument("stage count must be >= 0");
  int feasible = max_feasible_stages(schedule, maps, roots, depth);
  if (stages_per_requirement > feasible) {
    throw Infeasible("schedule too thin: " + std::to_string(stages_per_requirement) +
                         " stages per requirement requested, at most " + std::to_string(feasible) + " fit",
                     feasible);
  }
  GameState state(schedule, maps, make_requirements(maps.size(), roots), depth);
  for (int round = 0; round < stages_per_requirement; ++round) {
    for (std::size_t r = 0; r < state.requirements().size(); ++r) state = stage_step(state, r);
  }

  AntichainCertificate cert;
  cert.schedule = schedule;
  cert.depth = depth;
  cert.layers = std::get<BranchSelector::GameBuilt>(state.selector().kind()).layers;
  cert.stages_executed = static_cast<int>(state.log().size());
  for (std::size_t r = 0; r < state.requirements().size(); ++r) {
    const Requirement& req = state.requirements()[r];
    cert.requirements.push_back(RequirementOutcome{req.map_index, req.root, state.initial_bounds()[r],
                                                   state.bounds()[r], bad_measure(state, r, depth).total,
                                                   state.stages_done()[r]});
  }
  SplittingTree tree = state.tree();
  return GameResult{std::move(tree), std::move(cert), std::move(state)};
}

EscapeReport verify_escape(const SplittingTree& tree, const std::vector<TreeMap>& maps, std::size_t samples,
                           std::uint64_t seed, const std::vector<Requirement>& requirements) {
  EscapeReport report;
  report.samples = samples;
  report.seed = seed;
  report.per_map.resize(maps.size());
  if (samples == 0) return report;
  std::vector<Node> points = sample(tree, seed, samples);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    EscapeCounts& counts = report.per_map[i];
    for (const Node& x : points) {
      Node image = apply_map(maps[i], x);
      if (!image_obeys_tree(tree.schedule(), tree.selector(), image)) {
        ++counts.escaped;
      } else if (image.compatible_with(x)) {
        ++counts.fixed;
      } else {
        ++counts.undetermined;
        bool covered = std::any_of(requirements.begin(), requirements.end(), [&](const Requirement& r) {
          return r.map_index == i && r.root.is_prefix_of(x) && image.incomparable_with(r.root);
        });
        if (covered) {
          ++counts.covered_undetermined;
        } else {
          ++counts.uncovered;
        }
      }
    }
  }
  return report;
}

std::size_t allowed_bad_samples(const Dyadic& beta, std::size_t samples) {
  double b = std::clamp(beta.to_double(), 0.0, 1.0);
  double n = static_cast<double>(samples);
  return static_cast<std::size_t>(std::ceil(n * b + 5.0 * std::sqrt(n * b * (1.0 - b))));
}

}  // namespace hgauge
