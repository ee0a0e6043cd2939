#ifndef HGAUGE_GAME_HPP
#define HGAUGE_GAME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hgauge/dyadic.hpp"
#include "hgauge/gauge.hpp"
#include "hgauge/node.hpp"
#include "hgauge/tree.hpp"

namespace hgauge {

// A monotone map on finite binary strings standing for a continuous map of
// Cantor space. Everything except explicit node maps compiles to a finite
// state transducer.
class TreeMap {
 public:
  enum class Kind { bit_flip, shift, identity, transducer, explicit_map };

  struct Transition {
    int next = 0;
    Node output;
  };
  struct Transducer {
    int start = 0;
    std::vector<std::array<Transition, 2>> delta;  // delta[state][input bit]
  };

  static TreeMap bit_flip();
  static TreeMap shift();
  static TreeMap identity();
  // Throws InvalidArgument for malformed automata or unbounded lag.
  static TreeMap transducer(Transducer automaton);
  // Throws InvalidArgument when the entries are not monotone.
  static TreeMap explicit_map(std::map<Node, Node> entries);

  Kind kind() const { return kind_; }
  // Bound on | |image| - |input| |.
  int lag() const { return lag_; }
  // Image length after reading input while in each state is input length +
  // offset(state); only meaningful for transducer-backed maps.
  int offset(int state) const { return offsets_[static_cast<std::size_t>(state)]; }
  const Transducer* automaton() const { return kind_ == Kind::explicit_map ? nullptr : &automaton_; }
  const std::map<Node, Node>& entries() const { return entries_; }
  std::string name() const;

 private:
  TreeMap(Kind kind, Transducer automaton);

  Kind kind_;
  Transducer automaton_;
  std::vector<int> offsets_;
  std::map<Node, Node> entries_;
  int lag_ = 0;
};

// The image prefix determined by t. Throws OutOfRange for an explicit map
// with no entry for t.
Node apply_map(const TreeMap& m, const Node& t);

// Serve map i on the points extending root whose image leaves root.
struct Requirement {
  std::size_t map_index = 0;
  Node root;
};

struct StageRecord {
  int stage = 0;
  std::size_t requirement = 0;
  int level = 0;
  int chosen_bit = 0;
  Dyadic measure_before;
  std::array<Dyadic, 2> halves;
  Dyadic measure_after;
  Dyadic bound;
};

class GameState {
 public:
  // Bounds start at the bad measures under the given layers (none for a
  // fresh game).
  GameState(BranchSchedule schedule, std::vector<TreeMap> maps, std::vector<Requirement> requirements, int depth,
            std::vector<SelectorLayer> layers = {});

  const BranchSchedule& schedule() const { return schedule_; }
  const std::vector<TreeMap>& maps() const { return maps_; }
  const std::vector<Requirement>& requirements() const { return requirements_; }
  int depth() const { return depth_; }
  const BranchSelector& selector() const { return selector_; }
  SplittingTree tree() const { return SplittingTree(schedule_, selector_, depth_); }

  const std::vector<Dyadic>& initial_bounds() const { return initial_; }
  const std::vector<Dyadic>& bounds() const { return bounds_; }
  const std::vector<int>& stages_done() const { return stages_done_; }
  const std::vector<StageRecord>& log() const { return log_; }

  // Least level a stage for requirement r may decide, if any.
  std::optional<int> next_level(std::size_t r) const;

 private:
  friend GameState stage_step(const GameState&, std::size_t);

  BranchSchedule schedule_;
  std::vector<TreeMap> maps_;
  std::vector<Requirement> requirements_;
  int depth_;
  BranchSelector selector_;
  std::vector<Dyadic> initial_;
  std::vector<Dyadic> bounds_;
  std::vector<int> stages_done_;
  std::vector<StageRecord> log_;
};

// Leaves of the current tree at depth d that are bad for requirement r: they
// extend the root, their image is incomparable with it, and the image obeys
// every decided forced level it reaches.
struct BadSet {
  Requirement requirement;
  int depth = 0;
  std::vector<Node> leaves;
  Dyadic measure;
};

// Exhaustive leaf scan over materialize(tree, d).
BadSet bad_set(const GameState& state, std::size_t r, int depth);

struct BadMeasure {
  Dyadic total;
  // Split by the image bit at the requested level; index 2 holds images too
  // short to have that bit.
  std::array<Dyadic, 3> by_bit;
};

// μ of the bad set, optionally split by the image bit at split_level. Uses an
// exact automaton DP for transducer maps and falls back to the leaf scan for
// explicit maps.
BadMeasure bad_measure(const GameState& state, std::size_t r, int depth, std::optional<int> split_level = std::nullopt);

// One halving stage for requirement r: decides the least eligible forced
// level so the bad measure drops to the lighter half, and halves the
// recorded bound. Throws DepthExhausted when no level is eligible.
GameState stage_step(const GameState& state, std::size_t r);

struct RequirementOutcome {
  std::size_t map_index = 0;
  Node root;
  Dyadic initial;
  Dyadic final_bound;
  Dyadic recomputed;
  int stages = 0;
};

struct AntichainCertificate {
  BranchSchedule schedule;
  std::vector<SelectorLayer> layers;
  int depth = 0;
  std::vector<RequirementOutcome> requirements;
  int stages_executed = 0;
};

struct GameResult {
  SplittingTree tree;
  AntichainCertificate certificate;
  GameState state;
};

// Round-robin over (map, root) pairs, map-major, m stages each.
std::vector<Requirement> make_requirements(std::size_t map_count, const std::vector<Node>& roots);

// Largest m for which every requirement gets m stages.
int max_feasible_stages(const BranchSchedule& schedule, const std::vector<TreeMap>& maps,
                        const std::vector<Node>& roots, int depth);

// Throws Infeasible (carrying max_feasible_stages) when the schedule is too
// thin for m stages per requirement.
GameResult run_game(const BranchSchedule& schedule, const std::vector<TreeMap>& maps, const std::vector<Node>& roots,
                    int depth, int stages_per_requirement);

struct EscapeCounts {
  std::size_t fixed = 0;
  std::size_t escaped = 0;
  std::size_t undetermined = 0;
  // Split of `undetermined` when requirements are supplied: covered points
  // extend a root their image leaves; uncovered ones are outside every
  // requirement.
  std::size_t covered_undetermined = 0;
  std::size_t uncovered = 0;
};

struct EscapeReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<EscapeCounts> per_map;
};

EscapeReport verify_escape(const SplittingTree& tree, const std::vector<TreeMap>& maps, std::size_t samples,
                           std::uint64_t seed, const std::vector<Requirement>& requirements = {});

// Covered-undetermined samples a bad measure of beta permits out of n draws:
// ceil(n*beta + 5*sqrt(n*beta*(1-beta))).
std::size_t allowed_bad_samples(const Dyadic& beta, std::size_t samples);

}  // namespace hgauge

#endif  // HGAUGE_GAME_HPP
