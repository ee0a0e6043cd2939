#include "hgauge/io.hpp"

#include <fstream>
#include <sstream>

#include "hgauge/error.hpp"

namespace hgauge {
namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad JSON field '") + key + "': " + e.what());
  }
}

Rational rational_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw InvalidArgument(std::string("field '") + key + "' must be a \"p/q\" string");
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InvalidArgument("not a number: '" + text + "'");
  return v;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InvalidArgument("not an integer: '" + text + "'");
  return v;
}

}  // namespace

Gauge parse_gauge_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InvalidArgument("gauge spec needs KIND:ARGS, got '" + std::string(spec) + "'");
  const std::string_view kind = spec.substr(0, colon);
  const std::vector<std::string> args = split(spec.substr(colon + 1), ',');
  if (kind == "power") {
    if (args.size() != 1) throw InvalidArgument("power gauge takes one argument: power:S");
    return Gauge::power(Rational::parse(args[0]));
  }
  if (kind == "power_log") {
    if (args.size() != 2) throw InvalidArgument("power_log gauge takes two arguments: power_log:S,C");
    return Gauge::power_log(Rational::parse(args[0]), Rational::parse(args[1]));
  }
  if (kind == "table") {
    std::vector<std::pair<int, double>> entries;
    for (const std::string& item : args) {
      auto parts = split(item, '=');
      if (parts.size() != 2) throw InvalidArgument("table entries are N=VALUE, got '" + item + "'");
      entries.emplace_back(parse_int(parts[0]), parse_double(parts[1]));
    }
    return Gauge::table(std::move(entries));
  }
  throw InvalidArgument("unknown gauge kind '" + std::string(kind) + "'");
}

json to_json(const Gauge& g) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gauge::Power>) {
          return {{"kind", "power"}, {"s", k.s.to_string()}};
        } else if constexpr (std::is_same_v<K, Gauge::PowerLog>) {
          return {{"kind", "power_log"}, {"s", k.s.to_string()}, {"c", k.c.to_string()}};
        } else if constexpr (std::is_same_v<K, Gauge::Table>) {
          json entries = json::array();
          for (const auto& [n, v] : k.entries) entries.push_back(json::array({n, v}));
          return {{"kind", "table"}, {"entries", entries}};
        } else {
          return {{"kind", "conjugate"}, {"n", k.n}, {"base", to_json(*k.base)}};
        }
      },
      g.kind());
}

Gauge gauge_from_json(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "power") return Gauge::power(rational_field(j, "s"));
  if (kind == "power_log") return Gauge::power_log(rational_field(j, "s"), rational_field(j, "c"));
  if (kind == "table") {
    std::vector<std::pair<int, double>> entries;
    for (const json& e : field(j, "entries")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
        throw InvalidArgument("table entries are [n, value] pairs");
      }
      entries.emplace_back(e[0].get<int>(), e[1].get<double>());
    }
    return Gauge::table(std::move(entries));
  }
  if (kind == "conjugate") return Gauge::conjugate(gauge_from_json(field(j, "base")), get<int>(j, "n"));
  throw InvalidArgument("unknown gauge kind '" + kind + "'");
}

json to_json(const BranchSchedule& a) {
  json out = {{"depth", a.depth()}, {"indices", a.indices()}, {"n0", a.n0()}};
  out["gauge"] = a.gauge() ? to_json(*a.gauge()) : json(nullptr);
  return out;
}

BranchSchedule schedule_from_json(const json& j) {
  std::optional<Gauge> g;
  if (j.contains("gauge") && !j.at("gauge").is_null()) g = gauge_from_json(j.at("gauge"));
  int n0 = j.contains("n0") ? get<int>(j, "n0") : 0;
  return BranchSchedule(get<int>(j, "depth"), get<std::vector<int>>(j, "indices"), n0, std::move(g));
}

json to_json(const BranchSelector& y) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BranchSelector::Constant>) {
          return {{"kind", "constant"}, {"bit", k.bit}};
        } else if constexpr (std::is_same_v<K, BranchSelector::Seeded>) {
          return {{"kind", "seeded"}, {"seed", k.seed}};
        } else if constexpr (std::is_same_v<K, BranchSelector::Explicit>) {
          json assignments = json::array();
          for (const auto& [t, bit] : k.assignments) assignments.push_back(json::array({t.str(), bit}));
          return {{"kind", "explicit"}, {"default", k.default_bit}, {"assignments", assignments}};
        } else {
          json layers = json::array();
          for (const SelectorLayer& l : k.layers) layers.push_back({{"level", l.level}, {"root", l.root.str()}, {"bit", l.bit}});
          return {{"kind", "game_built"}, {"layers", layers}};
        }
      },
      y.kind());
}

BranchSelector selector_from_json(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "constant") return BranchSelector::constant(get<int>(j, "bit"));
  if (kind == "seeded") return BranchSelector::seeded(get<std::uint64_t>(j, "seed"));
  if (kind == "explicit") {
    std::map<Node, int> assignments;
    for (const json& e : field(j, "assignments")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer()) {
        throw InvalidArgument("explicit selector assignments are [\"bits\", bit] pairs");
      }
      assignments.emplace(Node(e[0].get<std::string>()), e[1].get<int>());
    }
    return BranchSelector::explicit_map(std::move(assignments), j.contains("default") ? get<int>(j, "default") : 0);
  }
  if (kind == "game_built") {
    std::vector<SelectorLayer> layers;
    for (const json& l : field(j, "layers")) {
      layers.push_back(SelectorLayer{get<int>(l, "level"), Node(get<std::string>(l, "root")), get<int>(l, "bit")});
    }
    return BranchSelector::game_built(std::move(layers));
  }
  throw InvalidArgument("unknown selector kind '" + kind + "'");
}

json to_json(const SplittingTree& tree) {
  return {{"schedule", to_json(tree.schedule())}, {"selector", to_json(tree.selector())}, {"depth", tree.depth()}};
}

SplittingTree tree_from_json(const json& j) {
  return SplittingTree(schedule_from_json(field(j, "schedule")), selector_from_json(field(j, "selector")),
                       get<int>(j, "depth"));
}

json to_json(const TreeMap& m) {
  switch (m.kind()) {
    case TreeMap::Kind::bit_flip:
    case TreeMap::Kind::shift:
    case TreeMap::Kind::identity:
      return {{"kind", m.name()}};
    case TreeMap::Kind::transducer: {
      const auto& a = *m.automaton();
      json delta = json::array();
      for (const auto& row : a.delta) {
        delta.push_back(json::array({json::array({row[0].next, row[0].output.str()}),
                                     json::array({row[1].next, row[1].output.str()})}));
      }
      return {{"kind", "transducer"}, {"states", a.delta.size()}, {"start", a.start}, {"delta", delta}};
    }
    case TreeMap::Kind::explicit_map: {
      json entries = json::array();
      for (const auto& [in, out] : m.entries()) entries.push_back(json::array({in.str(), out.str()}));
      return {{"kind", "explicit"}, {"entries", entries}};
    }
  }
  return {};
}

TreeMap map_from_json(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "bit_flip") return TreeMap::bit_flip();
  if (kind == "shift") return TreeMap::shift();
  if (kind == "identity") return TreeMap::identity();
  if (kind == "transducer") {
    TreeMap::Transducer a;
    a.start = j.contains("start") ? get<int>(j, "start") : 0;
    for (const json& row : field(j, "delta")) {
      if (!row.is_array() || row.size() != 2) throw InvalidArgument("transducer rows are [[next, \"out\"], [next, \"out\"]]");
      std::array<TreeMap::Transition, 2> edges;
      for (std::size_t b = 0; b < 2; ++b) {
        const json& e = row[b];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_string()) {
          throw InvalidArgument("transducer transitions are [next, \"out\"]");
        }
        edges[b] = TreeMap::Transition{e[0].get<int>(), Node(e[1].get<std::string>())};
      }
      a.delta.push_back(edges);
    }
    if (j.contains("states") && get<std::size_t>(j, "states") != a.delta.size()) {
      throw InvalidArgument("transducer 'states' does not match the delta table");
    }
    return TreeMap::transducer(std::move(a));
  }
  if (kind == "explicit") {
    std::map<Node, Node> entries;
    for (const json& e : field(j, "entries")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw InvalidArgument("explicit map entries are [\"in\", \"out\"] pairs");
      }
      entries.emplace(Node(e[0].get<std::string>()), Node(e[1].get<std::string>()));
    }
    return TreeMap::explicit_map(std::move(entries));
  }
  throw InvalidArgument("unknown map kind '" + kind + "'");
}

std::vector<TreeMap> map_family_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("a map family is a JSON array");
  std::vector<TreeMap> out;
  for (const json& m : j) out.push_back(map_from_json(m));
  return out;
}

json to_json(const MeasureCertificate& cert) {
  json out = {{"gauge", to_json(cert.gauge)}, {"delta_exp", cert.delta_exponent}, {"depth", cert.depth}};
  if (cert.lower) {
    out["lower"] = {{"value", cert.lower->value}, {"provenance", "frostman"}, {"n0", cert.lower->n0}};
  } else {
    out["lower"] = nullptr;
    out["frostman_violation"] = cert.frostman_violation ? json(*cert.frostman_violation) : json(nullptr);
  }
  out["upper"] = {{"value", cert.upper.cost},
                  {"provenance", "optimal_cover"},
                  {"witness_level", cert.upper.witness_level},
                  {"witness_count", cert.upper.witness_count.str()}};
  json witness = json::array();
  for (const Node& t : cert.witness.nodes) witness.push_back(t.str());
  out["witness"] = witness;
  out["witness_truncated"] = cert.witness_truncated;
  return out;
}

json to_json(const DimensionInterval& dim) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"lower", dim.lower},
          {"upper", dim.upper},
          {"conclusive", dim.conclusive},
          {"frostman_witness", opt(dim.frostman_witness)},
          {"decay_witness", opt(dim.decay_witness)},
          {"stuck_at", opt(dim.stuck_at)}};
}

json to_json(const EscapeReport& report) {
  json per_map = json::array();
  for (const EscapeCounts& c : report.per_map) {
    per_map.push_back({{"fixed", c.fixed},
                       {"escaped", c.escaped},
                       {"undetermined", c.undetermined},
                       {"covered_undetermined", c.covered_undetermined},
                       {"uncovered", c.uncovered}});
  }
  return {{"samples", report.samples}, {"seed", report.seed}, {"per_map", per_map}};
}

json to_json(const AntichainCertificate& cert, const EscapeReport* escape) {
  json reqs = json::array();
  for (const RequirementOutcome& r : cert.requirements) {
    reqs.push_back({{"map", r.map_index},
                    {"root", r.root.str()},
                    {"initial", r.initial.to_string()},
                    {"final_bound", r.final_bound.to_string()},
                    {"recomputed", r.recomputed.to_string()},
                    {"stages", r.stages}});
  }
  json layers = json::array();
  for (const SelectorLayer& l : cert.layers) layers.push_back({{"level", l.level}, {"root", l.root.str()}, {"bit", l.bit}});
  return {{"measure", "mu_{A,y} restricted to the current tree"},
          {"schedule", to_json(cert.schedule)},
          {"depth", cert.depth},
          {"stages_executed", cert.stages_executed},
          {"requirements", reqs},
          {"layers", layers},
          {"escape_report", escape ? to_json(*escape) : json(nullptr)}};
}

json to_json(const DyadicInterval& interval) { return {{"m", interval.m}, {"p", interval.p.str()}}; }

json to_json(const CubePoint& point) {
  json coords = json::array();
  for (const Dyadic& c : point.coords) coords.push_back(c.to_string());
  return {{"coords", coords}, {"precision", point.precision}};
}

json to_json(const CoverTransferRule& rule) {
  return {{"k", rule.k}, {"h", rule.h_root == 1 ? "identity" : "root"}, {"h_root", rule.h_root}};
}

void write_level_csv(std::ostream& out, const std::vector<LevelRow>& rows) {
  out << "n,count,mu_cylinder,gauge_value,level_cost\n";
  for (const LevelRow& r : rows) {
    out << r.n << ',' << r.count.str() << ',' << r.mu_cylinder.to_string() << ',' << json(r.gauge_value).dump() << ','
        << json(r.level_cost).dump() << '\n';
  }
}

void write_schedule_csv(std::ostream& out, const BranchSchedule& a, const Gauge& g) {
  const std::vector<int> c = bound_table(g, a.depth());
  out << "n,c_n,in_A\n";
  for (int n = 0; n < a.depth(); ++n) out << n << ',' << c[static_cast<std::size_t>(n)] << ',' << (a.contains(n) ? 1 : 0) << '\n';
}

void write_stage_csv(std::ostream& out, const GameState& state) {
  out << "stage,map,root,level,chosen_bit,bound\n";
  for (const StageRecord& s : state.log()) {
    const Requirement& r = state.requirements()[s.requirement];
    out << s.stage << ',' << r.map_index << ',' << r.root.str() << ',' << s.level << ',' << s.chosen_bit << ','
        << s.bound.to_string() << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace hgauge
