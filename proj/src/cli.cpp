#include "hgauge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hgauge/error.hpp"
#include "hgauge/game.hpp"
#include "hgauge/hausdorff.hpp"
#include "hgauge/io.hpp"
#include "hgauge/plot.hpp"
#include "hgauge/transfer.hpp"

namespace hgauge::cli {
namespace {

constexpr double kDimensionTolerance = 0.01;
constexpr std::size_t kDefaultEscapeSamples = 1000;

// Everything an output needs to be reproduced. No timestamps or host data,
// so identical invocations give identical bytes.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  json parameters = json::object();

  json to_json() const {
    DimensionConfig dim;
    return {{"command", command},
            {"inputs", inputs},
            {"seed", seed},
            {"parameters", parameters},
            {"config",
             {{"node_budget", kDefaultNodeBudget},
              {"log_guard", "1/2^20"},
              {"brute_force_node_limit", kBruteForceNodeLimit},
              {"dimension_tolerance", kDimensionTolerance},
              {"decay_threshold", dim.decay_threshold},
              {"trend_margin", dim.trend_margin}}},
            {"tool_version", kToolVersion}};
  }
};

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << content;
    if (!f.flush()) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_atomically(path, content);
  }
}

std::string json_document(const RunManifest& manifest, const char* key, json payload) {
  json doc = {{"manifest", manifest.to_json()}, {key, std::move(payload)}};
  return doc.dump(2) + "\n";
}

std::string csv_document(const RunManifest& manifest, const std::string& body) {
  return "# manifest " + manifest.to_json().dump() + "\n" + body;
}

// Accepts either a bare tree or any report that wraps one.
SplittingTree load_tree(const std::string& path) {
  json j = read_json_file(path);
  if (j.contains("tree")) return tree_from_json(j.at("tree"));
  if (j.contains("report") && j.at("report").contains("tree")) return tree_from_json(j.at("report").at("tree"));
  return tree_from_json(j);
}

std::vector<Node> parse_roots(const std::string& text) {
  std::vector<Node> roots;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) pos = text.size();
    roots.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return roots;
}

void check_format(const std::string& format) {
  if (format != "json" && format != "csv") throw InvalidArgument("--format must be json or csv");
}

struct Common {
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("--out", c.out_path, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "json or csv")->capture_default_str();
  if (with_seed) cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
}

// --- schedule -------------------------------------------------------------

int cmd_schedule(const std::string& gauge_spec, int depth, const Common& c, std::ostream& out, std::ostream& err) {
  check_format(c.format);
  const Gauge g = parse_gauge_spec(gauge_spec);
  const BranchSchedule a = sparsity_schedule(g, depth);
  if (a.vacuous()) err << "warning: c(n) = 0 everywhere below depth " << depth << "; the schedule is empty\n";
  RunManifest m{"schedule", {}, 0, {{"gauge", gauge_spec}, {"depth", depth}}};
  if (c.format == "csv") {
    std::ostringstream body;
    write_schedule_csv(body, a, g);
    emit(c.out_path, csv_document(m, body.str()), out);
  } else {
    emit(c.out_path, json_document(m, "schedule", to_json(a)), out);
  }
  return kExitOk;
}

// --- tree -----------------------------------------------------------------

struct TreeArgs {
  std::string schedule_path;
  std::string gauge_spec;
  std::string levels;
  std::string selector = "seeded";
  int bit = 0;
  int depth = 0;
};

int cmd_tree(const TreeArgs& t, const Common& c, std::ostream& out) {
  RunManifest m{"tree", {}, c.seed, {{"depth", t.depth}, {"selector", t.selector}}};
  BranchSchedule a;
  if (!t.schedule_path.empty()) {
    json j = read_json_file(t.schedule_path);
    a = schedule_from_json(j.contains("schedule") ? j.at("schedule") : j);
    m.inputs.push_back(t.schedule_path);
  } else if (!t.gauge_spec.empty()) {
    a = sparsity_schedule(parse_gauge_spec(t.gauge_spec), t.depth);
    m.parameters["gauge"] = t.gauge_spec;
  } else if (t.levels == "odd") {
    a = BranchSchedule::odd_levels(t.depth);
  } else if (t.levels == "all") {
    a = BranchSchedule::all_levels(t.depth);
  } else if (t.levels == "none" || t.levels.empty()) {
    a = BranchSchedule::empty(t.depth);
  } else {
    throw InvalidArgument("--levels must be odd, all or none");
  }
  if (!t.levels.empty()) m.parameters["levels"] = t.levels;

  BranchSelector y;
  if (t.selector == "seeded") {
    y = BranchSelector::seeded(c.seed);
  } else if (t.selector == "constant") {
    y = BranchSelector::constant(t.bit);
    m.parameters["bit"] = t.bit;
  } else {
    throw InvalidArgument("--selector must be seeded or constant");
  }
  emit(c.out_path, json_document(m, "tree", to_json(SplittingTree(a, y, t.depth))), out);
  return kExitOk;
}

// --- measure --------------------------------------------------------------

int cmd_measure(const std::string& tree_path, const std::string& gauge_spec, int delta_exp, int depth, const Common& c,
                std::ostream& out, std::ostream& err) {
  check_format(c.format);
  const SplittingTree tree = load_tree(tree_path);
  const Gauge g = parse_gauge_spec(gauge_spec);
  if (depth < 0) depth = tree.depth();
  RunManifest m{"measure", {tree_path}, 0, {{"gauge", gauge_spec}, {"delta_exp", delta_exp}, {"depth", depth}}};
  if (c.format == "csv") {
    std::ostringstream body;
    write_level_csv(body, level_table(tree, g, depth));
    emit(c.out_path, csv_document(m, body.str()), out);
    return kExitOk;
  }
  MeasureCertificate cert = measure_certificate(tree, g, delta_exp, depth);
  if (!cert.lower) {
    err << "note: Frostman condition fails (worst level " << cert.frostman_violation.value_or(-1)
        << "); certificate has no lower bound\n";
  }
  json payload = to_json(cert);
  json rows = json::array();
  for (const LevelRow& r : level_table(tree, g, depth)) {
    rows.push_back({{"n", r.n},
                    {"count", r.count.str()},
                    {"mu_cylinder", r.mu_cylinder.to_string()},
                    {"gauge_value", r.gauge_value},
                    {"level_cost", r.level_cost}});
  }
  payload["levels"] = rows;
  emit(c.out_path, json_document(m, "certificate", payload), out);
  return kExitOk;
}

// --- antichain ------------------------------------------------------------

struct AntichainArgs {
  std::string gauge_spec;
  std::string maps_path;
  std::string roots = "0,1";
  int depth = 0;
  int stages = 0;
  int delta_exp = 0;
  std::size_t samples = kDefaultEscapeSamples;
};

int cmd_antichain(const AntichainArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  check_format(c.format);
  const Gauge g = parse_gauge_spec(a.gauge_spec);
  const std::vector<TreeMap> maps = map_family_from_json(read_json_file(a.maps_path));
  const std::vector<Node> roots = parse_roots(a.roots);
  RunManifest m{"antichain",
                {a.maps_path},
                c.seed,
                {{"gauge", a.gauge_spec},
                 {"depth", a.depth},
                 {"stages", a.stages},
                 {"roots", a.roots},
                 {"delta_exp", a.delta_exp},
                 {"samples", a.samples}}};

  const BranchSchedule schedule = sparsity_schedule(g, a.depth);
  if (schedule.vacuous()) err << "warning: the schedule for this gauge is empty below depth " << a.depth << "\n";
  GameResult game = run_game(schedule, maps, roots, a.depth, a.stages);

  if (c.format == "csv") {
    std::ostringstream body;
    write_stage_csv(body, game.state);
    emit(c.out_path, csv_document(m, body.str()), out);
    return kExitOk;
  }

  const EscapeReport escape =
      verify_escape(game.tree, maps, a.samples, c.seed, game.state.requirements());
  const MeasureCertificate measure = measure_certificate(game.tree, g, a.delta_exp, a.depth);
  const DimensionInterval dim = dimension_estimate(game.tree, kDimensionTolerance, a.depth);

  json stage_log = json::array();
  for (const StageRecord& s : game.state.log()) {
    const Requirement& r = game.state.requirements()[s.requirement];
    stage_log.push_back({{"stage", s.stage},
                         {"map", r.map_index},
                         {"root", r.root.str()},
                         {"level", s.level},
                         {"chosen_bit", s.chosen_bit},
                         {"measure_before", s.measure_before.to_string()},
                         {"halves", {s.halves[0].to_string(), s.halves[1].to_string()}},
                         {"measure_after", s.measure_after.to_string()},
                         {"bound", s.bound.to_string()}});
  }
  json maps_json = json::array();
  for (const TreeMap& map : maps) maps_json.push_back(to_json(map));

  json report = {{"gauge", to_json(g)},
                 {"schedule", to_json(schedule)},
                 {"maps", maps_json},
                 {"tree", to_json(game.tree)},
                 {"game_certificate", to_json(game.certificate, &escape)},
                 {"stage_log", stage_log},
                 {"measure_certificate", to_json(measure)},
                 {"dimension_interval", to_json(dim)}};
  emit(c.out_path, json_document(m, "report", report), out);
  return kExitOk;
}

// --- transfer -------------------------------------------------------------

Rational random_rational(std::mt19937_64& rng) {
  const std::int64_t den = std::uniform_int_distribution<std::int64_t>(1, std::int64_t{1} << 20)(rng);
  const std::int64_t num = std::uniform_int_distribution<std::int64_t>(0, den)(rng);
  return Rational(num, den);
}

// Independent of the construction: level, count, contiguity and rational
// endpoint comparison.
bool four_cover_ok(const Rational& a, const Rational& b, const std::vector<DyadicInterval>& cover) {
  if (cover.empty() || cover.size() > 4) return false;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (cover[i].m != cover[0].m) return false;
    if (i > 0 && cover[i].p != cover[i - 1].p + 1) return false;
  }
  auto le = [](const Dyadic& d, const Rational& r) {  // d <= r
    return d.numerator() * r.den() <= BigInt(r.num()) << d.exponent();
  };
  auto ge = [](const Dyadic& d, const Rational& r) { return d.numerator() * r.den() >= BigInt(r.num()) << d.exponent(); };
  return le(cover.front().left(), a) && ge(cover.back().right(), b);
}

int cmd_four_cover(std::size_t count, const std::string& a_text, const std::string& b_text, const Common& c,
                   std::ostream& out, std::ostream& err) {
  check_format(c.format);
  RunManifest m{"transfer four-cover", {}, c.seed, {{"count", count}}};
  std::vector<std::pair<Rational, Rational>> items;
  if (!a_text.empty() || !b_text.empty()) {
    items.emplace_back(Rational::parse(a_text), Rational::parse(b_text));
    m.parameters = {{"a", a_text}, {"b", b_text}};
  } else {
    std::mt19937_64 rng(c.seed);
    while (items.size() < count) {
      Rational x = random_rational(rng), y = random_rational(rng);
      if (x == y) continue;
      items.emplace_back(std::min(x, y), std::max(x, y));
    }
  }
  std::size_t passed = 0;
  std::ostringstream csv;
  json rows = json::array();
  csv << "a,b,m,first_p,intervals,pass\n";
  for (const auto& [a, b] : items) {
    auto cover = dyadic_four_cover(a, b);
    bool ok = four_cover_ok(a, b, cover);
    passed += ok ? 1 : 0;
    csv << a.to_string() << ',' << b.to_string() << ',' << cover.front().m << ',' << cover.front().p.str() << ','
        << cover.size() << ',' << (ok ? "pass" : "fail") << '\n';
    json intervals = json::array();
    for (const auto& d : cover) intervals.push_back(to_json(d));
    rows.push_back({{"a", a.to_string()}, {"b", b.to_string()}, {"cover", intervals}, {"pass", ok}});
  }
  err << "four-cover: " << passed << "/" << items.size() << " pass\n";
  if (c.format == "csv") {
    emit(c.out_path, csv_document(m, csv.str()), out);
  } else {
    emit(c.out_path, json_document(m, "four_cover", {{"passed", passed}, {"total", items.size()}, {"items", rows}}),
         out);
  }
  return kExitOk;
}

int cmd_interleave_check(std::size_t count, const std::vector<int>& ns, int length, const Common& c,
                         std::ostream& out, std::ostream& err) {
  check_format(c.format);
  RunManifest m{"transfer interleave-check", {}, c.seed, {{"count", count}, {"n", ns}, {"length", length}}};
  std::mt19937_64 rng(c.seed);
  std::ostringstream csv;
  json rows = json::array();
  csv << "n,k,expected,observed,pass\n";
  std::size_t passed = 0, total = 0;
  for (int n : ns) {
    if (n < 1 || length < n || length % n != 0) throw InvalidArgument("--length must be a positive multiple of every n");
    for (std::size_t i = 0; i < count; ++i) {
      // Random x, then y equal to x before a uniform first-difference
      // position and independent after it.
      Node x, y;
      const int k = std::uniform_int_distribution<int>(0, length - 1)(rng);
      for (int p = 0; p < length; ++p) {
        int bit = static_cast<int>(rng() >> 63);
        x.push_back(bit);
        y.push_back(p < k ? bit : (p == k ? 1 - bit : static_cast<int>(rng() >> 63)));
      }
      MetricCheck mc = interleave_metric_check(x, y, n);
      bool ok = mc.expected == mc.observed;
      passed += ok ? 1 : 0;
      ++total;
      csv << n << ',' << mc.k << ',' << mc.expected.to_string() << ',' << mc.observed.to_string() << ','
          << (ok ? "pass" : "fail") << '\n';
      rows.push_back({{"n", n},
                      {"k", mc.k},
                      {"expected", mc.expected.to_string()},
                      {"observed", mc.observed.to_string()},
                      {"pass", ok}});
    }
  }
  err << "interleave-check: " << passed << "/" << total << " pass\n";
  if (c.format == "csv") {
    emit(c.out_path, csv_document(m, csv.str()), out);
  } else {
    emit(c.out_path, json_document(m, "interleave_check", {{"passed", passed}, {"total", total}, {"items", rows}}),
         out);
  }
  return kExitOk;
}

int cmd_cube_map(const std::string& node, int n, const Common& c, std::ostream& out) {
  check_format(c.format);
  RunManifest m{"transfer cube-map", {}, 0, {{"node", node}, {"n", n}}};
  const CubePoint point = to_cube(Node(node), n);
  if (c.format == "csv") {
    std::ostringstream csv;
    csv << "axis,coordinate\n";
    for (std::size_t i = 0; i < point.coords.size(); ++i) csv << i << ',' << point.coords[i].to_string() << '\n';
    emit(c.out_path, csv_document(m, csv.str()), out);
  } else {
    emit(c.out_path, json_document(m, "point", to_json(point)), out);
  }
  return kExitOk;
}

// --- plot -----------------------------------------------------------------

struct PlotArgs {
  std::string csv_path;
  std::string x;
  std::vector<std::string> y;
  std::string title;
  bool log_y = false;
};

int cmd_plot(const PlotArgs& p, const Common& c, std::ostream& out) {
  const CsvTable table = parse_csv(read_file(p.csv_path));
  if (table.rows.empty()) throw InvalidArgument("CSV '" + p.csv_path + "' has no data rows");
  const std::size_t xc = table.column(p.x);
  std::vector<Series> series;
  for (const std::string& name : p.y) {
    const std::size_t yc = table.column(name);
    Series s{name, {}};
    for (const auto& row : table.rows) s.points.emplace_back(cell_value(row[xc]), cell_value(row[yc]));
    series.push_back(std::move(s));
  }
  RunManifest m{"plot", {p.csv_path}, 0, {{"x", p.x}, {"y", p.y}, {"title", p.title}, {"log_y", p.log_y}}};
  PlotSpec spec{p.title, p.x, p.y.size() == 1 ? p.y.front() : std::string(), p.log_y};
  emit(c.out_path, render_svg(series, spec, m.to_json().dump()), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gauge-measure certificates for splitting trees, antichain games and cube transfers", "hgauge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;

  std::string gauge_spec;
  int depth = 0;
  auto* schedule = app.add_subcommand("schedule", "Greedy sparse schedule for a gauge");
  schedule->add_option("--gauge", gauge_spec, "KIND:ARGS, e.g. power_log:1,1")->required();
  schedule->add_option("--depth", depth)->required()->check(CLI::NonNegativeNumber);
  add_common(schedule, common, false);

  TreeArgs tree_args;
  auto* tree = app.add_subcommand("tree", "Describe a splitting tree");
  tree->add_option("--depth", tree_args.depth)->required()->check(CLI::NonNegativeNumber);
  auto* tree_sched = tree->add_option("--schedule", tree_args.schedule_path, "Schedule JSON file");
  auto* tree_gauge = tree->add_option("--gauge", tree_args.gauge_spec, "Build the schedule from this gauge");
  auto* tree_levels = tree->add_option("--levels", tree_args.levels, "odd, all or none");
  tree_sched->excludes(tree_gauge)->excludes(tree_levels);
  tree_gauge->excludes(tree_levels);
  tree->add_option("--selector", tree_args.selector, "seeded or constant")->capture_default_str();
  tree->add_option("--bit", tree_args.bit, "Bit for the constant selector")->check(CLI::Range(0, 1));
  add_common(tree, common, true);

  std::string tree_path;
  int delta_exp = 0;
  int measure_depth = -1;
  auto* measure = app.add_subcommand("measure", "Certified H^g_delta bounds for a tree");
  measure->add_option("--tree", tree_path, "Tree JSON file")->required();
  measure->add_option("--gauge", gauge_spec)->required();
  measure->add_option("--delta-exp", delta_exp, "Covers use cylinders of length >= K")->check(CLI::NonNegativeNumber);
  measure->add_option("--depth", measure_depth, "Truncation depth (default: the tree's)");
  add_common(measure, common, false);

  AntichainArgs anti;
  auto* antichain = app.add_subcommand("antichain", "Schedule, halving game and certificates in one run");
  antichain->add_option("--gauge", anti.gauge_spec)->required();
  antichain->add_option("--maps", anti.maps_path, "Map family JSON file")->required();
  antichain->add_option("--depth", anti.depth)->required()->check(CLI::NonNegativeNumber);
  antichain->add_option("--stages", anti.stages, "Stages per requirement")->required()->check(CLI::NonNegativeNumber);
  antichain->add_option("--roots", anti.roots, "Comma-separated requirement roots")->capture_default_str();
  antichain->add_option("--delta-exp", anti.delta_exp)->check(CLI::NonNegativeNumber);
  antichain->add_option("--samples", anti.samples, "Escape-check samples")->capture_default_str();
  add_common(antichain, common, true);

  auto* transfer = app.add_subcommand("transfer", "Cantor space to cube transfer checks");
  transfer->require_subcommand(1);
  std::size_t count = 10000;
  std::string a_text, b_text;
  auto* four = transfer->add_subcommand("four-cover", "Cover random intervals by four dyadic intervals");
  four->add_option("--count", count)->capture_default_str();
  four->add_option("--a", a_text, "Left endpoint of a single interval");
  four->add_option("--b", b_text, "Right endpoint of a single interval");
  add_common(four, common, true);
  std::vector<int> ns{2, 3, 4};
  int length = 60;
  auto* inter = transfer->add_subcommand("interleave-check", "Check the interleaving metric law on random pairs");
  inter->add_option("--count", count, "Pairs per n")->capture_default_str();
  inter->add_option("--n", ns, "Component counts")->delimiter(',')->capture_default_str();
  inter->add_option("--length", length)->capture_default_str();
  add_common(inter, common, true);
  std::string node_bits;
  int cube_n = 2;
  auto* cube = transfer->add_subcommand("cube-map", "Map a node to its cube corner");
  cube->add_option("--node", node_bits)->required();
  cube->add_option("--n", cube_n)->capture_default_str()->check(CLI::PositiveNumber);
  add_common(cube, common, false);

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "SVG line plot of CSV columns");
  plot->add_option("--csv", plot_args.csv_path)->required();
  plot->add_option("--x", plot_args.x)->required();
  plot->add_option("--y", plot_args.y, "One or more columns")->required()->delimiter(',');
  plot->add_option("--title", plot_args.title);
  plot->add_flag("--log-y", plot_args.log_y);
  plot->add_option("--out", common.out_path);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*schedule) return cmd_schedule(gauge_spec, depth, common, out, err);
    if (*tree) return cmd_tree(tree_args, common, out);
    if (*measure) return cmd_measure(tree_path, gauge_spec, delta_exp, measure_depth, common, out, err);
    if (*antichain) return cmd_antichain(anti, common, out, err);
    if (*four) return cmd_four_cover(count, a_text, b_text, common, out, err);
    if (*inter) return cmd_interleave_check(count, ns, length, common, out, err);
    if (*cube) return cmd_cube_map(node_bits, cube_n, common, out);
    if (*plot) return cmd_plot(plot_args, common, out);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << " (max feasible stages per requirement: " << e.max_feasible() << ")\n";
    return kExitInfeasible;
  } catch (const DepthExhausted& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ResourceExceeded& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "fatal: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hgauge::cli
