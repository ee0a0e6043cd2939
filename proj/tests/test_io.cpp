#include <gtest/gtest.h>

#include <sstream>

#include "hgauge/error.hpp"
#include "hgauge/io.hpp"
#include "hgauge/plot.hpp"

using namespace hgauge;

TEST(GaugeSpec, Parses) {
  Gauge g = parse_gauge_spec("power_log:1,1");
  ASSERT_TRUE(std::holds_alternative<Gauge::PowerLog>(g.kind()));
  EXPECT_EQ(std::get<Gauge::PowerLog>(g.kind()).c, Rational(1));
  EXPECT_EQ(std::get<Gauge::Power>(parse_gauge_spec("power:1/2").kind()).s, Rational(1, 2));
  EXPECT_EQ(std::get<Gauge::Power>(parse_gauge_spec("power:0.75").kind()).s, Rational(3, 4));
  Gauge t = parse_gauge_spec("table:0=1,4=0.5,8=0.25");
  EXPECT_EQ(std::get<Gauge::Table>(t.kind()).entries.size(), 3u);
  for (const char* bad : {"power", "power:", "power:1,2", "power_log:1", "cubic:1", "table:1", "table:a=1", "power:-1"}) {
    EXPECT_THROW(parse_gauge_spec(bad), InvalidArgument) << bad;
  }
}

TEST(Json, GaugeRoundTrip) {
  std::vector<Gauge> gauges = {Gauge::power(Rational(1, 2)), Gauge::power_log(Rational(1), Rational(1)),
                               Gauge::table({{1, 0.5}, {3, 0.125}}),
                               Gauge::conjugate(Gauge::power_log(Rational(1), Rational(1)), 2)};
  for (const Gauge& g : gauges) {
    json j = to_json(g);
    EXPECT_EQ(to_json(gauge_from_json(j)), j);
    for (int n = 1; n <= 3; ++n) EXPECT_EQ(gauge_from_json(j).log2_value(n), g.log2_value(n));
  }
  EXPECT_EQ(to_json(Gauge::power(Rational(1, 2))).dump(), R"({"kind":"power","s":"1/2"})");
  EXPECT_EQ(to_json(Gauge::power_log(Rational(1), Rational(1))).dump(), R"({"kind":"power_log","s":"1","c":"1"})");
  EXPECT_THROW(gauge_from_json(json::parse(R"({"kind":"power"})")), InvalidArgument);
  EXPECT_THROW(gauge_from_json(json::parse(R"({"kind":"power","s":"x"})")), InvalidArgument);
}

TEST(Json, ScheduleAndTreeRoundTrip) {
  BranchSchedule a = sparsity_schedule(Gauge::power_log(Rational(1), Rational(1)), 32);
  json ja = to_json(a);
  EXPECT_EQ(ja["indices"], json::parse("[1,3,7,15,31]"));
  EXPECT_EQ(to_json(schedule_from_json(ja)), ja);

  std::vector<BranchSelector> selectors = {
      BranchSelector::constant(1), BranchSelector::seeded(42),
      BranchSelector::explicit_map({{Node("01"), 1}, {Node(""), 0}}, 1),
      BranchSelector::game_built({SelectorLayer{3, Node("0"), 1}, SelectorLayer{7, Node("1"), 0}})};
  for (const BranchSelector& y : selectors) {
    SplittingTree tree(a, y, 20);
    json j = to_json(tree);
    SplittingTree back = tree_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(materialize(back, 12).leaves(), materialize(tree, 12).leaves());
  }
  EXPECT_EQ(to_json(BranchSelector::seeded(42)).dump(), R"({"kind":"seeded","seed":42})");
  EXPECT_THROW(schedule_from_json(json::parse(R"({"depth":4,"indices":[3,1]})")), InvalidArgument);
}

TEST(Json, MapFamilyRoundTrip) {
  json family = json::parse(R"([
    {"kind":"bit_flip"}, {"kind":"shift"}, {"kind":"identity"},
    {"kind":"transducer","states":2,"start":0,"delta":[[[1,""],[1,""]],[[1,"0"],[1,"1"]]]},
    {"kind":"explicit","entries":[["0","1"],["01","10"]]}
  ])");
  auto maps = map_family_from_json(family);
  ASSERT_EQ(maps.size(), 5u);
  for (std::size_t i = 0; i < maps.size(); ++i) EXPECT_EQ(to_json(maps[i]), family[i]);
  EXPECT_EQ(apply_map(maps[3], Node("0110")), Node("110"));
  EXPECT_THROW(map_family_from_json(json::parse(R"([{"kind":"rotate"}])")), InvalidArgument);
  EXPECT_THROW(map_family_from_json(json::parse(R"({"kind":"shift"})")), InvalidArgument);
}

TEST(Json, CertificateShapes) {
  SplittingTree odds(BranchSchedule::odd_levels(12), BranchSelector::seeded(1), 12);
  json m = to_json(measure_certificate(odds, Gauge::power(Rational(1, 2)), 2, 12));
  EXPECT_EQ(m["lower"]["provenance"], "frostman");
  EXPECT_EQ(m["upper"]["provenance"], "optimal_cover");
  EXPECT_EQ(m["delta_exp"], 2);
  EXPECT_TRUE(m["witness"].is_array());

  GameResult res = run_game(BranchSchedule::odd_levels(16), {TreeMap::bit_flip()}, {Node("0")}, 16, 2);
  json c = to_json(res.certificate);
  ASSERT_EQ(c["requirements"].size(), 1u);
  EXPECT_EQ(c["requirements"][0]["root"], "0");
  EXPECT_EQ(c["requirements"][0]["initial"], "1/2^1");
  EXPECT_EQ(c["requirements"][0]["final_bound"], "1/2^3");
  EXPECT_EQ(c["layers"].size(), 2u);

  EXPECT_EQ(to_json(to_cube(Node("011001"), 2)).dump(), R"({"coords":["1/2^2","5/2^3"],"precision":3})");
  EXPECT_EQ(to_json(expand(Node("01"))).dump(), R"({"m":2,"p":"1"})");
}

TEST(Csv, Columns) {
  SplittingTree odds(BranchSchedule::odd_levels(4), BranchSelector::seeded(1), 4);
  std::ostringstream level;
  write_level_csv(level, level_table(odds, Gauge::power(Rational(1, 2)), 4));
  EXPECT_EQ(level.str().substr(0, level.str().find('\n')), "n,count,mu_cylinder,gauge_value,level_cost");
  CsvTable t = parse_csv(level.str());
  EXPECT_EQ(t.rows.size(), 5u);
  EXPECT_EQ(cell_value(t.rows[2][t.column("mu_cylinder")]), 0.5);

  std::ostringstream sched;
  write_schedule_csv(sched, BranchSchedule::odd_levels(4), Gauge::power(Rational(1, 2)));
  EXPECT_EQ(sched.str(), "n,c_n,in_A\n0,0,0\n1,0,1\n2,1,0\n3,1,1\n");

  GameResult res = run_game(BranchSchedule::odd_levels(16), {TreeMap::bit_flip()}, {Node("0")}, 16, 1);
  std::ostringstream stages;
  write_stage_csv(stages, res.state);
  EXPECT_EQ(stages.str(), "stage,map,root,level,chosen_bit,bound\n1,0,0,1,0,1/2^2\n");
}

TEST(Plot, CsvParsing) {
  CsvTable t = parse_csv("# manifest {}\nx,y\n1,2\n3,4\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_THROW(t.column("z"), InvalidArgument);
  EXPECT_THROW(parse_csv(""), InvalidArgument);
  EXPECT_THROW(parse_csv("x,y\n1\n"), InvalidArgument);
  EXPECT_THROW(cell_value("abc"), InvalidArgument);
}

TEST(Plot, SvgIsDeterministicWithLegend) {
  std::vector<Series> s = {{"cost", {{0, 1}, {1, 2}, {2, 1}}}, {"bound", {{0, 0.5}, {2, 0.25}}}};
  std::string a = render_svg(s, {"title & more", "n", "", false}, "{\"k\":1}");
  EXPECT_EQ(a, render_svg(s, {"title & more", "n", "", false}, "{\"k\":1}"));
  EXPECT_NE(a.find("version=\"1.1\""), std::string::npos);
  EXPECT_NE(a.find("title &amp; more"), std::string::npos);
  EXPECT_NE(a.find(">cost</text>"), std::string::npos);
  EXPECT_NE(a.find(">bound</text>"), std::string::npos);
  EXPECT_EQ(a.find("href"), std::string::npos);
  std::string log = render_svg(s, {"", "n", "", true}, "");
  EXPECT_NE(log.find("1e"), std::string::npos);
}
