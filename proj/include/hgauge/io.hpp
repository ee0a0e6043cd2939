#ifndef HGAUGE_IO_HPP
#define HGAUGE_IO_HPP

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hgauge/game.hpp"
#include "hgauge/gauge.hpp"
#include "hgauge/hausdorff.hpp"
#include "hgauge/transfer.hpp"
#include "hgauge/tree.hpp"

// JSON and CSV forms of the library types. Every from_json throws
// InvalidArgument on malformed input; exact values travel as strings
// ("p/q" for rationals, "p/2^q" for dyadics, bit strings for nodes).
namespace hgauge {

using json = nlohmann::ordered_json;

// "power:1/2", "power_log:1,1", "table:0=1,4=0.5,8=0.25".
Gauge parse_gauge_spec(std::string_view spec);

json to_json(const Gauge& g);
Gauge gauge_from_json(const json& j);

json to_json(const BranchSchedule& a);
BranchSchedule schedule_from_json(const json& j);

json to_json(const BranchSelector& y);
BranchSelector selector_from_json(const json& j);

json to_json(const SplittingTree& tree);
SplittingTree tree_from_json(const json& j);

json to_json(const TreeMap& m);
TreeMap map_from_json(const json& j);
std::vector<TreeMap> map_family_from_json(const json& j);

json to_json(const MeasureCertificate& cert);
json to_json(const DimensionInterval& dim);
json to_json(const EscapeReport& report);
json to_json(const AntichainCertificate& cert, const EscapeReport* escape = nullptr);

json to_json(const DyadicInterval& interval);
json to_json(const CubePoint& point);
json to_json(const CoverTransferRule& rule);

// Column-named CSV tables.
void write_level_csv(std::ostream& out, const std::vector<LevelRow>& rows);
void write_schedule_csv(std::ostream& out, const BranchSchedule& a, const Gauge& g);
void write_stage_csv(std::ostream& out, const GameState& state);

// Reads a whole file; throws InvalidArgument when it cannot be opened.
std::string read_file(const std::string& path);
json read_json_file(const std::string& path);

}  // namespace hgauge

#endif  // HGAUGE_IO_HPP
