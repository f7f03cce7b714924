#pragma once

#include <string>

#include <json.hpp>

#include "surfcell/cellproblem.hpp"
#include "surfcell/energy.hpp"
#include "surfcell/grid.hpp"
#include "surfcell/potential.hpp"
#include "surfcell/recovery.hpp"
#include "surfcell/sharp_interface.hpp"

namespace surfcell {

using json = nlohmann::json;

// JSON encodings. Decoders throw std::invalid_argument naming the missing or
// malformed field.
json to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(const json& j);

json to_json(const EnergyBreakdown& b);

json to_json(const Grid& g);
Grid grid_from_json(const json& j);

json to_json(const PhiPoint& p);
json to_json(const PhiCurve& c);
PhiCurve phi_curve_from_json(const json& j);

json to_json(const Laminate& lam);
Laminate laminate_from_json(const json& j);

json to_json(const SurfactantMeasure& mu);
SurfactantMeasure measure_from_json(const json& j);

json to_json(const CellSolution& sol);  // profile omitted (dumped separately)

json to_json(const LimsupReport& rep);
json to_json(const LiminfReport& rep);
json to_json(const AssumptionReport& rep);

// CSV artifacts (numbers printed with %.17g so reruns are byte-identical).
std::string phi_curve_csv(const PhiCurve& c);
std::string limsup_csv(const LimsupReport& rep);
std::string liminf_csv(const LiminfReport& rep);

// Grid dump: one node per line, x1..xN then the d components, x1 fastest.
std::string field_csv(const GridField& f);
std::string density_csv(const DensityField& f);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Helper for decoders: fetch j[key] or throw naming the field.
const json& require_field(const json& j, const char* key, const char* where);

std::string format_double(double v);

}  // namespace surfcell
