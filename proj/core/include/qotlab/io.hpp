#pragma once

#include <qotlab/class_audit.hpp>
#include <qotlab/constants.hpp>
#include <qotlab/harness.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace qot::io {

using Json = nlohmann::json;

/// Deterministic serialization: keys sorted, two-space indent, every number
/// printed in its shortest exact round-trip form. Non-finite numbers become the strings
/// "inf", "-inf" and "nan".
std::string dump(const Json& j);

/// Parses a JSON file; InvalidInput("config") when it cannot be read or parsed.
Json read_json_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Reads a non-finite-aware number written by dump().
double number(const Json& j, const std::string& field);

Json to_json(const DiscreteMeasure& m);
/// {"dim", "points", "weights"} plus an optional "ambient" {"lower", "upper"}.
DiscreteMeasure measure_from_json(const Json& j, const std::string& field = "measure");

Json to_json(const CostSpec& c);
/// {"kind", "lipschitz", optional "bound", "scale", and "matrix" for the
/// tabulated kind}.
CostSpec cost_from_json(const Json& j, const DiscreteMeasure& p, const DiscreteMeasure& q);

Json to_json(const Instance& inst);
/// {"p", "q", "cost", "eps"}; p and q may be file paths relative to base_dir.
Instance instance_from_json(const Json& j, const std::filesystem::path& base_dir = {});

Json to_json(const ClassParams& params);
ClassParams class_params_from_json(const Json& j);

Json to_json(const StabilityConstants& k);
StabilityConstants constants_from_json(const Json& j);
/// name,value,formula-id rows.
std::string constants_csv(const StabilityConstants& k);

Json to_json(const DeltaQuantities& d);
Json to_json(const AuditReport& r);
Json to_json(const StabilityReport& r);

/// Potentials, density (dense up to 1e6 cells, else {"i","j","zeta"} lists),
/// support cells, objective values and convergence metadata.
Json solution_json(const Instance& inst, const Potentials& pot, const Coupling& coup);

/// t,delta_star,linf_diff,ratio,hypothesis
std::string curve_csv(const std::vector<CurveRow>& rows);

/// Shortest decimal that parses back to the same double.
std::string format_number(double v);

}  // namespace qot::io
