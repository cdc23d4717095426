#pragma once

#include <string>

#include "json.hpp"

#include "insulopt/eigen.hpp"
#include "insulopt/energy.hpp"
#include "insulopt/shape.hpp"
#include "insulopt/symmetry.hpp"

namespace insulopt {

/// Insertion-ordered JSON keeps artifacts deterministic and diff-friendly.
using Json = nlohmann::ordered_json;

/// Nearest double to v printed at the given significant digits; the identity
/// for NaN and infinities.
double round_sig(double v, int digits);

/// JSON value for a real: rounded to the digit budget, null when not finite.
Json json_real(double v, int digits = 12);
Json json_reals(const Eigen::VectorXd& values, int digits = 12);

/// ISO 8601 UTC, second resolution.
std::string timestamp_utc();

/// Wraps a result in the standard artifact envelope: version string,
/// timestamp, fully resolved config, result payload.
Json make_artifact(const std::string& command, Json config, Json result);

Json energy_report(const EnergySolution& solution, bool include_state = false);
Json eigen_report(const EigenSolution& solution, const SymmetryReport* symmetry = nullptr,
                  bool include_state = false);
Json threshold_report(const ThresholdResult& result);
Json symmetry_json(const SymmetryReport& report);
Json stationarity_json(const StationarityReport& report);

/// CSV emitters, 9 significant digits, one header row. Boundary-indexed data
/// follows loop order (counterclockwise in 2d).
std::string energy_csv(const EnergySolution& solution, const AssembledOperators& ops);
std::string eigen_csv(const EigenSolution& solution, const AssembledOperators& ops);
std::string threshold_csv(const ThresholdResult& result);
std::string curve_csv(const std::vector<CurvePoint>& curve);
std::string profile_csv(const BoundaryProfile& profile);

/// Writes content to a sibling temp file, then renames over path.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace insulopt
