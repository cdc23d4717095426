#include "insulopt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "insulopt/mesh.hpp"

namespace insulopt {

namespace {

std::string format_sig(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, v);
  return buffer;
}

/// Appends one CSV real at plot precision.
void put(std::ostringstream& out, double v) { out << format_sig(v, 9); }

Json mesh_summary_json(const MeshSummary& summary) {
  return Json{{"nodes", summary.nodes},
              {"elements", summary.elements},
              {"boundary_nodes", summary.boundary_nodes}};
}

}  // namespace

double round_sig(double v, int digits) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_sig(v, digits).c_str(), nullptr);
}

Json json_real(double v, int digits) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig(v, digits);
}

Json json_reals(const Eigen::VectorXd& values, int digits) {
  Json array = Json::array();
  for (Eigen::Index i = 0; i < values.size(); ++i) array.push_back(json_real(values[i], digits));
  return array;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

Json make_artifact(const std::string& command, Json config, Json result) {
  Json artifact;
  artifact["version"] = kVersionString;
  artifact["command"] = command;
  artifact["timestamp"] = timestamp_utc();
  artifact["config"] = std::move(config);
  artifact["result"] = std::move(result);
  return artifact;
}

Json energy_report(const EnergySolution& solution, bool include_state) {
  Json report;
  report["energy"] = json_real(solution.energy);
  report["mass"] = json_real(solution.mass);
  report["iterations"] = solution.iterations;
  report["fast_path"] = solution.fast_path;
  report["el_residual"] = json_real(solution.el_residual);
  report["descent_violations"] = solution.descent_violations;
  report["trace_stats"] = Json{{"min", json_real(solution.trace_stats.min)},
                               {"max", json_real(solution.trace_stats.max)},
                               {"mean", json_real(solution.trace_stats.mean)},
                               {"cv", json_real(solution.trace_stats.cv)}};
  report["h_defined"] = solution.h_defined;
  Json degenerate = Json::object();
  for (const auto& [marker, flag] : solution.degenerate_component)
    degenerate[std::to_string(marker)] = flag;
  report["degenerate_component"] = std::move(degenerate);
  report["h_opt"] = solution.h_defined ? json_reals(solution.h_opt.values) : Json::array();
  if (include_state) report["u"] = json_reals(solution.u.values);
  return report;
}

Json eigen_report(const EigenSolution& solution, const SymmetryReport* symmetry,
                  bool include_state) {
  Json report;
  report["lambda"] = json_real(solution.lambda);
  report["m"] = json_real(solution.mass);
  report["best_start"] = solution.best_start;
  report["zero_set_fraction"] = json_real(solution.zero_set_fraction);
  report["kkt_equality_dev"] = json_real(solution.kkt_equality_dev);
  report["kkt_inequality_slack"] = json_real(solution.kkt_inequality_slack);
  report["descent_violations"] = solution.descent_violations;
  Json starts = Json::array();
  for (const StartResult& s : solution.per_start)
    starts.push_back(Json{{"name", s.name},
                          {"lambda", json_real(s.lambda)},
                          {"cv", json_real(s.cv)},
                          {"fourier1_ratio", json_real(s.fourier1_ratio)},
                          {"zero_set_fraction", json_real(s.zero_set_fraction)},
                          {"iterations", s.iterations}});
  report["per_start"] = std::move(starts);
  if (symmetry) report["symmetry"] = symmetry_json(*symmetry);
  report["h_opt"] = json_reals(solution.h_opt.values);
  if (include_state) report["u"] = json_reals(solution.u.values);
  return report;
}

Json symmetry_json(const SymmetryReport& report) {
  return Json{{"cv", json_real(report.cv)},
              {"fourier1_ratio", json_real(report.fourier_ratio)},
              {"zero_fraction", json_real(report.zero_fraction)},
              {"classification", to_string(report.classification)}};
}

Json stationarity_json(const StationarityReport& report) {
  return Json{{"mean_j", json_real(report.mean_j)},
              {"spread", json_real(report.spread)},
              {"is_stationary", report.is_stationary}};
}

Json threshold_report(const ThresholdResult& result) {
  Json report;
  report["m0_oracle"] = json_real(result.m0_oracle);
  report["m0_fem"] = json_real(result.m0_fem);
  report["bracket_lo"] = json_real(result.bracket_lo);
  report["bracket_hi"] = json_real(result.bracket_hi);
  report["lambda_neumann"] = json_real(result.lambda_neumann);
  report["m0_crossing"] = json_real(result.m0_crossing);
  report["mesh_tolerance"] = json_real(result.mesh_tolerance);
  report["mesh"] = mesh_summary_json(result.mesh);
  report["refined_mesh"] = mesh_summary_json(result.refined_mesh);
  Json probes = Json::array();
  for (const ThresholdProbe& p : result.probes)
    probes.push_back(Json{{"m", json_real(p.m)},
                          {"lambda_best", json_real(p.lambda_best)},
                          {"lambda_radial_oracle", json_real(p.lambda_radial_oracle)},
                          {"cv", json_real(p.cv)},
                          {"classification", to_string(p.classification)},
                          {"refined", p.refined}});
  report["probes"] = std::move(probes);
  return report;
}

namespace {

/// Shared boundary-density CSV body: loop-ordered rows of the chosen
/// parameter column and the density.
std::string density_csv(const DensityField& h, const AssembledOperators& ops,
                        const char* param_name, bool use_angle) {
  std::ostringstream out;
  out << "marker," << param_name << ",h_opt\n";
  for (const BoundaryLoop& loop : boundary_loops(*ops.mesh)) {
    for (std::size_t i = 0; i < loop.node_ids.size(); ++i) {
      const int pos = ops.boundary_pos[loop.node_ids[i]];
      out << loop.marker << ',';
      const double param_1d = 0.0;
      if (use_angle)
        put(out, loop.angle.empty() ? param_1d : loop.angle[i]);
      else
        put(out, loop.arclength.empty() ? param_1d : loop.arclength[i]);
      out << ',';
      put(out, h.values[pos]);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string energy_csv(const EnergySolution& solution, const AssembledOperators& ops) {
  if (!solution.h_defined)
    throw PreconditionError("energy solution has no density to emit (vanishing trace)");
  return density_csv(solution.h_opt, ops, "arclength", false);
}

std::string eigen_csv(const EigenSolution& solution, const AssembledOperators& ops) {
  return density_csv(solution.h_opt, ops, "angle", true);
}

std::string threshold_csv(const ThresholdResult& result) {
  std::ostringstream out;
  out << "m,lambda_best,lambda_radial_oracle,cv,classification,refined\n";
  std::vector<const ThresholdProbe*> rows;
  for (const ThresholdProbe& p : result.probes) rows.push_back(&p);
  std::sort(rows.begin(), rows.end(), [](const ThresholdProbe* a, const ThresholdProbe* b) {
    return a->m != b->m ? a->m < b->m : a->refined < b->refined;
  });
  for (const ThresholdProbe* p : rows) {
    put(out, p->m);
    out << ',';
    put(out, p->lambda_best);
    out << ',';
    put(out, p->lambda_radial_oracle);
    out << ',';
    put(out, p->cv);
    out << ',' << to_string(p->classification) << ',' << (p->refined ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "m,lambda_best,lambda_radial_oracle,cv,classification\n";
  for (const CurvePoint& p : curve) {
    put(out, p.m);
    out << ',';
    put(out, p.lambda_best);
    out << ',';
    put(out, p.lambda_radial_oracle);
    out << ',';
    put(out, p.cv);
    out << ',' << to_string(p.classification) << '\n';
  }
  return out.str();
}

std::string profile_csv(const BoundaryProfile& profile) {
  std::ostringstream out;
  out << "marker,angle,arclength,u,du_dnu,du_dtau,j\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << profile.loop_marker[i] << ',';
    put(out, profile.angle[i]);
    out << ',';
    put(out, profile.arclength[i]);
    out << ',';
    put(out, profile.u[i]);
    out << ',';
    put(out, profile.du_nu[i]);
    out << ',';
    put(out, profile.du_tau[i]);
    out << ',';
    put(out, profile.j[i]);
    out << '\n';
  }
  return out.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidSpecError("cannot open output file: " + temp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidSpecError("failed writing output file: " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw InvalidSpecError("cannot move output into place: " + path);
  }
}

}  // namespace insulopt
