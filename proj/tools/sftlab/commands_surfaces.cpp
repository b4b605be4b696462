#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "sft/conjecture.hpp"
#include "sft/determinant.hpp"
#include "sft/error.hpp"
#include "sft/fem.hpp"
#include "sft/io.hpp"
#include "sft/surface_mesh.hpp"
#include "sftlab/commands.hpp"
#include "sftlab/config.hpp"

namespace sftlab {

using nlohmann::json;
using sft::io::CsvTable;
using sft::io::num;
namespace surfaces = sft::surfaces;

namespace {

bool torus_mode(const json& c) { return c.at("surfaces").at("torus").at("enabled").get<bool>(); }

surfaces::SurfaceMesh mesh_for(const json& c) {
  const auto& s = c.at("surfaces");
  if (torus_mode(c))
    return surfaces::flat_torus(s.at("torus").at("length").get<double>(), s.at("torus").at("beta").get<double>(),
                                s.at("h").get<double>());
  const auto g = selected_graph(c);
  return surfaces::build_surface(g, edge_labels(c, g), surface_params(c));
}

double mass(const json& c) { return c.at("global").at("m").get<double>(); }

}  // namespace

json cmd_surface(const json& c, RunRecorder& rec) {
  const auto mesh = mesh_for(c);
  std::ostringstream os;
  surfaces::write_mesh(os, mesh);
  rec.write_text("surface.mesh", os.str());

  // Interior points are flat (2 pi); cone points carry 4 pi.
  double flat_dev = 0.0;
  const auto sums = mesh.angle_sums();
  std::vector<bool> cone(sums.size(), false);
  for (int v : mesh.cone_points) cone[static_cast<std::size_t>(v)] = true;
  for (std::size_t i = 0; i < sums.size(); ++i)
    flat_dev = std::max(flat_dev, std::abs(sums[i] - (cone[i] ? 4.0 : 2.0) * std::numbers::pi));
  const json summary{{"vertices", mesh.n_vertices()},
                     {"triangles", mesh.n_triangles()},
                     {"euler_characteristic", mesh.euler_characteristic()},
                     {"area", mesh.area()},
                     {"cone_points", mesh.cone_points.size()},
                     {"closed_and_oriented", mesh.closed_and_oriented()},
                     {"connected", mesh.connected()},
                     {"max_edge_length", mesh.max_edge_length()},
                     {"max_angle_defect_error", flat_dev},
                     {"metadata", mesh.metadata}};
  rec.write_json("surface.json", summary);
  return summary;
}

json cmd_spectrum(const json& c, RunRecorder& rec) {
  const auto mesh = mesh_for(c);
  const int count = c.at("surfaces").at("eigen_count").get<int>();
  const auto sp = surfaces::fem_spectrum(mesh, mass(c), count);
  const bool torus = torus_mode(c);
  std::vector<double> exact;
  if (torus) {
    const auto& t = c.at("surfaces").at("torus");
    exact = surfaces::torus_eigenvalues(t.at("length").get<double>(), t.at("beta").get<double>(), mass(c), count);
  }
  CsvTable table(torus ? std::vector<std::string>{"index", "eigenvalue", "exact"}
                       : std::vector<std::string>{"index", "eigenvalue"});
  for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), num(sp.eigenvalues[i])};
    if (torus) row.push_back(num(exact[i]));
    table.add(std::move(row));
  }
  rec.write_csv("spectrum.csv", table);
  return {{"count", sp.eigenvalues.size()}, {"max_residual", sp.max_residual}, {"lowest", sp.eigenvalues.front()}};
}

json cmd_detlap(const json& c, RunRecorder& rec) {
  const auto mesh = mesh_for(c);
  const auto r = surfaces::logdet_regularized(mesh, mass(c), det_spec(c));
  json out = r.report();
  out["mass"] = mass(c);
  out["area"] = mesh.area();
  if (torus_mode(c)) {
    const auto& t = c.at("surfaces").at("torus");
    const double L = t.at("length").get<double>(), beta = t.at("beta").get<double>();
    const double lattice = surfaces::torus_logdet_lattice(L, beta, mass(c));
    out["oracle_lattice"] = lattice;
    out["oracle_modesum"] = surfaces::torus_logdet_modesum(L, beta, mass(c));
    out["relative_error"] = std::abs(r.log_det - lattice) / std::abs(lattice);
  }
  rec.write_json("detlap.json", out);
  return out;
}

json cmd_conjecture(const json& c, RunRecorder& rec) {
  const auto g = selected_graph(c);
  const auto r = surfaces::conjecture_scan(g, edge_labels(c, g), scan_params(c));
  CsvTable table({"scan", "mass", "v", "activity", "left", "log_det", "right", "ratio"});
  auto add = [&](const char* scan, const surfaces::ScanRow& row) {
    table.add({scan, num(row.mass), num(row.v), num(row.activity), num(row.left), num(row.log_det), num(row.right),
               num(row.ratio)});
  };
  for (const auto& row : r.schedule) add("schedule", row);
  for (const auto& row : r.v_scan) add("v_scan", row);
  rec.write_csv("conjecture.csv", table);
  rec.write_json("conjecture.json", surfaces::to_json(r));
  return {{"rows", r.schedule.size() + r.v_scan.size()}, {"v_trend_increasing", r.v_trend_increasing}};
}

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table{
      {"fock-dump", cmd_fock_dump}, {"twopoint", cmd_twopoint}, {"fk-check", cmd_fk_check},
      {"vertex", cmd_vertex},       {"partition", cmd_partition}, {"cauchy", cmd_cauchy},
      {"graphs", cmd_graphs},       {"moment", cmd_moment},     {"activity", cmd_activity},
      {"surface", cmd_surface},     {"spectrum", cmd_spectrum}, {"detlap", cmd_detlap},
      {"conjecture", cmd_conjecture}};
  return table;
}

}  // namespace sftlab
