#pragma once

// Evidence tables comparing v m^d f_Gamma with det(-Laplace + m^2)^{-d/2} on
// the glued surface of the same labeled graph. Nothing here asserts the
// comparison; the harness only produces the columns.

#include <vector>

#include <nlohmann/json.hpp>

#include "sft/activity.hpp"
#include "sft/determinant.hpp"
#include "sft/surface_mesh.hpp"

namespace sft::surfaces {

struct ScanParams {
  int d = 1;
  std::vector<double> masses = {1.0, 0.8, 0.6};  // decreasing
  std::vector<double> vs = {0.2, 0.1, 0.05};     // decreasing
  double cutoff_ratio = 2.5;                     // Fock cutoff M = ratio * m
  graphs::ActivityParams activity;               // mass, cutoff and v are overwritten per row
  SurfaceParams surface;
  DetSpec det;
};

struct ScanRow {
  double mass = 0.0;
  double v = 0.0;
  double activity = 0.0;  // f_Gamma
  double left = 0.0;      // v m^d f_Gamma
  double log_det = 0.0;
  double right = 0.0;     // det^{-d/2}
  double ratio = 0.0;     // left / right
  nlohmann::json det_report;
};

struct ScanResult {
  std::vector<ScanRow> schedule;  // paired (m_j, v_j)
  std::vector<ScanRow> v_scan;    // first mass, every v
  bool v_trend_increasing = false;  // f_Gamma grows as v decreases along v_scan
};

/// Graph must be connected; widths are projected onto the vertex constraints
/// and the same widths feed the activity and the surface.
ScanResult conjecture_scan(const graphs::RibbonGraph& g, const std::vector<graphs::EdgeLabel>& labels,
                           const ScanParams& params);

nlohmann::json to_json(const ScanRow& r);
nlohmann::json to_json(const ScanResult& r);

}  // namespace sft::surfaces
