#include "sft/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sft/error.hpp"
#include "sft/fem.hpp"

namespace sft::surfaces {

ScanResult conjecture_scan(const graphs::RibbonGraph& g, const std::vector<graphs::EdgeLabel>& labels,
                           const ScanParams& params) {
  if (params.masses.empty() || params.masses.size() != params.vs.size())
    throw ConfigError({"scan needs equally long, nonempty mass and v schedules"});
  if (!std::is_sorted(params.masses.rbegin(), params.masses.rend()) || !std::is_sorted(params.vs.rbegin(), params.vs.rend()))
    throw ConfigError({"scan schedules must be decreasing"});
  const auto widths = constrained_widths(g, labels);
  std::vector<graphs::EdgeLabel> fixed = labels;
  for (std::size_t e = 0; e < fixed.size(); ++e) fixed[e].length = widths[e];
  const auto mesh = build_surface(g, fixed, params.surface);
  const auto fem = assemble(mesh);
  const double lo = *std::min_element(widths.begin(), widths.end());
  const double hi = *std::max_element(widths.begin(), widths.end());

  std::map<double, DetResult> dets;
  auto row = [&](double m, double v) {
    auto ap = params.activity;
    ap.d = params.d;
    ap.mass = m;
    ap.cutoff = params.cutoff_ratio * m;
    ap.v = v;
    ap.min_length = std::min(ap.min_length, lo);
    ap.max_length = std::max(ap.max_length, hi);
    ScanRow r;
    r.mass = m;
    r.v = v;
    r.activity = graphs::activity_f(g, fixed, ap).value;
    r.left = v * std::pow(m, params.d) * r.activity;
    auto it = dets.find(m);
    if (it == dets.end()) {
      const auto spectrum = fem_spectrum(fem, m, params.det.count);
      it = dets.emplace(m, logdet_from_spectrum(spectrum.eigenvalues, mesh.area(), m, params.det)).first;
    }
    const auto& det = it->second;
    r.log_det = det.log_det;
    r.right = std::exp(-0.5 * params.d * det.log_det);
    r.ratio = r.left / r.right;
    r.det_report = det.report();
    return r;
  };

  ScanResult out;
  for (std::size_t j = 0; j < params.masses.size(); ++j) out.schedule.push_back(row(params.masses[j], params.vs[j]));
  for (double v : params.vs) out.v_scan.push_back(row(params.masses.front(), v));
  out.v_trend_increasing = true;
  for (std::size_t j = 0; j + 1 < out.v_scan.size(); ++j)
    out.v_trend_increasing = out.v_trend_increasing && out.v_scan[j + 1].activity > out.v_scan[j].activity;
  return out;
}

nlohmann::json to_json(const ScanRow& r) {
  return {{"m", r.mass}, {"v", r.v}, {"f", r.activity}, {"left", r.left}, {"log_det", r.log_det},
          {"right", r.right}, {"ratio", r.ratio}, {"det", r.det_report}};
}

nlohmann::json to_json(const ScanResult& r) {
  nlohmann::json s = nlohmann::json::array(), v = nlohmann::json::array();
  for (const auto& x : r.schedule) s.push_back(to_json(x));
  for (const auto& x : r.v_scan) v.push_back(to_json(x));
  return {{"schedule", s}, {"v_scan", v}, {"v_trend_increasing", r.v_trend_increasing}};
}

}  // namespace sft::surfaces
