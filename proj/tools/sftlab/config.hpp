#pragma once
// Experiment configuration: a YAML tree overlaid on built-in defaults.
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sft/activity.hpp"
#include "sft/conjecture.hpp"
#include "sft/interaction.hpp"
#include "sft/measure.hpp"
#include "sft/ribbon_graph.hpp"

namespace sftlab {

using nlohmann::json;

json default_config();

/// Defaults, then the YAML file (skipped when path is empty), then each
/// "dotted.key=value" override. Unknown keys, type mismatches and parse
/// errors are all collected into one ConfigError.
json load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Every violated invariant of every module the config feeds.
std::vector<std::string> violations(const json& config);

/// SHA-256 of the canonical (key-sorted, compact) dump.
std::string config_hash(const json& config);

sft::measure::FieldParams field_params(const json& c);
sft::interaction::VertexParams vertex_params(const json& c);
std::vector<double> lambdas(const json& c);
std::vector<sft::interaction::CutoffLevel> cauchy_levels(const json& c);
sft::graphs::ActivityParams activity_params(const json& c);
sft::surfaces::SurfaceParams surface_params(const json& c);
sft::surfaces::DetSpec det_spec(const json& c);
sft::surfaces::ScanParams scan_params(const json& c);

/// Graph graphs.index among the classes with graphs.n split vertices.
sft::graphs::RibbonGraph selected_graph(const json& c);

/// graphs.labels when given, otherwise graphs.edge_time on every edge and
/// widths graphs.widths[slot] by the slot of the split-side leg.
std::vector<sft::graphs::EdgeLabel> edge_labels(const json& c, const sft::graphs::RibbonGraph& g);

}  // namespace sftlab
