#include "sftlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "sft/error.hpp"
#include "sft/fock.hpp"
#include "sft/io.hpp"
#include "sftlab/manifest.hpp"

namespace sftlab {

using sft::io::num;

json default_config() {
  return json::parse(R"({
    "global": {"d": 1, "m": 1.0, "L0": 1.0, "Linf": 2.4, "seed": 1},
    "fock": {"M": 2.5, "heat_times": [0.25, 0.5, 1.0, 2.0], "max_states": 200000},
    "measure": {
      "kappa": 4.0, "t_half": 0.5, "dt": 0.25, "n_cells": 35, "n_samples": 1000,
      "twopoint": {"state": 1, "state2": 1, "it": 0, "it2": 1},
      "fk": {"n_space": 16, "n_time": 512, "time_step": 0.05, "n_samples": 4000,
             "t": 0.0, "t2": 0.0, "constant": 1.0, "cos": [], "sin": []}
    },
    "vertex": {
      "epsilon": 0.5, "T": 0.5, "v": 0.2, "t_stride": 1, "l_stride": 1,
      "lambdas": [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
      "cauchy": [{"M": 2.5, "kappa": 1.0}, {"M": 3.5, "kappa": 2.0}, {"M": 4.5, "kappa": 4.0}]
    },
    "graphs": {
      "n": 1, "n_max": 2, "index": 4, "order": 2, "quad_points": 32, "vacuum_only": false,
      "edge_time": 0.4, "widths": [2.2, 1.1, 1.1], "labels": [], "mc_samples": 0
    },
    "surfaces": {
      "h": 0.1, "eigen_count": 250, "min_ring": 3,
      "det": {"split": 0.1, "fit_min": 0.03, "fit_max": 0.12, "fit_points": 24, "tail_tol": 1e-7},
      "torus": {"enabled": false, "length": 2.0, "beta": 2.0},
      "masses": [1.0, 0.8, 0.6], "vs": [0.2, 0.1, 0.05], "cutoff_ratio": 2.5
    },
    "output": {"dir": "out"}
  })");
}

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

json scalar_guess(const YAML::Node& n) {
  if (n.Tag() == "!") return n.Scalar();  // quoted
  long long i;
  double x;
  bool b;
  if (YAML::convert<long long>::decode(n, i)) return i;
  if (YAML::convert<double>::decode(n, x)) return x;
  if (YAML::convert<bool>::decode(n, b)) return b;
  return n.Scalar();
}

json generic(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(generic(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = generic(kv.second);
      return o;
    }
    case YAML::NodeType::Scalar:
      return scalar_guess(n);
    default:
      return nullptr;
  }
}

// Overlays n onto target, whose current value fixes the expected type.
void overlay(json& target, const YAML::Node& n, const std::string& path, std::vector<std::string>& errors) {
  if (target.is_object()) {
    if (n.IsNull()) return;
    if (!n.IsMap()) {
      errors.push_back(path + " must be a mapping" + where(n));
      return;
    }
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      const auto sub = path.empty() ? key : path + "." + key;
      if (!target.contains(key)) {
        errors.push_back("unknown key '" + sub + "'" + where(kv.first));
        continue;
      }
      overlay(target[key], kv.second, sub, errors);
    }
    return;
  }
  if (target.is_array()) {
    if (!n.IsSequence()) {
      errors.push_back(path + " must be a list" + where(n));
      return;
    }
    target = generic(n);
    return;
  }
  if (!n.IsScalar()) {
    errors.push_back(path + " must be a scalar" + where(n));
    return;
  }
  bool ok = true;
  if (target.is_boolean()) {
    bool b;
    ok = YAML::convert<bool>::decode(n, b);
    if (ok) target = b;
  } else if (target.is_number_integer()) {
    long long i;
    ok = YAML::convert<long long>::decode(n, i);
    if (ok) target = i;
  } else if (target.is_number()) {
    double x;
    ok = YAML::convert<double>::decode(n, x);
    if (ok) target = x;
  } else {
    target = n.Scalar();
  }
  if (!ok) errors.push_back(path + ": cannot read '" + n.Scalar() + "' as " + target.type_name() + where(n));
}

void apply_override(json& root, const std::string& item, std::vector<std::string>& errors) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) {
    errors.push_back("override '" + item + "' is not key=value");
    return;
  }
  const auto key = item.substr(0, eq);
  json* node = &root;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      errors.push_back("unknown key '" + key + "' in --set");
      return;
    }
    node = &(*node)[part];
  }
  try {
    overlay(*node, YAML::Load(item.substr(eq + 1)), key, errors);
  } catch (const YAML::Exception& e) {
    errors.push_back("--set " + key + ": " + e.msg);
  }
}

template <class T>
T get(const json& c, const char* a, const char* b) {
  return c.at(a).at(b).get<T>();
}

}  // namespace

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json root = default_config();
  std::vector<std::string> errors;
  if (!path.empty()) {
    YAML::Node doc;
    try {
      doc = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
      throw sft::ConfigError({"cannot read config file " + path});
    } catch (const YAML::ParserException& e) {
      throw sft::ConfigError({"parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                              std::to_string(e.mark.column + 1) + ": " + e.msg});
    }
    overlay(root, doc, "", errors);
  }
  for (const auto& o : overrides) apply_override(root, o, errors);
  if (!errors.empty()) throw sft::ConfigError(std::move(errors));
  return root;
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

sft::measure::FieldParams field_params(const json& c) {
  sft::measure::FieldParams p;
  p.d = get<int>(c, "global", "d");
  p.mass = get<double>(c, "global", "m");
  p.min_length = get<double>(c, "global", "L0");
  p.max_length = get<double>(c, "global", "Linf");
  p.seed = get<std::uint64_t>(c, "global", "seed");
  p.cutoff = get<double>(c, "fock", "M");
  p.kappa = get<double>(c, "measure", "kappa");
  p.t_half = get<double>(c, "measure", "t_half");
  p.dt = get<double>(c, "measure", "dt");
  p.n_cells = get<int>(c, "measure", "n_cells");
  return p;
}

sft::interaction::VertexParams vertex_params(const json& c) {
  sft::interaction::VertexParams p;
  p.epsilon = get<double>(c, "vertex", "epsilon");
  p.t_window = get<double>(c, "vertex", "T");
  p.v = get<double>(c, "vertex", "v");
  p.t_stride = get<int>(c, "vertex", "t_stride");
  p.l_stride = get<int>(c, "vertex", "l_stride");
  return p;
}

std::vector<double> lambdas(const json& c) { return get<std::vector<double>>(c, "vertex", "lambdas"); }

std::vector<sft::interaction::CutoffLevel> cauchy_levels(const json& c) {
  std::vector<sft::interaction::CutoffLevel> out;
  for (const auto& l : c.at("vertex").at("cauchy")) out.push_back({l.at("M").get<double>(), l.at("kappa").get<double>()});
  return out;
}

sft::graphs::ActivityParams activity_params(const json& c) {
  const auto f = field_params(c);
  sft::graphs::ActivityParams p;
  p.d = f.d;
  p.mass = f.mass;
  p.min_length = f.min_length;
  p.max_length = f.max_length;
  p.cutoff = f.cutoff;
  p.kappa = f.kappa;
  p.v = get<double>(c, "vertex", "v");
  p.epsilon = get<double>(c, "vertex", "epsilon");
  p.quad_points = get<int>(c, "graphs", "quad_points");
  p.vacuum_only = get<bool>(c, "graphs", "vacuum_only");
  return p;
}

sft::surfaces::SurfaceParams surface_params(const json& c) {
  sft::surfaces::SurfaceParams p;
  p.epsilon = get<double>(c, "vertex", "epsilon");
  p.h = get<double>(c, "surfaces", "h");
  p.min_ring = get<int>(c, "surfaces", "min_ring");
  return p;
}

sft::surfaces::DetSpec det_spec(const json& c) {
  const auto& d = c.at("surfaces").at("det");
  sft::surfaces::DetSpec s;
  s.count = get<int>(c, "surfaces", "eigen_count");
  s.split = d.at("split").get<double>();
  s.fit_min = d.at("fit_min").get<double>();
  s.fit_max = d.at("fit_max").get<double>();
  s.fit_points = d.at("fit_points").get<int>();
  s.tail_tol = d.at("tail_tol").get<double>();
  return s;
}

sft::surfaces::ScanParams scan_params(const json& c) {
  sft::surfaces::ScanParams p;
  p.d = get<int>(c, "global", "d");
  p.masses = get<std::vector<double>>(c, "surfaces", "masses");
  p.vs = get<std::vector<double>>(c, "surfaces", "vs");
  p.cutoff_ratio = get<double>(c, "surfaces", "cutoff_ratio");
  p.activity = activity_params(c);
  p.surface = surface_params(c);
  p.det = det_spec(c);
  return p;
}

sft::graphs::RibbonGraph selected_graph(const json& c) {
  const auto all = sft::graphs::enumerate_graphs(get<int>(c, "graphs", "n"), get<int>(c, "graphs", "n_max"));
  const auto i = get<std::size_t>(c, "graphs", "index");
  if (i >= all.size())
    throw sft::ConfigError({"graphs.index " + std::to_string(i) + " out of range: " + std::to_string(all.size()) +
                            " classes"});
  return all[i];
}

std::vector<sft::graphs::EdgeLabel> edge_labels(const json& c, const sft::graphs::RibbonGraph& g) {
  std::vector<sft::graphs::EdgeLabel> out;
  const auto& given = c.at("graphs").at("labels");
  if (!given.empty()) {
    if (given.size() != static_cast<std::size_t>(g.n_edges()))
      throw sft::ConfigError({"graphs.labels has " + std::to_string(given.size()) + " entries, graph has " +
                              std::to_string(g.n_edges()) + " edges"});
    for (const auto& l : given) out.push_back({l.at("t").get<double>(), l.at("l").get<double>()});
    return out;
  }
  const auto widths = get<std::vector<double>>(c, "graphs", "widths");
  const auto t = get<double>(c, "graphs", "edge_time");
  for (const auto& e : g.edges()) {
    const int slot = g.kind(e.conj.vertex) == sft::graphs::VertexKind::split ? e.conj.slot : e.plain.slot;
    out.push_back({t, widths.at(static_cast<std::size_t>(slot))});
  }
  return out;
}

namespace {

void check_levels(const json& c, const sft::measure::FieldParams& f, std::vector<std::string>& v) {
  const auto levels = cauchy_levels(c);
  if (levels.size() < 2) v.push_back("vertex.cauchy needs at least two levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const auto at = "vertex.cauchy[" + std::to_string(i) + "]";
    if (!(l.kappa > 0.0)) v.push_back(at + ": kappa must be > 0");
    else if (f.n_cells > 0 && !(f.dl() < 1.0 / (4.0 * l.kappa)))
      v.push_back(at + ": length step dl = " + num(f.dl()) + " must be < 1/(4 kappa) = " + num(1.0 / (4.0 * l.kappa)));
    if (i > 0 && (l.cutoff < levels[i - 1].cutoff || l.kappa < levels[i - 1].kappa))
      v.push_back(at + ": levels must be nondecreasing in M and kappa");
    if (!(l.cutoff >= 0.0)) v.push_back(at + ": M must be >= 0");
  }
}

void check_decreasing(const std::vector<double>& xs, const std::string& name, double lo, double hi,
                      const std::string& range, std::vector<std::string>& v) {
  if (xs.empty()) v.push_back(name + " must not be empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > lo && xs[i] < hi)) v.push_back(name + " entries must lie in " + range + ", got " + num(xs[i]));
    if (i > 0 && !(xs[i] < xs[i - 1])) v.push_back(name + " must be strictly decreasing");
  }
}

void check_all(const json& c, std::vector<std::string>& v) {
  const auto f = field_params(c);
  for (auto& s : sft::measure::violations(f)) v.push_back(std::move(s));
  for (auto& s : sft::interaction::violations(vertex_params(c), f)) v.push_back(std::move(s));

  for (double t : get<std::vector<double>>(c, "fock", "heat_times"))
    if (!(t > 0.0)) v.push_back("fock.heat_times entries must be > 0");
  if (get<long long>(c, "fock", "max_states") < 1) v.push_back("fock.max_states must be >= 1");

  const auto n_samples = get<long long>(c, "measure", "n_samples");
  if (n_samples < static_cast<long long>(sft::measure::kMinBatches))
    v.push_back("measure.n_samples must be >= " + std::to_string(sft::measure::kMinBatches));
  const auto& tp = c.at("measure").at("twopoint");
  if (f.dt > 0.0 && f.t_half > 0.0) {
    const int nt = f.n_times();
    for (const char* k : {"it", "it2"}) {
      const int it = tp.at(k).get<int>();
      if (it < 0 || it >= nt)
        v.push_back(std::string("measure.twopoint.") + k + " must lie in [0, " + std::to_string(nt) + ")");
    }
  }
  if (f.mass > 0.0 && f.min_length > 0.0 && f.cutoff >= 0.0) {
    try {
      const auto basis = sft::fock::enumerate_basis({f.d, f.mass, f.min_length, f.cutoff},
                                                    get<std::size_t>(c, "fock", "max_states"));
      for (const char* k : {"state", "state2"})
        if (tp.at(k).get<std::size_t>() >= basis.size())
          v.push_back(std::string("measure.twopoint.") + k + " must be < basis size " + std::to_string(basis.size()));
    } catch (const sft::Error& e) {
      v.push_back(std::string("fock basis: ") + e.what());
    }
  }
  const auto& fk = c.at("measure").at("fk");
  if (fk.at("n_space").get<int>() < 2 || fk.at("n_time").get<int>() < 2) v.push_back("measure.fk lattice needs >= 2 sites per side");
  if (!(fk.at("time_step").get<double>() > 0.0)) v.push_back("measure.fk.time_step must be > 0");
  if (fk.at("n_samples").get<long long>() < static_cast<long long>(sft::measure::kMinBatches))
    v.push_back("measure.fk.n_samples must be >= " + std::to_string(sft::measure::kMinBatches));
  (void)fk.at("cos").get<std::vector<double>>();
  (void)fk.at("sin").get<std::vector<double>>();

  (void)lambdas(c);
  check_levels(c, f, v);

  const int n = get<int>(c, "graphs", "n"), n_max = get<int>(c, "graphs", "n_max");
  if (n_max < 1) v.push_back("graphs.n_max must be >= 1");
  if (n < 1 || n > n_max) v.push_back("graphs.n must lie in [1, graphs.n_max]");
  const int order = get<int>(c, "graphs", "order");
  if (order < 0 || order > 2 * n_max) v.push_back("graphs.order must lie in [0, 2 graphs.n_max]");
  if (get<int>(c, "graphs", "index") < 0) v.push_back("graphs.index must be >= 0");
  static const std::set<int> rules{16, 24, 32, 48, 64};
  if (!rules.count(get<int>(c, "graphs", "quad_points"))) v.push_back("graphs.quad_points must be one of 16, 24, 32, 48, 64");
  const auto widths = get<std::vector<double>>(c, "graphs", "widths");
  if (widths.size() != 3) v.push_back("graphs.widths needs one width per slot (3 entries)");
  for (double w : widths)
    if (!(w > 0.0)) v.push_back("graphs.widths entries must be > 0");
  if (!(get<double>(c, "graphs", "edge_time") >= 0.0)) v.push_back("graphs.edge_time must be >= 0");
  for (const auto& l : c.at("graphs").at("labels"))
    if (!(l.at("l").get<double>() > 0.0) || !std::isfinite(l.at("t").get<double>()))
      v.push_back("graphs.labels entries need finite t and l > 0");
  if (get<long long>(c, "graphs", "mc_samples") < 0) v.push_back("graphs.mc_samples must be >= 0");

  const auto& s = c.at("surfaces");
  if (!(s.at("h").get<double>() > 0.0)) v.push_back("surfaces.h must be > 0");
  const int count = s.at("eigen_count").get<int>();
  if (count < 1 || count > 2000) v.push_back("surfaces.eigen_count must lie in [1, 2000]");
  if (s.at("min_ring").get<int>() < 3) v.push_back("surfaces.min_ring must be >= 3");
  const auto d = det_spec(c);
  if (!(d.fit_min > 0.0 && d.fit_min < d.fit_max)) v.push_back("surfaces.det needs 0 < fit_min < fit_max");
  if (!(d.split > 0.0)) v.push_back("surfaces.det.split must be > 0");
  if (d.fit_points < 4) v.push_back("surfaces.det.fit_points must be >= 4");
  if (!(d.tail_tol > 0.0)) v.push_back("surfaces.det.tail_tol must be > 0");
  const auto& torus = s.at("torus");
  if (!(torus.at("length").get<double>() > 0.0 && torus.at("beta").get<double>() > 0.0))
    v.push_back("surfaces.torus sides must be > 0");
  (void)torus.at("enabled").get<bool>();
  check_decreasing(get<std::vector<double>>(c, "surfaces", "masses"), "surfaces.masses", 0.0,
                   std::numeric_limits<double>::infinity(), "(0, inf)", v);
  check_decreasing(get<std::vector<double>>(c, "surfaces", "vs"), "surfaces.vs", 0.0, f.min_length / 4.0,
                   "v ∈ (0, L0/4)", v);
  if (!(get<double>(c, "surfaces", "cutoff_ratio") > 0.0)) v.push_back("surfaces.cutoff_ratio must be > 0");
  if (get<std::string>(c, "output", "dir").empty()) v.push_back("output.dir must not be empty");
}

}  // namespace

std::vector<std::string> violations(const json& config) {
  std::vector<std::string> v;
  try {
    check_all(config, v);
  } catch (const json::exception& e) {
    v.push_back(std::string("malformed value: ") + e.what());
  }
  return v;
}

}  // namespace sftlab
