#include <cmath>
#include <vector>

#include "sft/activity.hpp"
#include "sft/error.hpp"
#include "sft/interaction.hpp"
#include "sft/io.hpp"
#include "sft/ribbon_graph.hpp"
#include "sftlab/commands.hpp"
#include "sftlab/config.hpp"

namespace sftlab {

using nlohmann::json;
using sft::io::CsvTable;
using sft::io::num;
namespace graphs = sft::graphs;

json cmd_graphs(const json& c, RunRecorder& rec) {
  const int n = c.at("graphs").at("n").get<int>();
  const auto all = graphs::enumerate_graphs(n, c.at("graphs").at("n_max").get<int>());
  json list = json::array();
  CsvTable table({"index", "aut_order", "orbit_size", "weight", "tadpole", "connected"});
  for (std::size_t i = 0; i < all.size(); ++i) {
    list.push_back(graphs::to_json(all[i]));
    table.add({std::to_string(i), std::to_string(all[i].aut_order()), std::to_string(all[i].orbit_size()),
               num(all[i].moment_weight()), all[i].has_tadpole() ? "1" : "0", all[i].connected() ? "1" : "0"});
  }
  rec.write_json("graphs.json", list);
  rec.write_csv("graphs.csv", table);
  return {{"n", n}, {"count", all.size()}};
}

json cmd_moment(const json& c, RunRecorder& rec) {
  const auto f = field_params(c);
  const auto vp = vertex_params(c);
  const auto& gc = c.at("graphs");
  const int order = gc.at("order").get<int>();
  const graphs::GridEvaluator ev(f, vp, gc.at("vacuum_only").get<bool>());
  const auto m = graphs::wick_moment(order, ev, gc.at("n_max").get<int>());

  CsvTable table({"term", "weight", "value_re", "value_im", "contribution"});
  for (std::size_t i = 0; i < m.terms.size(); ++i) {
    const auto& t = m.terms[i];
    table.add({std::to_string(i), num(t.weight), num(t.value.real()), num(t.value.imag()), num(t.weight * t.value.real())});
  }
  rec.write_csv("moment_terms.csv", table);

  json summary{{"order", order}, {"value", m.value}, {"imag", m.imag}, {"terms", m.terms.size()}};
  const auto mc = gc.at("mc_samples").get<std::size_t>();
  if (mc > 0) {
    const sft::measure::FreeFieldSampler sampler(f);
    const bool vac = gc.at("vacuum_only").get<bool>();
    const auto values = sft::measure::map_samples(sampler, mc, [&](const auto& s) {
      const auto v = vac ? sft::interaction::projected_interaction(s, ev.kernel()).value
                         : sft::interaction::interaction_I(s, ev.kernel()).value;
      return sft::measure::cplx(std::pow(v.real(), order), 0.0);
    });
    const auto est = sft::measure::estimate_mean(std::span<const sft::measure::cplx>(values));
    summary["mc"] = {{"mean", est.mean.real()}, {"stderr", est.stderr_re}, {"n", est.n}};
    summary["mc_within_3_sigma"] = std::abs(est.mean.real() - m.value) <= 3.0 * est.stderr_re;
  }
  rec.write_json("moment.json", summary);
  return summary;
}

json cmd_activity(const json& c, RunRecorder& rec) {
  const auto g = selected_graph(c);
  const auto labels = edge_labels(c, g);
  const auto r = graphs::activity_f(g, labels, activity_params(c));
  CsvTable table({"value", "imag"});
  table.add({num(r.value), num(r.imag)});
  rec.write_csv("activity.csv", table);
  json lj = json::array();
  for (const auto& l : labels) lj.push_back({{"t", l.t}, {"l", l.length}});
  const json out{{"graph", graphs::to_json(g)}, {"labels", lj}, {"value", r.value}, {"imag", r.imag}, {"params", r.params}};
  rec.write_json("activity.json", out);
  return {{"value", r.value}, {"imag", r.imag}};
}

}  // namespace sftlab
