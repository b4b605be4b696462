#include <cmath>
#include <vector>

#include "sft/error.hpp"
#include "sft/fock.hpp"
#include "sft/interaction.hpp"
#include "sft/io.hpp"
#include "sft/measure.hpp"
#include "sft/parallel.hpp"
#include "sftlab/commands.hpp"
#include "sftlab/config.hpp"

namespace sftlab {

using nlohmann::json;
using sft::io::CsvTable;
using sft::io::num;
namespace measure = sft::measure;
namespace interaction = sft::interaction;

namespace {

std::size_t n_samples(const json& c) { return c.at("measure").at("n_samples").get<std::size_t>(); }

json estimate_json(const measure::MCEstimate& e) {
  return {{"re", e.mean.real()}, {"im", e.mean.imag()}, {"stderr_re", e.stderr_re}, {"stderr_im", e.stderr_im}, {"n", e.n}};
}

}  // namespace

json cmd_fock_dump(const json& c, RunRecorder& rec) {
  const auto f = field_params(c);
  const auto basis =
      sft::fock::enumerate_basis({f.d, f.mass, f.min_length, f.cutoff}, c.at("fock").at("max_states").get<std::size_t>());
  rec.write_json("basis.json", sft::fock::to_json(basis));

  CsvTable table({"t", "length", "trace", "oracle", "rel_gap"});
  const Eigen::VectorXd e = basis.energies(f.min_length);
  double worst = 0.0;
  const auto times = c.at("fock").at("heat_times").get<std::vector<double>>();
  for (double t : times) {
    const double trace = (-t * e.array()).exp().sum();
    const double oracle = sft::fock::heat_trace_oracle(f.d, f.min_length, f.mass, t, basis.mode_window());
    const double gap = std::abs(trace - oracle) / oracle;
    worst = std::max(worst, gap);
    table.add({num(t), num(f.min_length), num(trace), num(oracle), num(gap)});
  }
  rec.write_csv("heat_trace.csv", table);

  const double t0 = times.front();
  const auto heat = sft::fock::heat_operator(basis, f.min_length, t0);
  sft::io::save_matrix(rec.dir() / "heat_operator.bin", heat.to_dense(),
                       {{"operator", "heat"}, {"length", f.min_length}, {"t", t0}, {"cutoff", f.cutoff},
                        {"mode_window", basis.mode_window()}, {"basis_size", basis.size()}});
  rec.record(rec.dir() / "heat_operator.bin");
  return {{"basis_size", basis.size()}, {"mode_window", basis.mode_window()}, {"max_rel_gap", worst}};
}

json cmd_twopoint(const json& c, RunRecorder& rec) {
  const measure::FreeFieldSampler sampler(field_params(c));
  const std::size_t n = n_samples(c);
  std::vector<measure::StringFieldSample> samples(n);
  sft::parallel_for(n, [&](std::size_t i) { samples[i] = sampler.sample(i); });
  const auto& tp = c.at("measure").at("twopoint");
  const Eigen::VectorXd g = Eigen::VectorXd::Ones(sampler.params().n_cells);
  const measure::TwoPointQuery q{tp.at("state").get<std::size_t>(), g, tp.at("it").get<int>(),
                                 tp.at("state2").get<std::size_t>(), g, tp.at("it2").get<int>()};
  const auto est = measure::two_point_estimate(samples, q);
  const double analytic = measure::two_point_analytic(sampler, q);
  const double z = std::abs(est.mean.real() - analytic) / est.stderr_re;
  CsvTable table({"estimate_re", "estimate_im", "stderr_re", "stderr_im", "analytic", "z"});
  table.add({num(est.mean.real()), num(est.mean.imag()), num(est.stderr_re), num(est.stderr_im), num(analytic), num(z)});
  rec.write_csv("twopoint.csv", table);
  return {{"estimate", estimate_json(est)}, {"analytic", analytic}, {"z", z}, {"within_3_sigma", z <= 3.0}};
}

json cmd_fk_check(const json& c, RunRecorder& rec) {
  const auto f = field_params(c);
  const auto& fk = c.at("measure").at("fk");
  measure::FeynmanKacQuery q;
  q.length = f.min_length;
  q.mass = f.mass;
  q.f.constant = fk.at("constant").get<double>();
  q.f.cos_coef = fk.at("cos").get<std::vector<double>>();
  q.f.sin_coef = fk.at("sin").get<std::vector<double>>();
  q.f2 = q.f;
  q.t = fk.at("t").get<double>();
  q.t2 = fk.at("t2").get<double>();
  q.lattice = {fk.at("n_space").get<int>(), fk.at("n_time").get<int>(), fk.at("time_step").get<double>()};
  q.n_samples = fk.at("n_samples").get<std::size_t>();
  q.seed = f.seed;
  const auto r = measure::feynman_kac_2d(q);
  const double bias = std::abs(r.lattice - r.continuum);
  const double dev = std::abs(r.estimate.mean.real() - r.continuum);
  CsvTable table({"estimate", "stderr", "lattice", "continuum", "lattice_bias"});
  table.add({num(r.estimate.mean.real()), num(r.estimate.stderr_re), num(r.lattice), num(r.continuum), num(bias)});
  rec.write_csv("fk_check.csv", table);
  return {{"estimate", estimate_json(r.estimate)},
          {"lattice", r.lattice},
          {"continuum", r.continuum},
          {"within_3_sigma_plus_bias", dev <= 3.0 * r.estimate.stderr_re + bias}};
}

json cmd_vertex(const json& c, RunRecorder& rec) {
  const auto f = field_params(c);
  const auto vp = vertex_params(c);
  const measure::FreeFieldSampler sampler(f);
  const interaction::VertexKernel kernel(f, sampler.basis(), vp);
  const std::size_t n = n_samples(c);
  const auto values =
      measure::map_samples(sampler, n, [&](const auto& s) { return interaction::interaction_I(s, kernel).value; });
  CsvTable table({"sample", "re", "im"});
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    table.add({std::to_string(i), num(values[i].real()), num(values[i].imag())});
    sq[i] = std::norm(values[i]);
  }
  rec.write_csv("vertex_values.csv", table);
  const auto mean = measure::estimate_mean(std::span<const measure::cplx>(values));
  const auto second = measure::estimate_mean(std::span<const double>(sq));

  // Refinement: sample 0 under every coarser admissible quadrature.
  const auto first = sampler.sample(0);
  json refinement = json::array();
  for (int ts = 1; ts <= 4; ts *= 2)
    for (int ls = 1; ls <= 4; ls *= 2) {
      auto p = vp;
      p.t_stride = vp.t_stride * ts;
      p.l_stride = vp.l_stride * ls;
      if (!interaction::violations(p, f).empty()) continue;
      const interaction::VertexKernel k(f, sampler.basis(), p);
      const auto v = interaction::interaction_I(first, k).value;
      refinement.push_back({{"t_stride", p.t_stride}, {"l_stride", p.l_stride}, {"re", v.real()}, {"im", v.imag()}});
    }
  const json diag{{"params", interaction::to_json(vp)},
                  {"field", measure::to_json(f)},
                  {"value", {{"re", values[0].real()}, {"im", values[0].imag()}}},
                  {"mean", estimate_json(mean)},
                  {"mean_abs2", estimate_json(second)},
                  {"triples", kernel.triples().size()},
                  {"refinement", refinement}};
  rec.write_json("vertex.json", diag);
  return {{"mean", estimate_json(mean)}, {"mean_abs2", estimate_json(second)}};
}

json cmd_partition(const json& c, RunRecorder& rec) {
  const auto f = field_params(c);
  const measure::FreeFieldSampler sampler(f);
  const interaction::VertexKernel kernel(f, sampler.basis(), vertex_params(c));
  const auto values = measure::map_samples(sampler, n_samples(c),
                                           [&](const auto& s) { return interaction::interaction_I(s, kernel).value; });
  const auto ls = lambdas(c);
  const auto z = interaction::partition_from_values(ls, values);
  CsvTable table({"lambda", "re_z", "im_z", "stderr"});
  double max_abs = 0.0;
  for (const auto& p : z) {
    table.add({num(p.lambda), num(p.z.real()), num(p.z.imag()), num(p.stderr_)});
    max_abs = std::max(max_abs, std::abs(p.z));
  }
  rec.write_csv("partition.csv", table);
  return {{"points", z.size()}, {"max_abs_z", max_abs}};
}

json cmd_cauchy(const json& c, RunRecorder& rec) {
  const auto levels = cauchy_levels(c);
  const auto est = interaction::cauchy_schedule(levels, n_samples(c), field_params(c), vertex_params(c));
  CsvTable table({"M_from", "kappa_from", "M_to", "kappa_to", "mean_sq_diff", "stderr"});
  json steps = json::array();
  for (std::size_t i = 0; i < est.size(); ++i) {
    table.add({num(levels[i].cutoff), num(levels[i].kappa), num(levels[i + 1].cutoff), num(levels[i + 1].kappa),
               num(est[i].mean.real()), num(est[i].stderr_re)});
    steps.push_back(est[i].mean.real());
  }
  rec.write_csv("cauchy.csv", table);
  return {{"steps", steps}};
}

}  // namespace sftlab
