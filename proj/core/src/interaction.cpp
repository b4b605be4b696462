#include "sft/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sft/error.hpp"
#include "sft/mollifier.hpp"
#include "sft/parallel.hpp"
#include "sft/projection.hpp"

namespace sft::interaction {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

bool is_multiple(double x, double step) {
  const double r = x / step;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

// Adaptive Gauss-Kronrod over [a, b] split at the given interior points.
template <class F>
double integrate_pieces(F f, double a, double b, std::vector<double> cuts) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]);
    const double hi = std::min(b, cuts[i + 1]);
    if (hi <= lo) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
  }
  return total;
}

// Density of x1 + x2 - x3 with x_i uniform on [-1/2, 1/2].
double irwin_hall3(double s) {
  const double y = s + 1.5;
  if (y <= 0.0 || y >= 3.0) return 0.0;
  if (y < 1.0) return 0.5 * y * y;
  if (y < 2.0) return 0.5 * (-2.0 * y * y + 6.0 * y - 3.0);
  return 0.5 * (3.0 - y) * (3.0 - y);
}

// Area of {(x, y) in [0, D]^2 : x + y <= r}.
double corner_area(double side, double r) {
  if (r <= 0.0) return 0.0;
  if (r <= side) return 0.5 * r * r;
  if (r <= 2.0 * side) return side * side - 0.5 * (2.0 * side - r) * (2.0 * side - r);
  return side * side;
}

void check_same_grid(const StringFieldSample& s, const FieldParams& f, std::size_t dim) {
  if (!s.basis || s.basis->size() != dim || s.params.n_cells != f.n_cells || s.params.n_times() != f.n_times() ||
      std::abs(s.params.dt - f.dt) > 1e-12 || std::abs(s.params.min_length - f.min_length) > 1e-12 ||
      std::abs(s.params.max_length - f.max_length) > 1e-12)
    throw UsageError("vertex arguments do not share the kernel's field grid");
}

}  // namespace

std::vector<std::string> violations(const VertexParams& p, const FieldParams& f) {
  std::vector<std::string> v;
  if (!(p.epsilon > 0.0)) v.push_back("vertex epsilon must be > 0");
  if (!(p.t_window > 0.0)) v.push_back("vertex time window T must be > 0");
  if (!(p.v > 0.0 && p.v < f.min_length / 4.0))
    v.push_back("splitting smear v must satisfy v ∈ (0, L0/4) = (0, " + num(f.min_length / 4.0) + "), got " + num(p.v));
  if (p.t_stride < 1 || p.l_stride < 1) v.push_back("quadrature strides must be >= 1");
  if (!v.empty()) return v;
  if (f.n_cells % p.l_stride != 0) v.push_back("l quadrature stride must divide the number of length cells");
  if (!(p.dl_q(f) < p.v / 4.0))
    v.push_back("l quadrature step " + num(p.dl_q(f)) + " must be < v/4 = " + num(p.v / 4.0));
  if (p.t_window > f.t_half * (1.0 + 1e-12)) v.push_back("vertex time window exceeds the field's time window");
  if (!is_multiple(p.t_window, p.dt_q(f))) v.push_back("vertex time window must be a multiple of the t step");
  if (!is_multiple(f.t_half - p.t_window, f.dt)) v.push_back("vertex time window must start on a field time node");
  return v;
}

void validate(const VertexParams& p, const FieldParams& f) {
  auto v = violations(p, f);
  if (!v.empty()) throw ConfigError(std::move(v));
}

double smear_profile(double v, double u) {
  if (u > 0.0) return 0.0;
  return 2.0 * mollifier(1.0 / v, u);
}

double smear_mass(double v, double min_length, double max_length) {
  if (!(v > 0.0) || !(max_length > min_length)) throw DomainError("smear mass needs v > 0 and max > min");
  const double side = max_length - min_length;
  auto area = [&](double u) {
    return corner_area(side, side + u - min_length) - corner_area(side, u - min_length);
  };
  std::vector<double> cuts;
  for (double r : {0.0, side, 2.0 * side}) {
    cuts.push_back(r + min_length);
    cuts.push_back(r + min_length - side);
  }
  return integrate_pieces([&](double u) { return smear_profile(v, u) * area(u); }, -v, 0.0, cuts);
}

VertexKernel::VertexKernel(const FieldParams& field, std::shared_ptr<const fock::FockBasis> basis,
                           const VertexParams& params)
    : field_(field), basis_(std::move(basis)), params_(params) {
  measure::validate(field_);
  validate(params_, field_);
  n_cells_ = field_.n_cells / params_.l_stride;
  const double h = params_.dl_q(field_);
  const double v = params_.v;

  // Cell-averaged smear weight as a function of n = j1 + j2 - j.
  const double lo_c = -v - 1.5 * h, hi_c = 1.5 * h;
  const int n_lo = static_cast<int>(std::floor((lo_c - field_.min_length) / h - 0.5)) - 1;
  const int n_hi = static_cast<int>(std::ceil((hi_c - field_.min_length) / h - 0.5)) + 1;
  std::vector<double> w(static_cast<std::size_t>(n_hi - n_lo + 1), 0.0);
  for (int n = n_lo; n <= n_hi; ++n) {
    const double c = field_.min_length + (n + 0.5) * h;
    auto f = [&](double s) { return irwin_hall3(s) * smear_profile(v, c + h * s); };
    const double value = integrate_pieces(f, -1.5, 1.5, {-0.5, 0.5, -c / h, (-v - c) / h});
    w[static_cast<std::size_t>(n - n_lo)] = value * h * h * h;
  }

  const projection::SmoothingParams smooth{params_.epsilon, params_.epsilon, params_.epsilon,
                                           field_.mass,     field_.mass,     field_.mass};
  for (int j = 0; j < n_cells_; ++j)
    for (int j1 = 0; j1 < n_cells_; ++j1)
      for (int n = n_lo; n <= n_hi; ++n) {
        const int j2 = n + j - j1;
        if (j2 < 0 || j2 >= n_cells_) continue;
        const double weight = w[static_cast<std::size_t>(n - n_lo)];
        if (weight == 0.0) continue;
        triples_.push_back({j, j1, j2, weight});
        const double l1 = length(j1), l2 = length(j2);
        const projection::SplitSpec spec{l1, l2, std::max(length(j), l1 + l2)};
        splits_.push_back(projection::sandwiched_split(smooth, spec, *basis_));
      }

  const int first = static_cast<int>(std::lround((field_.t_half - params_.t_window) / field_.dt));
  const int steps = static_cast<int>(std::lround(2.0 * params_.t_window / params_.dt_q(field_)));
  const double dtq = params_.dt_q(field_);
  for (int i = 0; i <= steps; ++i)
    time_nodes_.emplace_back(first + i * params_.t_stride, (i == 0 || i == steps) ? 0.5 * dtq : dtq);
}

double VertexKernel::length(int j) const { return field_.min_length + (j + 0.5) * params_.dl_q(field_); }

double VertexKernel::total_weight() const {
  double s = 0.0;
  for (const auto& t : triples_) s += t.weight;
  return s;
}

Eigen::VectorXcd VertexKernel::cell_value(const StringFieldSample& s, int it, int j) const {
  const auto dim = static_cast<Eigen::Index>(basis_->size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (int r = 0; r < params_.l_stride; ++r)
    out += Eigen::Map<const Eigen::VectorXcd>(&s.at(it, j * params_.l_stride + r, 0), dim);
  return out / static_cast<double>(params_.l_stride);
}

cplx VertexKernel::evaluate(const StringFieldSample& psi1, const StringFieldSample& psi2,
                            const StringFieldSample& psi3) const {
  for (const auto* s : {&psi1, &psi2, &psi3}) {
    check_same_grid(*s, field_, basis_->size());
    if (!s->mollified) throw UsageError("vertex arguments must be mollified samples");
  }
  const auto dim = static_cast<Eigen::Index>(basis_->size());
  std::vector<Eigen::VectorXcd> a(n_cells_), b(n_cells_), c(n_cells_);
  Eigen::VectorXcd pair(dim * dim);
  cplx total{0.0, 0.0};
  for (const auto& [it, wt] : time_nodes_) {
    for (int j = 0; j < n_cells_; ++j) {
      a[j] = cell_value(psi1, it, j);
      b[j] = cell_value(psi2, it, j);
      c[j] = cell_value(psi3, it, j);
    }
    cplx slice{0.0, 0.0};
    for (std::size_t i = 0; i < triples_.size(); ++i) {
      const auto& tr = triples_[i];
      const auto& pb = b[tr.j1];
      const auto& pc = c[tr.j2];
      for (Eigen::Index x = 0; x < dim; ++x) pair.segment(x * dim, dim) = pb[x] * pc;
      const Eigen::VectorXcd y = splits_[i] * a[tr.j];
      slice += tr.weight * y.dot(pair);
    }
    total += wt * slice;
  }
  return total;
}

cplx vertex_J(const StringFieldSample& psi1, const StringFieldSample& psi2, const StringFieldSample& psi3,
              const VertexParams& params) {
  if (!psi1.basis) throw UsageError("vertex argument has no basis");
  return VertexKernel(psi1.params, psi1.basis, params).evaluate(psi1, psi2, psi3);
}

VertexValue interaction_I(const StringFieldSample& raw, const VertexKernel& kernel) {
  const auto field = measure::mollify(measure::project_energy(raw, raw.params.cutoff), raw.params.kappa);
  return {kernel.evaluate(field, field, field), 0.0, kernel.params()};
}

VertexValue interaction_I(const StringFieldSample& raw, const VertexParams& params) {
  if (!raw.basis) throw UsageError("field sample has no basis");
  return interaction_I(raw, VertexKernel(raw.params, raw.basis, params));
}

VertexValue projected_interaction(const StringFieldSample& raw, const VertexKernel& kernel) {
  const auto field = measure::mollify(measure::project_vacuum(raw), raw.params.kappa);
  return {kernel.evaluate(field, field, field), 0.0, kernel.params()};
}

VertexValue twisted_interaction(const StringFieldSample& raw, const VertexKernel& kernel, int n_theta,
                                double offset) {
  if (n_theta < 1) throw UsageError("twist grid needs at least one point");
  const auto field = measure::mollify(measure::project_energy(raw, raw.params.cutoff), raw.params.kappa);
  const std::size_t dim = field.basis->size();
  std::vector<int> momentum(dim);
  for (std::size_t s = 0; s < dim; ++s) momentum[s] = field.basis->state(s).total_momentum();

  std::vector<StringFieldSample> rotated;
  const double step = 2.0 * std::numbers::pi / n_theta;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = offset + i * step;
    StringFieldSample r = field;
    for (std::size_t k = 0; k < r.amplitudes.size(); ++k) r.amplitudes[k] *= std::polar(1.0, -theta * momentum[k % dim]);
    rotated.push_back(std::move(r));
  }
  cplx total{0.0, 0.0};
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_theta; ++j)
      for (int k = 0; k < n_theta; ++k) total += kernel.evaluate(rotated[i], rotated[j], rotated[k]);
  return {total * step * step * step, 0.0, kernel.params()};
}

std::vector<ZPoint> partition_from_values(std::span<const double> lambdas, std::span<const cplx> values) {
  std::vector<ZPoint> out;
  std::vector<cplx> phases(values.size());
  for (double lambda : lambdas) {
    for (std::size_t i = 0; i < values.size(); ++i) phases[i] = std::polar(1.0, lambda * values[i].real());
    const auto est = measure::estimate_mean(std::span<const cplx>(phases));
    out.push_back({lambda, est.mean, est.stderr_abs()});
  }
  return out;
}

std::vector<ZPoint> partition_Z(std::span<const double> lambdas, std::size_t n_samples,
                                const measure::FreeFieldSampler& sampler, const VertexParams& params) {
  if (n_samples < 1) throw UsageError("partition function needs at least one sample");
  const VertexKernel kernel(sampler.params(), sampler.basis(), params);
  const auto values = measure::map_samples(sampler, n_samples,
                                           [&](const StringFieldSample& s) { return interaction_I(s, kernel).value; });
  return partition_from_values(lambdas, values);
}

std::vector<MCEstimate> cauchy_schedule(std::span<const CutoffLevel> levels, std::size_t n_samples,
                                        const FieldParams& field, const VertexParams& params) {
  if (levels.size() < 2) throw UsageError("Cauchy schedule needs at least two levels");
  std::vector<std::string> bad;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i + 1].cutoff < levels[i].cutoff || levels[i + 1].kappa < levels[i].kappa)
      bad.push_back("Cauchy levels must be nondecreasing in both M and kappa");
  FieldParams top = field;
  top.cutoff = levels.back().cutoff;
  top.kappa = levels.back().kappa;
  for (auto& s : measure::violations(top)) bad.push_back(s);
  for (const auto& lv : levels)
    if (!(lv.kappa > 0.0)) bad.push_back("kappa must be > 0");
  if (!bad.empty()) throw ConfigError(std::move(bad));

  const measure::FreeFieldSampler sampler(top);
  const VertexKernel kernel(top, sampler.basis(), params);
  const std::size_t steps = levels.size() - 1;
  std::vector<double> diffs(n_samples * steps);
  parallel_for(n_samples, [&](std::size_t i) {
    const auto raw = sampler.sample(i);
    std::vector<cplx> values;
    for (const auto& lv : levels) {
      const auto f = measure::mollify(measure::project_energy(raw, lv.cutoff), lv.kappa);
      values.push_back(kernel.evaluate(f, f, f));
    }
    for (std::size_t k = 0; k < steps; ++k) diffs[k * n_samples + i] = std::norm(values[k] - values[k + 1]);
  });
  std::vector<MCEstimate> out;
  for (std::size_t k = 0; k < steps; ++k)
    out.push_back(measure::estimate_mean(std::span<const double>(diffs.data() + k * n_samples, n_samples)));
  return out;
}

MCEstimate cauchy_l2_check(const CutoffLevel& a, const CutoffLevel& b, std::size_t n_samples,
                           const FieldParams& field, const VertexParams& params) {
  const CutoffLevel levels[] = {a, b};
  return cauchy_schedule(levels, n_samples, field, params).front();
}

nlohmann::json to_json(const VertexParams& p) {
  return {{"epsilon", p.epsilon}, {"T", p.t_window}, {"v", p.v}, {"t_stride", p.t_stride}, {"l_stride", p.l_stride}};
}

}  // namespace sft::interaction
