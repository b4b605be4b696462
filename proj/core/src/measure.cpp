#include "sft/measure.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "sft/error.hpp"
#include "sft/mollifier.hpp"
#include "sft/parallel.hpp"

namespace sft::measure {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx complex_normal(std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  const double re = normal(rng);
  const double im = normal(rng);
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

int FieldParams::n_times() const { return static_cast<int>(std::lround(2.0 * t_half / dt)) + 1; }

std::vector<std::string> violations(const FieldParams& p) {
  std::vector<std::string> v;
  if (p.d < 1) v.push_back("d must be >= 1");
  if (!(p.mass > 0.0)) v.push_back("m must be > 0 (got " + num(p.mass) + ")");
  if (!(p.min_length > 0.0)) v.push_back("L0 must be > 0");
  if (!(p.max_length > p.min_length)) v.push_back("Linf must exceed L0");
  if (!(p.cutoff >= 0.0)) v.push_back("Fock cutoff M must be >= 0");
  if (!(p.kappa > 0.0)) v.push_back("kappa must be > 0");
  if (!(p.dt > 0.0)) v.push_back("time step dt must be > 0");
  if (!(p.t_half > 0.0)) v.push_back("time window half-width must be > 0");
  if (p.n_cells < 1) v.push_back("length grid needs at least one cell");
  if (p.dt > 0.0 && p.t_half > 0.0) {
    const double steps = 2.0 * p.t_half / p.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
      v.push_back("time window 2*t_half must be an integer multiple of dt");
  }
  if (p.n_cells >= 1 && p.kappa > 0.0 && p.max_length > p.min_length && !(p.dl() < 1.0 / (4.0 * p.kappa)))
    v.push_back("length step dl = " + num(p.dl()) + " must be < 1/(4 kappa) = " + num(1.0 / (4.0 * p.kappa)));
  return v;
}

void validate(const FieldParams& p) {
  auto v = violations(p);
  if (!v.empty()) throw ConfigError(std::move(v));
}

StringFieldSample StringFieldSample::zeros(const FieldParams& p, std::shared_ptr<const fock::FockBasis> basis) {
  StringFieldSample s;
  s.params = p;
  s.basis = std::move(basis);
  s.amplitudes.assign(static_cast<std::size_t>(p.n_times()) * static_cast<std::size_t>(p.n_cells) * s.basis->size(),
                      cplx{0.0, 0.0});
  return s;
}

FreeFieldSampler::FreeFieldSampler(const FieldParams& params) : params_(params) {
  validate(params_);
  basis_ = std::make_shared<const fock::FockBasis>(
      fock::enumerate_basis({params_.d, params_.mass, params_.min_length, params_.cutoff}));
  freq_.resize(static_cast<std::size_t>(params_.n_cells) * basis_->size());
  for (int il = 0; il < params_.n_cells; ++il)
    for (std::size_t s = 0; s < basis_->size(); ++s)
      freq_[static_cast<std::size_t>(il) * basis_->size() + s] =
          fock::state_energy(basis_->state(s), params_.length(il), params_.mass);
}

StringFieldSample FreeFieldSampler::sample(std::uint64_t index) const {
  auto out = StringFieldSample::zeros(params_, basis_);
  std::mt19937_64 rng(derive_seed(params_.seed, index));
  std::normal_distribution<double> normal;
  const double sigma = 1.0 / std::sqrt(params_.dl());
  const int nt = params_.n_times();
  for (int il = 0; il < params_.n_cells; ++il) {
    for (std::size_t s = 0; s < basis_->size(); ++s) {
      const double rho = std::exp(-frequency(il, s) * params_.dt);
      const double innovation = sigma * std::sqrt(std::max(0.0, 1.0 - rho * rho));
      cplx x = sigma * complex_normal(rng, normal);
      out.at(0, il, s) = x;
      for (int it = 1; it < nt; ++it) {
        x = rho * x + innovation * complex_normal(rng, normal);
        out.at(it, il, s) = x;
      }
    }
  }
  return out;
}

StringFieldSample sample_field(const FieldParams& params, std::uint64_t index) {
  return FreeFieldSampler(params).sample(index);
}

StringFieldSample mollify(const StringFieldSample& raw, double kappa) {
  const auto w = discrete_mollifier(kappa, raw.params.dl());
  const int reach = static_cast<int>((w.size() - 1) / 2);
  auto out = StringFieldSample::zeros(raw.params, raw.basis);
  out.mollified = true;
  const int nl = raw.params.n_cells;
  const std::size_t dim = raw.basis->size();
  for (int it = 0; it < raw.params.n_times(); ++it)
    for (int il = 0; il < nl; ++il)
      for (int r = -reach; r <= reach; ++r) {
        const int src = il - r;
        if (src < 0 || src >= nl) continue;
        const double wr = w[static_cast<std::size_t>(r + reach)];
        for (std::size_t s = 0; s < dim; ++s) out.at(it, il, s) += wr * raw.at(it, src, s);
      }
  return out;
}

StringFieldSample project_energy(const StringFieldSample& s, double cutoff) {
  StringFieldSample out = s;
  const auto e = s.basis->energies(s.params.min_length, s.params.mass);
  const std::size_t dim = s.basis->size();
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
    const double es = e[static_cast<Eigen::Index>(i % dim)];
    if (es > cutoff + 1e-12 * std::max(1.0, cutoff)) out.amplitudes[i] = 0.0;
  }
  return out;
}

StringFieldSample project_vacuum(const StringFieldSample& s) {
  StringFieldSample out = s;
  const std::size_t dim = s.basis->size();
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i)
    if (i % dim != 0) out.amplitudes[i] = 0.0;
  return out;
}

double MCEstimate::stderr_abs() const { return std::hypot(stderr_re, stderr_im); }

MCEstimate estimate_mean(std::span<const cplx> values) {
  const std::size_t n = values.size();
  if (n == 0) throw UsageError("Monte-Carlo estimate needs at least one sample");
  MCEstimate est;
  est.n = n;
  cplx total{0.0, 0.0};
  for (const auto& x : values) total += x;
  est.mean = total / static_cast<double>(n);
  if (n == 1) return est;

  // Batch means once there are enough samples for kMinBatches batches.
  std::vector<cplx> groups;
  if (n >= 2 * kMinBatches) {
    const std::size_t batches = std::min<std::size_t>(100, n / 2);
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * n / batches;
      const std::size_t hi = (b + 1) * n / batches;
      cplx s{0.0, 0.0};
      for (std::size_t i = lo; i < hi; ++i) s += values[i];
      groups.push_back(s / static_cast<double>(hi - lo));
    }
  } else {
    groups.assign(values.begin(), values.end());
  }
  cplx gm{0.0, 0.0};
  for (const auto& g : groups) gm += g;
  gm /= static_cast<double>(groups.size());
  double vr = 0.0, vi = 0.0;
  for (const auto& g : groups) {
    vr += std::norm(g.real() - gm.real());
    vi += std::norm(g.imag() - gm.imag());
  }
  const double k = static_cast<double>(groups.size());
  est.stderr_re = std::sqrt(vr / (k - 1.0) / k);
  est.stderr_im = std::sqrt(vi / (k - 1.0) / k);
  return est;
}

MCEstimate estimate_mean(std::span<const double> values) {
  std::vector<cplx> c(values.begin(), values.end());
  return estimate_mean(std::span<const cplx>(c));
}

std::vector<cplx> map_samples(const FreeFieldSampler& sampler, std::size_t n,
                              const std::function<cplx(const StringFieldSample&)>& f) {
  std::vector<cplx> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(sampler.sample(i)); });
  return out;
}

cplx linear_functional(const StringFieldSample& s, std::size_t state, const Eigen::VectorXd& g, int it) {
  if (g.size() != s.params.n_cells) throw UsageError("test function does not match the length grid");
  cplx acc{0.0, 0.0};
  for (int il = 0; il < s.params.n_cells; ++il) acc += g[il] * std::conj(s.at(it, il, state));
  return acc * s.params.dl();
}

MCEstimate two_point_estimate(std::span<const StringFieldSample> samples, const TwoPointQuery& q) {
  if (samples.empty()) throw UsageError("two-point estimate needs at least one sample");
  std::vector<cplx> values;
  values.reserve(samples.size());
  for (const auto& s : samples)
    values.push_back(std::conj(linear_functional(s, q.v, q.g, q.it)) * linear_functional(s, q.v2, q.g2, q.it2));
  return estimate_mean(std::span<const cplx>(values));
}

double two_point_analytic(const FreeFieldSampler& sampler, const TwoPointQuery& q) {
  if (q.v != q.v2) return 0.0;
  const auto& p = sampler.params();
  const double lag = std::abs(p.time(q.it) - p.time(q.it2));
  double acc = 0.0;
  for (int il = 0; il < p.n_cells; ++il) acc += q.g[il] * q.g2[il] * std::exp(-lag * sampler.frequency(il, q.v));
  return acc * p.dl();
}

KernelCheck covariance_kernel_check(double omega, double tau, double tolerance) {
  if (!(omega > 0.0)) throw DomainError("covariance kernel check requires omega > 0");
  KernelCheck out;
  out.analytic = std::exp(-omega * std::abs(tau));
  auto spectral = [omega](double p) { return 2.0 * omega / (p * p + omega * omega) / std::numbers::pi; };
  double rel_err = 0.0;
  if (tau == 0.0) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double l1 = 0.0;
    out.numeric = integrator.integrate(spectral, 0.0, std::numeric_limits<double>::infinity(), 1e-14, &rel_err, &l1);
  } else {
    boost::math::quadrature::ooura_fourier_cos<double> integrator(1e-14);
    const auto [value, err] = integrator.integrate(spectral, std::abs(tau));
    out.numeric = value;
    rel_err = err;
  }
  out.error_estimate = rel_err * std::abs(out.numeric);
  if (!(out.error_estimate <= tolerance))
    throw NumericError("kernel quadrature did not converge: error estimate " + num(out.error_estimate) +
                       " exceeds " + num(tolerance) + " (omega=" + num(omega) + ", tau=" + num(tau) + ")");
  return out;
}

double TrigData::operator()(double x) const {
  double v = constant;
  for (std::size_t k = 0; k < cos_coef.size(); ++k)
    v += std::numbers::sqrt2 * cos_coef[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * x);
  for (std::size_t k = 0; k < sin_coef.size(); ++k)
    v += std::numbers::sqrt2 * sin_coef[k] * std::sin(kTwoPi * static_cast<double>(k + 1) * x);
  return v;
}

int TrigData::max_mode() const { return static_cast<int>(std::max(cos_coef.size(), sin_coef.size())); }

FeynmanKacResult feynman_kac_2d(const FeynmanKacQuery& q) {
  const auto& lat = q.lattice;
  std::vector<std::string> bad;
  if (!(q.length > 0.0)) bad.push_back("loop length must be > 0");
  if (!(q.mass > 0.0)) bad.push_back("m must be > 0");
  if (lat.n_space < 4 || lat.n_time < 4) bad.push_back("lattice needs at least 4 sites per direction");
  if (!(lat.time_step > 0.0)) bad.push_back("lattice time step must be > 0");
  if (4 * std::max(q.f.max_mode(), q.f2.max_mode()) >= lat.n_space)
    bad.push_back("lattice too coarse: n_space must exceed 4x the highest requested Fourier mode");
  if (std::abs(q.t - q.t2) > 0.25 * lat.n_time * lat.time_step)
    bad.push_back("time separation exceeds a quarter of the periodic time window");
  if (q.n_samples < 1) bad.push_back("n_samples must be >= 1");
  if (!bad.empty()) throw ConfigError(std::move(bad));

  const int nx = lat.n_space;
  const int nt = lat.n_time;
  const double a = q.length / nx;
  const double b = lat.time_step;
  const double volume = q.length * nt * b;
  const int n1 = static_cast<int>(std::lround(q.t / b));
  const int n2 = static_cast<int>(std::lround(q.t2 / b));

  // Lattice eigenvalues and amplitudes sqrt(2 / (V lambda)).
  Eigen::MatrixXd amp(nx, nt), lambda(nx, nt);
  for (int kx = 0; kx < nx; ++kx)
    for (int kt = 0; kt < nt; ++kt) {
      const double sx = std::sin(std::numbers::pi * kx / nx);
      const double st = std::sin(std::numbers::pi * kt / nt);
      lambda(kx, kt) = 4.0 * sx * sx / (a * a) + 4.0 * st * st / (b * b) + q.mass * q.mass;
      amp(kx, kt) = std::sqrt(2.0 / (volume * lambda(kx, kt)));
    }

  // Test functions on the spatial sites, weighted by a / sqrt(l).
  Eigen::VectorXd w1(nx), w2(nx);
  for (int j = 0; j < nx; ++j) {
    const double x = static_cast<double>(j) / nx;
    w1[j] = a * q.f(x) / std::sqrt(q.length);
    w2[j] = a * q.f2(x) / std::sqrt(q.length);
  }

  Eigen::VectorXcd phase1(nt), phase2(nt);
  for (int kt = 0; kt < nt; ++kt) {
    phase1[kt] = std::polar(1.0, kTwoPi * kt * n1 / nt);
    phase2[kt] = std::polar(1.0, kTwoPi * kt * n2 / nt);
  }
  Eigen::MatrixXcd space_phase(nx, nx);
  for (int kx = 0; kx < nx; ++kx)
    for (int j = 0; j < nx; ++j) space_phase(kx, j) = std::polar(1.0, kTwoPi * kx * j / nx);

  std::vector<cplx> values(q.n_samples);
  parallel_for(q.n_samples, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(q.seed, i));
    std::normal_distribution<double> normal;
    Eigen::VectorXcd b1 = Eigen::VectorXcd::Zero(nx), b2 = Eigen::VectorXcd::Zero(nx);
    for (int kx = 0; kx < nx; ++kx)
      for (int kt = 0; kt < nt; ++kt) {
        const cplx z = amp(kx, kt) * complex_normal(rng, normal);
        b1[kx] += z * phase1[kt];
        b2[kx] += z * phase2[kt];
      }
    const Eigen::VectorXd psi1 = (space_phase.transpose() * b1).real();
    const Eigen::VectorXd psi2 = (space_phase.transpose() * b2).real();
    values[i] = psi1.dot(w1) * psi2.dot(w2);
  });

  FeynmanKacResult out;
  out.estimate = estimate_mean(std::span<const cplx>(values));

  const double lag = std::abs(q.t - q.t2);
  auto mode_term = [&](int k) {
    const double w = std::sqrt(std::pow(kTwoPi * k / q.length, 2) + q.mass * q.mass);
    return std::exp(-lag * w) / w;
  };
  double cont = q.f.constant * q.f2.constant * mode_term(0);
  for (std::size_t k = 0; k < std::min(q.f.cos_coef.size(), q.f2.cos_coef.size()); ++k)
    cont += q.f.cos_coef[k] * q.f2.cos_coef[k] * mode_term(static_cast<int>(k + 1));
  for (std::size_t k = 0; k < std::min(q.f.sin_coef.size(), q.f2.sin_coef.size()); ++k)
    cont += q.f.sin_coef[k] * q.f2.sin_coef[k] * mode_term(static_cast<int>(k + 1));
  out.continuum = 0.5 * cont;

  // Exact lattice covariance C(x, x') = (1/V) sum_k cos(k.(x - x')) / lambda_k.
  double latt = 0.0;
  for (int kx = 0; kx < nx; ++kx) {
    double time_part = 0.0;
    for (int kt = 0; kt < nt; ++kt) time_part += std::cos(kTwoPi * kt * (n1 - n2) / nt) / lambda(kx, kt);
    cplx f1{0.0, 0.0}, f2{0.0, 0.0};
    for (int j = 0; j < nx; ++j) {
      f1 += w1[j] * space_phase(kx, j);
      f2 += w2[j] * std::conj(space_phase(kx, j));
    }
    latt += (f1 * f2).real() * time_part;
  }
  out.lattice = latt / volume;
  return out;
}

nlohmann::json to_json(const FieldParams& p) {
  return {{"d", p.d},         {"m", p.mass},   {"L0", p.min_length}, {"Linf", p.max_length},
          {"M", p.cutoff},    {"kappa", p.kappa}, {"t_half", p.t_half}, {"dt", p.dt},
          {"n_cells", p.n_cells}, {"seed", p.seed}};
}

}  // namespace sft::measure
