#pragma once

// Cylinder-set sampling of the cut-off free string field and the statistical
// checks of its covariance.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sft/fock.hpp"

namespace sft::measure {

using cplx = std::complex<double>;

struct FieldParams {
  int d = 1;
  double mass = 1.0;
  double min_length = 1.0;  // L0
  double max_length = 2.0;  // Linf
  double cutoff = 2.5;      // M
  double kappa = 4.0;
  double t_half = 1.0;  // samples live on [-t_half, t_half]
  double dt = 0.1;
  int n_cells = 40;  // cells of the length grid
  std::uint64_t seed = 1;

  double dl() const { return (max_length - min_length) / n_cells; }
  int n_times() const;
  double time(int it) const { return -t_half + it * dt; }
  /// Cell centre of length cell il.
  double length(int il) const { return min_length + (il + 0.5) * dl(); }
};

/// Every violated invariant as a readable message; empty when valid.
std::vector<std::string> violations(const FieldParams& p);
void validate(const FieldParams& p);

/// Amplitudes on the (time x length cell x Fock state) lattice.
struct StringFieldSample {
  FieldParams params;
  std::shared_ptr<const fock::FockBasis> basis;
  bool mollified = false;
  std::vector<cplx> amplitudes;

  std::size_t offset(int it, int il, std::size_t s) const {
    return (static_cast<std::size_t>(it) * static_cast<std::size_t>(params.n_cells) + static_cast<std::size_t>(il)) *
               basis->size() +
           s;
  }
  cplx& at(int it, int il, std::size_t s) { return amplitudes[offset(it, il, s)]; }
  const cplx& at(int it, int il, std::size_t s) const { return amplitudes[offset(it, il, s)]; }

  static StringFieldSample zeros(const FieldParams& p, std::shared_ptr<const fock::FockBasis> basis);
};

/// Draws raw samples: per length cell and Fock eigenvector an independent
/// stationary complex Ornstein-Uhlenbeck path in t with
/// E[conj(Psi(t)) Psi(t')] = e^{-omega |t - t'|} / dl and E[Psi Psi'] = 0.
class FreeFieldSampler {
 public:
  explicit FreeFieldSampler(const FieldParams& params);

  const FieldParams& params() const { return params_; }
  const std::shared_ptr<const fock::FockBasis>& basis() const { return basis_; }
  /// Frequency of basis state s on length cell il.
  double frequency(int il, std::size_t s) const { return freq_[static_cast<std::size_t>(il) * basis_->size() + s]; }

  /// Sample number `index`; deterministic in (seed, index).
  StringFieldSample sample(std::uint64_t index) const;

 private:
  FieldParams params_;
  std::shared_ptr<const fock::FockBasis> basis_;
  std::vector<double> freq_;
};

/// Raw sample in one call.
StringFieldSample sample_field(const FieldParams& params, std::uint64_t index = 0);

/// Discrete convolution in length with delta_kappa (zero extension).
StringFieldSample mollify(const StringFieldSample& raw, double kappa);

/// Keeps only components in basis states with H_{L0,m} energy <= cutoff.
StringFieldSample project_energy(const StringFieldSample& s, double cutoff);

/// Keeps only the vacuum component.
StringFieldSample project_vacuum(const StringFieldSample& s);

/// Monte-Carlo mean with batch-means standard error.
struct MCEstimate {
  cplx mean{0.0, 0.0};
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::size_t n = 0;

  double stderr_abs() const;
};

inline constexpr std::size_t kMinBatches = 30;

MCEstimate estimate_mean(std::span<const cplx> values);
MCEstimate estimate_mean(std::span<const double> values);

/// Evaluates f on samples 0..n-1 (in parallel) and returns values in index order.
std::vector<cplx> map_samples(const FreeFieldSampler& sampler, std::size_t n,
                              const std::function<cplx(const StringFieldSample&)>& f);

/// Phi_{v,g,t}(Psi) = sum_cells dl g(l) conj(Psi(t, l)_v).
cplx linear_functional(const StringFieldSample& s, std::size_t state, const Eigen::VectorXd& g, int it);

struct TwoPointQuery {
  std::size_t v = 0;
  Eigen::VectorXd g;
  int it = 0;
  std::size_t v2 = 0;
  Eigen::VectorXd g2;
  int it2 = 0;
};

/// Average of conj(Phi_{v,g,t}) Phi_{v',g',t'} over the samples.
MCEstimate two_point_estimate(std::span<const StringFieldSample> samples, const TwoPointQuery& q);

/// Right side of the two-point identity on the grid:
/// sum_cells dl conj(g) g' <v, e^{-|t-t'| H_l} v'>.
double two_point_analytic(const FreeFieldSampler& sampler, const TwoPointQuery& q);

struct KernelCheck {
  double numeric = 0.0;
  double analytic = 0.0;
  double error_estimate = 0.0;
};

/// (1/2pi) int 2 omega e^{i p tau} / (p^2 + omega^2) dp by quadrature, against e^{-omega |tau|}.
KernelCheck covariance_kernel_check(double omega, double tau, double tolerance = 1e-10);

/// Real trigonometric data on the unit circle in the orthonormal basis
/// {1, sqrt2 cos 2 pi k x, sqrt2 sin 2 pi k x}.
struct TrigData {
  double constant = 0.0;
  std::vector<double> cos_coef;  // k = 1, 2, ...
  std::vector<double> sin_coef;

  double operator()(double x) const;
  int max_mode() const;
};

struct LatticeSpec {
  int n_space = 16;
  int n_time = 512;
  double time_step = 0.05;
};

struct FeynmanKacQuery {
  double length = 1.0;
  double mass = 1.0;
  TrigData f, f2;
  double t = 0.0, t2 = 0.0;
  LatticeSpec lattice;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
};

struct FeynmanKacResult {
  MCEstimate estimate;
  double continuum = 0.0;  // (1/2) <f, e^{-|t-t'| A} / A f'>
  double lattice = 0.0;    // exact expectation on the lattice
};

/// Samples the periodic 2D lattice field with covariance (-Delta + m^2)^{-1}
/// and estimates E[Phi_{f,t} Phi_{f',t'}].
FeynmanKacResult feynman_kac_2d(const FeynmanKacQuery& q);

nlohmann::json to_json(const FieldParams& p);

}  // namespace sft::measure
