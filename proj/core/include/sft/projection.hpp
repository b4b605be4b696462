#pragma once

// String splitting: a loop of length l restricted to [0, l1] and [l - l2, l],
// each piece rescaled to unit length, and its second quantization F -> F (x) F.

#include <complex>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sft/fock.hpp"

namespace sft::projection {

using cplx = std::complex<double>;

struct SplitSpec {
  double l1 = 0.0;
  double l2 = 0.0;
  double l = 0.0;
};

/// Throws DomainError unless 0 < l1, l2 and l1 + l2 <= l. The optional box
/// [min_length, max_length] is checked when max_length > 0.
void validate(const SplitSpec& spec, double min_length = 0.0, double max_length = 0.0);

/// Single-particle matrix of the split on Fourier labels {-K..K}. Entry (q, p)
/// of block c is <e_q, pi_c e_p> with e_p(x) = e^{2 pi i p x}.
struct L2Matrix {
  int window = 0;
  SplitSpec spec;
  Eigen::MatrixXcd first;   // target copy 1
  Eigen::MatrixXcd second;  // target copy 2

  /// Both blocks stacked: rows [first; second].
  Eigen::MatrixXcd stacked() const;
  double operator_norm() const;
};

L2Matrix l2_split_matrix(const SplitSpec& spec, int window);

/// int_0^1 e^{2 pi i a x} dx.
cplx unit_fourier_integral(double a);

/// Evaluates (pi^* h)(x) for a target pair h = (h1, h2) given by Fourier
/// coefficients on {-K..K}. pi^* extends each piece by zero.
cplx split_adjoint_value(const SplitSpec& spec, const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2, double x);

/// A contraction on L2(S^1) given on Fourier labels {-K..K}, mapping into
/// `copies` (1 or 2) target copies stacked by rows. Polarizations are carried
/// through unchanged.
struct SingleParticleMap {
  int window = 0;
  int copies = 1;
  Eigen::MatrixXcd matrix;  // (copies * (2K+1)) x (2K+1)

  static SingleParticleMap from_split(const L2Matrix& m);
  static SingleParticleMap square(Eigen::MatrixXcd a);
};

inline constexpr double kNormTolerance = 1e-9;

/// Matrix of Gamma(A) from `domain` into `codomain` (copies == 1) or
/// codomain (x) codomain (copies == 2, row index i * dim + j). Built by pushing
/// creation operators through A and dropping every image above the cutoff.
fock::TruncatedOperator second_quantize(const SingleParticleMap& a, const fock::FockBasis& domain,
                                        const fock::FockBasis& codomain);

struct SmoothingParams {
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;
};

/// (e^{-a1 H_{l1,m1}} (x) e^{-a2 H_{l2,m2}}) Gamma(pi) e^{-a3 H_{l,m3}} on F_M -> F_M (x) F_M.
/// Requires every alpha > 0.
fock::TruncatedOperator smoothed_family(const SmoothingParams& p, const SplitSpec& spec,
                                        const fock::FockBasis& basis);

/// Same operator with alpha >= 0 allowed; used by the vertex where the
/// smoothing time may be zero in limiting checks.
Eigen::MatrixXcd sandwiched_split(const SmoothingParams& p, const SplitSpec& spec, const fock::FockBasis& basis);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

nlohmann::json to_json(const SplitSpec& spec);

}  // namespace sft::projection
