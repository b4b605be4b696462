#pragma once

// Cut-off cubic vertex J, the interaction I = J(Psi, Psi, Psi), the partition
// function Z(lambda) = E exp(i lambda Re I) and the coupled Cauchy diagnostic.

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sft/fock.hpp"
#include "sft/measure.hpp"

namespace sft::interaction {

using cplx = std::complex<double>;
using measure::FieldParams;
using measure::MCEstimate;
using measure::StringFieldSample;

struct VertexParams {
  double epsilon = 0.5;   // heat smoothing
  double t_window = 0.5;  // T: time integral over [-T, T]
  double v = 0.2;         // width of the splitting smear
  int t_stride = 1;       // quadrature step in t, in units of the field's dt
  int l_stride = 1;       // quadrature step in l, in units of the field's cell width

  double dt_q(const FieldParams& f) const { return t_stride * f.dt; }
  double dl_q(const FieldParams& f) const { return l_stride * f.dl(); }
};

std::vector<std::string> violations(const VertexParams& p, const FieldParams& f);
void validate(const VertexParams& p, const FieldParams& f);

struct VertexValue {
  cplx value{0.0, 0.0};
  double stderr_ = 0.0;
  VertexParams params;
};

/// 2 delta_{1/v}(u) theta(-u) with u = l1 + l2 - l; theta(0) = 1.
double smear_profile(double v, double u);

/// Integral of the smear profile over [min, max]^3 in (l1, l2, l).
double smear_mass(double v, double min_length, double max_length);

/// Quadrature data of J on one field grid: (l, l1, l2) cell triples with
/// cell-averaged smear weights, the heat-sandwiched split on each triple and
/// trapezoid weights in t.
class VertexKernel {
 public:
  struct Triple {
    int j = 0, j1 = 0, j2 = 0;  // quadrature cells of l, l1, l2
    double weight = 0.0;        // integral of the smear profile over the cell cube
  };

  VertexKernel(const FieldParams& field, std::shared_ptr<const fock::FockBasis> basis, const VertexParams& params);

  const FieldParams& field() const { return field_; }
  const VertexParams& params() const { return params_; }
  const fock::FockBasis& basis() const { return *basis_; }
  int n_cells() const { return n_cells_; }
  /// Centre of quadrature cell j.
  double length(int j) const;
  const std::vector<Triple>& triples() const { return triples_; }
  /// (e^{-eps H_l1} (x) e^{-eps H_l2}) Gamma(pi) e^{-eps H_l} on triple i, rows b * dim + c.
  const Eigen::MatrixXcd& split(std::size_t i) const { return splits_[i]; }
  /// Native t indices of the quadrature nodes and their trapezoid weights.
  const std::vector<std::pair<int, double>>& time_nodes() const { return time_nodes_; }
  double total_weight() const;

  /// J(psi1, psi2, psi3); conjugate-linear in psi1.
  cplx evaluate(const StringFieldSample& psi1, const StringFieldSample& psi2, const StringFieldSample& psi3) const;

 private:
  Eigen::VectorXcd cell_value(const StringFieldSample& s, int it, int j) const;

  FieldParams field_;
  std::shared_ptr<const fock::FockBasis> basis_;
  VertexParams params_;
  int n_cells_ = 0;
  std::vector<Triple> triples_;
  std::vector<Eigen::MatrixXcd> splits_;
  std::vector<std::pair<int, double>> time_nodes_;
};

cplx vertex_J(const StringFieldSample& psi1, const StringFieldSample& psi2, const StringFieldSample& psi3,
              const VertexParams& params);

/// J(Psi_{M,kappa}, Psi_{M,kappa}, Psi_{M,kappa}) with M, kappa from the field parameters.
VertexValue interaction_I(const StringFieldSample& raw, const VertexKernel& kernel);
VertexValue interaction_I(const StringFieldSample& raw, const VertexParams& params);

/// Interaction of the vacuum component alone.
VertexValue projected_interaction(const StringFieldSample& raw, const VertexKernel& kernel);

/// Bare integral over a uniform n^3 grid of twists theta_i = offset + 2 pi i / n
/// of J(R(t1) Psi, R(t2) Psi, R(t3) Psi); n = 1 gives (2 pi)^3 I.
VertexValue twisted_interaction(const StringFieldSample& raw, const VertexKernel& kernel, int n_theta,
                                double offset = 0.0);

struct ZPoint {
  double lambda = 0.0;
  cplx z{1.0, 0.0};
  double stderr_ = 0.0;
};

/// Z(lambda) for every lambda from the same samples 0..n-1.
std::vector<ZPoint> partition_Z(std::span<const double> lambdas, std::size_t n_samples,
                                const measure::FreeFieldSampler& sampler, const VertexParams& params);

/// Z from precomputed values of I.
std::vector<ZPoint> partition_from_values(std::span<const double> lambdas, std::span<const cplx> values);

struct CutoffLevel {
  double cutoff = 0.0;  // M
  double kappa = 1.0;
};

/// E|I_{M,kappa} - I_{M',kappa'}|^2 for consecutive levels of a schedule,
/// all from common samples drawn at the largest cutoff.
std::vector<MCEstimate> cauchy_schedule(std::span<const CutoffLevel> levels, std::size_t n_samples,
                                        const FieldParams& field, const VertexParams& params);

MCEstimate cauchy_l2_check(const CutoffLevel& a, const CutoffLevel& b, std::size_t n_samples,
                           const FieldParams& field, const VertexParams& params);

nlohmann::json to_json(const VertexParams& p);

}  // namespace sft::interaction
