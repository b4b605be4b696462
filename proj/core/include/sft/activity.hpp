#pragma once

// Feynman-rule evaluation of ribbon graphs: the exact Gaussian expectation of
// the discretized interaction on its quadrature grid (the moment engine), and
// the continuum activity f_Gamma at fixed edge labels.

#include <complex>
#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sft/interaction.hpp"
#include "sft/ribbon_graph.hpp"
#include "sft/tensor_network.hpp"

namespace sft::graphs {

using cplx = std::complex<double>;

/// Evaluates Wick contractions of the vertex exactly as the Monte-Carlo
/// estimator discretizes it: same Fock basis, cutoff, mollifier matrix, length
/// cells, time nodes and split operators. For a labeled graph the value is
///   sum over vertex times of prod(time weights) * network(vertex tensors, propagators),
/// with the propagator between mollified cell values
///   P_a(J, J'; tau) = sum_k A(J, k) A(J', k) exp(-tau omega_a(l_k)) / dl.
class GridEvaluator {
 public:
  GridEvaluator(const interaction::FieldParams& field, const interaction::VertexParams& params,
                bool vacuum_only = false, Eigen::Index max_elements = tn::kDefaultMaxIntermediate);

  const interaction::VertexKernel& kernel() const { return *kernel_; }
  std::size_t n_states() const { return states_.size(); }

  /// Expectation of the product of vertex factors glued as in g.
  cplx value(const RibbonGraph& g) const;

 private:
  tn::Tensor vertex_tensor(VertexKind kind, int vertex) const;
  const Eigen::MatrixXd& propagator(int slot_a, int slot_b, int lag) const;

  interaction::FieldParams field_;
  std::unique_ptr<interaction::VertexKernel> kernel_;
  std::vector<std::size_t> states_;
  std::vector<int> cells_[3];       // quadrature cells used by each slot
  std::vector<cplx> split_tensor_;  // [wide][narrow1][narrow2] split vertex tensor
  Eigen::MatrixXd average_;         // A: quadrature cells x native cells
  Eigen::MatrixXd omega_;           // native cell x state frequency
  Eigen::Index max_elements_;
  mutable std::map<std::tuple<int, int, int>, Eigen::MatrixXd> propagators_;
};

struct GraphTerm {
  RibbonGraph graph;
  double weight = 0.0;  // orbit size / 2^{2n}
  cplx value{0.0, 0.0};
};

struct MomentResult {
  int order = 0;  // 2n
  double value = 0.0;
  double imag = 0.0;  // should vanish; reported for diagnostics
  std::vector<GraphTerm> terms;
};

/// E[(Re I)^{order}] as a sum over graph classes. Odd orders vanish.
MomentResult wick_moment(int order, const GridEvaluator& evaluator, int max_n = kDefaultMaxOrder);

struct SeriesTerm {
  int n = 0;
  double term = 0.0;
  double partial_sum = 0.0;
};

/// Partial sums of sum_n (i lambda)^{2n} / (2n)! * moment(2n).
std::vector<SeriesTerm> partition_series(double lambda, const std::vector<double>& even_moments);

struct ActivityParams {
  int d = 1;
  double mass = 1.0;
  double min_length = 1.0;
  double max_length = 2.4;
  double cutoff = 2.5;
  double v = 0.2;
  double epsilon = 0.5;
  double kappa = 4.0;  // <= 0 selects point evaluation (kappa -> infinity)
  int quad_points = 32;
  bool vacuum_only = false;
};

struct EdgeLabel {
  double t = 0.0;       // time difference along the edge
  double length = 0.0;  // width l_e
};

struct ActivityResult {
  double value = 0.0;
  double imag = 0.0;
  nlohmann::json params;
};

/// Smeared vertex tensor [wide][narrow1][narrow2] of a split vertex with the
/// given edge widths; join vertices use its complex conjugate.
std::vector<cplx> smeared_vertex(const ActivityParams& p, const fock::FockBasis& basis,
                                 const std::vector<std::size_t>& states, double wide, double narrow1, double narrow2);

/// f_Gamma at edge labels (ordered like g.edges()).
ActivityResult activity_f(const RibbonGraph& g, const std::vector<EdgeLabel>& labels, const ActivityParams& p);

nlohmann::json to_json(const ActivityParams& p);

}  // namespace sft::graphs
