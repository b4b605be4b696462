#pragma once

// Dense complex tensors with labeled indices and greedy pairwise contraction.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sft::tn {

using cplx = std::complex<double>;

/// Row-major dense tensor; labels[i] names index i. Equal labels on two
/// tensors are summed when they are contracted.
struct Tensor {
  std::vector<int> labels;
  std::vector<Eigen::Index> dims;
  Eigen::VectorXcd data;

  static Tensor scalar(cplx value);
  Eigen::Index size() const;
  bool is_scalar() const { return labels.empty(); }
};

/// Tensor with its indices reordered to `labels` (a permutation of t.labels).
Tensor permute(const Tensor& t, const std::vector<int>& labels);

/// Sums over the labels shared by a and b; result indices are a's free
/// labels followed by b's.
Tensor contract(const Tensor& a, const Tensor& b);

inline constexpr Eigen::Index kDefaultMaxIntermediate = 50'000'000;

/// Contracts the whole network. At each step the pair with the smallest
/// result among pairs sharing a label is contracted (outer products only when
/// no pair shares one). Throws CapacityError when an intermediate would exceed
/// max_elements.
Tensor contract_network(std::vector<Tensor> tensors, Eigen::Index max_elements = kDefaultMaxIntermediate);

}  // namespace sft::tn
