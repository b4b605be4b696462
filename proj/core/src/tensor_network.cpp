#include "sft/tensor_network.hpp"

#include <algorithm>
#include <string>

#include "sft/error.hpp"

namespace sft::tn {

namespace {

std::ptrdiff_t position(const std::vector<int>& labels, int label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : it - labels.begin();
}

Eigen::Index product(const std::vector<Eigen::Index>& dims) {
  Eigen::Index p = 1;
  for (auto d : dims) p *= d;
  return p;
}

struct Plan {
  std::vector<int> free_a, free_b, shared;
  std::vector<Eigen::Index> dims_a, dims_b, dims_s;
};

Plan plan(const Tensor& a, const Tensor& b) {
  Plan p;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const auto j = position(b.labels, a.labels[i]);
    if (j >= 0) {
      if (a.dims[i] != b.dims[static_cast<std::size_t>(j)])
        throw UsageError("contracted index " + std::to_string(a.labels[i]) + " has mismatched dimensions");
      p.shared.push_back(a.labels[i]);
      p.dims_s.push_back(a.dims[i]);
    } else {
      p.free_a.push_back(a.labels[i]);
      p.dims_a.push_back(a.dims[i]);
    }
  }
  for (std::size_t i = 0; i < b.labels.size(); ++i)
    if (position(a.labels, b.labels[i]) < 0) {
      p.free_b.push_back(b.labels[i]);
      p.dims_b.push_back(b.dims[i]);
    }
  return p;
}

}  // namespace

Tensor Tensor::scalar(cplx value) {
  Tensor t;
  t.data = Eigen::VectorXcd::Constant(1, value);
  return t;
}

Eigen::Index Tensor::size() const { return product(dims); }

Tensor permute(const Tensor& t, const std::vector<int>& labels) {
  if (labels.size() != t.labels.size()) throw UsageError("permutation must list every index");
  if (labels == t.labels) return t;
  const std::size_t rank = labels.size();
  std::vector<std::size_t> source(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const auto j = position(t.labels, labels[i]);
    if (j < 0) throw UsageError("permutation names an unknown index");
    source[i] = static_cast<std::size_t>(j);
  }
  std::vector<Eigen::Index> in_stride(rank, 1);
  for (std::size_t i = rank; i-- > 1;) in_stride[i - 1] = in_stride[i] * t.dims[i];
  Tensor out;
  out.labels = labels;
  out.dims.resize(rank);
  for (std::size_t i = 0; i < rank; ++i) out.dims[i] = t.dims[source[i]];
  out.data.resize(t.data.size());
  std::vector<Eigen::Index> idx(rank, 0);
  for (Eigen::Index flat = 0; flat < out.data.size(); ++flat) {
    Eigen::Index src = 0;
    for (std::size_t i = 0; i < rank; ++i) src += idx[i] * in_stride[source[i]];
    out.data[flat] = t.data[src];
    for (std::size_t i = rank; i-- > 0;) {
      if (++idx[i] < out.dims[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

Tensor contract(const Tensor& a, const Tensor& b) {
  const Plan p = plan(a, b);
  std::vector<int> order_a = p.free_a, order_b = p.shared;
  order_a.insert(order_a.end(), p.shared.begin(), p.shared.end());
  order_b.insert(order_b.end(), p.free_b.begin(), p.free_b.end());
  const Tensor pa = permute(a, order_a);
  const Tensor pb = permute(b, order_b);
  const Eigen::Index m = product(p.dims_a), k = product(p.dims_s), n = product(p.dims_b);
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> ma(pa.data.data(), m, k);
  Eigen::Map<const RowMat> mb(pb.data.data(), k, n);
  Tensor out;
  out.labels = p.free_a;
  out.labels.insert(out.labels.end(), p.free_b.begin(), p.free_b.end());
  out.dims = p.dims_a;
  out.dims.insert(out.dims.end(), p.dims_b.begin(), p.dims_b.end());
  out.data.resize(m * n);
  Eigen::Map<RowMat>(out.data.data(), m, n).noalias() = ma * mb;
  return out;
}

Tensor contract_network(std::vector<Tensor> tensors, Eigen::Index max_elements) {
  if (tensors.empty()) return Tensor::scalar(1.0);
  while (tensors.size() > 1) {
    std::size_t best_i = 0, best_j = 1;
    Eigen::Index best_size = -1;
    bool best_shared = false;
    for (std::size_t i = 0; i < tensors.size(); ++i)
      for (std::size_t j = i + 1; j < tensors.size(); ++j) {
        const Plan p = plan(tensors[i], tensors[j]);
        const bool shared = !p.shared.empty();
        const Eigen::Index size = product(p.dims_a) * product(p.dims_b);
        if (best_size < 0 || (shared && !best_shared) || (shared == best_shared && size < best_size)) {
          best_i = i;
          best_j = j;
          best_size = size;
          best_shared = shared;
        }
      }
    if (best_size > max_elements)
      throw CapacityError("tensor network intermediate of " + std::to_string(best_size) +
                          " elements exceeds the bound " + std::to_string(max_elements));
    Tensor merged = contract(tensors[best_i], tensors[best_j]);
    tensors.erase(tensors.begin() + static_cast<std::ptrdiff_t>(best_j));
    tensors[best_i] = std::move(merged);
  }
  return tensors.front();
}

}  // namespace sft::tn
