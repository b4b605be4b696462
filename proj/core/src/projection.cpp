#include "sft/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sft/error.hpp"

namespace sft::projection {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Creation images a*(mode)|i> within one basis: target index (or -1) and sqrt(n+1).
struct CreationTable {
  int window = -1;
  int d = 1;
  std::vector<std::vector<std::pair<std::ptrdiff_t, double>>> by_mode;  // [mode][state]

  explicit CreationTable(const fock::FockBasis& basis) : window(basis.mode_window()), d(basis.params().d) {
    if (window < 0) return;
    by_mode.resize(static_cast<std::size_t>((2 * window + 1) * d));
    for (int k = -window; k <= window; ++k) {
      for (int pol = 1; pol <= d; ++pol) {
        auto& row = by_mode[mode_slot(k, pol)];
        row.reserve(basis.size());
        const fock::ModeIndex mode{k, pol};
        for (const auto& s : basis.states()) {
          row.emplace_back(basis.index_of(s.shifted(mode, +1)), std::sqrt(static_cast<double>(s.count(mode) + 1)));
        }
      }
    }
  }

  std::size_t mode_slot(int k, int pol) const {
    return static_cast<std::size_t>((k + window) * d + (pol - 1));
  }
};

}  // namespace

void validate(const SplitSpec& s, double min_length, double max_length) {
  if (!(s.l1 > 0.0 && s.l2 > 0.0 && s.l > 0.0)) throw DomainError("split lengths must be strictly positive");
  if (s.l1 + s.l2 > s.l * (1.0 + 1e-12)) throw DomainError("split requires l1 + l2 <= l");
  if (max_length > 0.0) {
    for (double x : {s.l1, s.l2, s.l})
      if (x < min_length * (1.0 - 1e-12) || x > max_length * (1.0 + 1e-12))
        throw DomainError("split length outside [L0, Linf]");
  }
}

cplx unit_fourier_integral(double a) {
  const double z = kTwoPi * a;
  if (std::abs(z) < 1e-6) {
    // Taylor series of (e^{iz} - 1) / (iz).
    const cplx iz{0.0, z};
    return 1.0 + iz / 2.0 + iz * iz / 6.0 + iz * iz * iz / 24.0;
  }
  return (std::polar(1.0, z) - 1.0) / cplx{0.0, z};
}

L2Matrix l2_split_matrix(const SplitSpec& spec, int window) {
  validate(spec);
  if (window < 0) throw DomainError("mode window must be >= 0");
  const int n = 2 * window + 1;
  const double r1 = spec.l1 / spec.l;
  const double r2 = spec.l2 / spec.l;
  const double shift = 1.0 - r2;
  L2Matrix out;
  out.window = window;
  out.spec = spec;
  out.first.resize(n, n);
  out.second.resize(n, n);
  for (int q = -window; q <= window; ++q) {
    for (int p = -window; p <= window; ++p) {
      out.first(q + window, p + window) = std::sqrt(r1) * unit_fourier_integral(p * r1 - q);
      out.second(q + window, p + window) =
          std::sqrt(r2) * std::polar(1.0, kTwoPi * p * shift) * unit_fourier_integral(p * r2 - q);
    }
  }
  return out;
}

Eigen::MatrixXcd L2Matrix::stacked() const {
  Eigen::MatrixXcd m(first.rows() + second.rows(), first.cols());
  m << first, second;
  return m;
}

double L2Matrix::operator_norm() const { return projection::operator_norm(stacked()); }

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

cplx split_adjoint_value(const SplitSpec& spec, const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2, double x) {
  const double r1 = spec.l1 / spec.l;
  const double r2 = spec.l2 / spec.l;
  auto eval = [](const Eigen::VectorXcd& h, double y) {
    const int window = static_cast<int>((h.size() - 1) / 2);
    cplx v{0.0, 0.0};
    for (int q = -window; q <= window; ++q) v += h[q + window] * std::polar(1.0, kTwoPi * q * y);
    return v;
  };
  cplx v{0.0, 0.0};
  if (x >= 0.0 && x <= r1) v += eval(h1, x / r1) / std::sqrt(r1);
  if (x >= 1.0 - r2 && x <= 1.0) v += eval(h2, (x - (1.0 - r2)) / r2) / std::sqrt(r2);
  return v;
}

SingleParticleMap SingleParticleMap::from_split(const L2Matrix& m) {
  return {m.window, 2, m.stacked()};
}

SingleParticleMap SingleParticleMap::square(Eigen::MatrixXcd a) {
  if (a.rows() != a.cols() || a.rows() % 2 == 0) throw DomainError("square map needs an odd square matrix");
  const int window = static_cast<int>((a.rows() - 1) / 2);
  return {window, 1, std::move(a)};
}

fock::TruncatedOperator second_quantize(const SingleParticleMap& a, const fock::FockBasis& domain,
                                        const fock::FockBasis& codomain) {
  if (a.copies != 1 && a.copies != 2) throw UsageError("second quantization supports 1 or 2 target copies");
  const int n_modes = 2 * a.window + 1;
  if (a.matrix.cols() != n_modes || a.matrix.rows() != a.copies * n_modes)
    throw UsageError("single-particle matrix shape does not match its window");
  if (a.window < std::max(domain.mode_window(), codomain.mode_window()))
    throw UsageError("single-particle window smaller than the Fock mode window");
  if (domain.params().d != codomain.params().d) throw UsageError("domain and codomain polarization counts differ");
  const double norm = operator_norm(a.matrix);
  if (norm > 1.0 + kNormTolerance)
    throw DomainError("single-particle map has norm " + std::to_string(norm) +
                      " > 1; its second quantization is unbounded");

  const CreationTable table(codomain);
  const auto dim_c = static_cast<Eigen::Index>(codomain.size());
  const Eigen::Index out_dim = a.copies == 1 ? dim_c : dim_c * dim_c;
  const auto dim_d = static_cast<Eigen::Index>(domain.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, dim_d);

  const int kc = codomain.mode_window();
  Eigen::VectorXcd vec(out_dim), next(out_dim);
  for (Eigen::Index col = 0; col < dim_d; ++col) {
    vec.setZero();
    vec[0] = 1.0;  // vacuum (x) vacuum sits at index 0 in both layouts
    double norm_factor = 1.0;
    for (const auto& [mode, count] : domain.state(static_cast<std::size_t>(col)).entries()) {
      for (int c = 1; c <= count; ++c) norm_factor *= c;
      for (int rep = 0; rep < count; ++rep) {
        next.setZero();
        const int p_col = mode.k + a.window;
        for (Eigen::Index idx = 0; idx < out_dim; ++idx) {
          const cplx amp = vec[idx];
          if (amp == cplx{0.0, 0.0}) continue;
          for (int copy = 0; copy < a.copies; ++copy) {
            for (int q = -kc; q <= kc; ++q) {
              const cplx coeff = a.matrix(copy * n_modes + q + a.window, p_col);
              if (coeff == cplx{0.0, 0.0}) continue;
              const auto& row = table.by_mode[table.mode_slot(q, mode.pol)];
              if (a.copies == 1) {
                const auto& [target, f] = row[static_cast<std::size_t>(idx)];
                if (target >= 0) next[target] += amp * coeff * f;
              } else {
                const Eigen::Index i1 = idx / dim_c;
                const Eigen::Index i2 = idx % dim_c;
                const Eigen::Index src = copy == 0 ? i1 : i2;
                const auto& [target, f] = row[static_cast<std::size_t>(src)];
                if (target < 0) continue;
                const Eigen::Index dst = copy == 0 ? target * dim_c + i2 : i1 * dim_c + target;
                next[dst] += amp * coeff * f;
              }
            }
          }
        }
        std::swap(vec, next);
      }
    }
    out.col(col) = vec / std::sqrt(norm_factor);
  }
  return fock::TruncatedOperator::dense(std::move(out));
}

Eigen::MatrixXcd sandwiched_split(const SmoothingParams& p, const SplitSpec& spec, const fock::FockBasis& basis) {
  for (double alpha : {p.alpha1, p.alpha2, p.alpha3})
    if (!(alpha >= 0.0)) throw DomainError("smoothing times must be >= 0");
  const int window = std::max(basis.mode_window(), 0);
  const auto gamma = second_quantize(SingleParticleMap::from_split(l2_split_matrix(spec, window)), basis, basis);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const Eigen::VectorXd e1 = basis.energies(spec.l1, p.m1);
  const Eigen::VectorXd e2 = basis.energies(spec.l2, p.m2);
  const Eigen::VectorXd e3 = basis.energies(spec.l, p.m3);
  Eigen::MatrixXcd g = gamma.to_dense();
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g.row(i * dim + j) *= std::exp(-p.alpha1 * e1[i] - p.alpha2 * e2[j]);
  for (Eigen::Index c = 0; c < dim; ++c) g.col(c) *= std::exp(-p.alpha3 * e3[c]);
  return g;
}

fock::TruncatedOperator smoothed_family(const SmoothingParams& p, const SplitSpec& spec,
                                        const fock::FockBasis& basis) {
  for (double alpha : {p.alpha1, p.alpha2, p.alpha3})
    if (!(alpha > 0.0)) throw DomainError("smoothed family requires every alpha > 0");
  return fock::TruncatedOperator::dense(sandwiched_split(p, spec, basis));
}

nlohmann::json to_json(const SplitSpec& spec) {
  return {{"l1", spec.l1}, {"l2", spec.l2}, {"l", spec.l}};
}

}  // namespace sft::projection
