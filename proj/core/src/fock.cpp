#include "sft/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sft/error.hpp"

namespace sft::fock {

namespace {

constexpr double kEnergyTol = 1e-12;

bool energy_leq(double e, double cutoff) { return e <= cutoff + kEnergyTol * std::max(1.0, cutoff); }

void check_positive(double length, double mass) {
  if (!(length > 0.0)) throw DomainError("loop length must be positive, got " + std::to_string(length));
  if (!(mass > 0.0)) throw DomainError("mass must be positive, got " + std::to_string(mass));
}

}  // namespace

OccupationState::OccupationState(std::vector<std::pair<ModeIndex, int>> occ) : occ_(std::move(occ)) {
  std::sort(occ_.begin(), occ_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<ModeIndex, int>> merged;
  for (const auto& [mode, n] : occ_) {
    if (n < 0) throw DomainError("negative occupation number");
    if (!merged.empty() && merged.back().first == mode) {
      merged.back().second += n;
    } else {
      merged.emplace_back(mode, n);
    }
  }
  std::erase_if(merged, [](const auto& e) { return e.second == 0; });
  occ_ = std::move(merged);
}

int OccupationState::count(const ModeIndex& mode) const {
  auto it = std::lower_bound(occ_.begin(), occ_.end(), mode,
                             [](const auto& e, const ModeIndex& m) { return e.first < m; });
  return (it != occ_.end() && it->first == mode) ? it->second : 0;
}

int OccupationState::total_particles() const {
  int n = 0;
  for (const auto& e : occ_) n += e.second;
  return n;
}

int OccupationState::total_momentum() const {
  int p = 0;
  for (const auto& [mode, n] : occ_) p += mode.k * n;
  return p;
}

OccupationState OccupationState::shifted(const ModeIndex& mode, int delta) const {
  OccupationState out = *this;
  auto it = std::lower_bound(out.occ_.begin(), out.occ_.end(), mode,
                             [](const auto& e, const ModeIndex& m) { return e.first < m; });
  if (it != out.occ_.end() && it->first == mode) {
    it->second += delta;
    if (it->second < 0) throw DomainError("annihilation below zero occupation");
    if (it->second == 0) out.occ_.erase(it);
  } else {
    if (delta < 0) throw DomainError("annihilation below zero occupation");
    if (delta > 0) out.occ_.insert(it, {mode, delta});
  }
  return out;
}

double omega(int k, double length, double mass) {
  check_positive(length, mass);
  const double p = 2.0 * std::numbers::pi * k / length;
  return std::sqrt(p * p + mass * mass);
}

double state_energy(const OccupationState& s, double length, double mass) {
  check_positive(length, mass);
  double e = 0.0;
  for (const auto& [mode, n] : s.entries()) e += n * omega(mode.k, length, mass);
  return e;
}

FockBasis::FockBasis(BasisParams params, std::vector<OccupationState> states, int mode_window)
    : params_(params), states_(std::move(states)), window_(mode_window) {
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(states_[i], i);
}

std::ptrdiff_t FockBasis::index_of(const OccupationState& s) const {
  auto it = lookup_.find(s);
  return it == lookup_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

Eigen::VectorXd FockBasis::energies(double length, double mass) const {
  Eigen::VectorXd e(static_cast<Eigen::Index>(states_.size()));
  for (std::size_t i = 0; i < states_.size(); ++i) e[static_cast<Eigen::Index>(i)] = state_energy(states_[i], length, mass);
  return e;
}

int mode_window(double mass, double min_length, double cutoff) {
  check_positive(min_length, mass);
  if (!energy_leq(mass, cutoff)) return -1;
  int k = 0;
  while (energy_leq(omega(k + 1, min_length, mass), cutoff)) ++k;
  return k;
}

FockBasis enumerate_basis(const BasisParams& params, std::size_t max_size) {
  if (params.d < 1) throw DomainError("polarization count d must be >= 1");
  check_positive(params.min_length, params.mass);
  if (!(params.cutoff >= 0.0)) throw DomainError("energy cutoff M must be >= 0");

  const int window = mode_window(params.mass, params.min_length, params.cutoff);
  std::vector<ModeIndex> modes;
  for (int k = -std::max(window, -1); k <= window; ++k)
    for (int pol = 1; pol <= params.d; ++pol) modes.push_back({k, pol});
  if (window < 0) modes.clear();

  std::vector<double> freq;
  for (const auto& m : modes) freq.push_back(omega(m.k, params.min_length, params.mass));

  std::vector<OccupationState> states;
  std::vector<std::pair<ModeIndex, int>> current;
  auto recurse = [&](auto&& self, std::size_t i, double used) -> void {
    if (i == modes.size()) {
      if (states.size() >= max_size)
        throw CapacityError("Fock basis exceeds the configured size bound of " + std::to_string(max_size) +
                            " states (lower the cutoff M or raise the bound)");
      states.emplace_back(current);
      return;
    }
    for (int n = 0;; ++n) {
      const double e = used + n * freq[i];
      if (!energy_leq(e, params.cutoff)) break;
      if (n > 0) current.emplace_back(modes[i], n);
      self(self, i + 1, e);
      if (n > 0) current.pop_back();
    }
  };
  recurse(recurse, 0, 0.0);

  std::vector<std::pair<double, OccupationState>> keyed;
  keyed.reserve(states.size());
  for (auto& s : states) keyed.emplace_back(state_energy(s, params.min_length, params.mass), std::move(s));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    const double tol = kEnergyTol * (1.0 + std::max(a.first, b.first));
    if (std::abs(a.first - b.first) > tol) return a.first < b.first;
    return a.second < b.second;
  });
  states.clear();
  for (auto& [e, s] : keyed) states.push_back(std::move(s));
  return FockBasis(params, std::move(states), window);
}

TruncatedOperator TruncatedOperator::diagonal(Eigen::VectorXcd diag) {
  TruncatedOperator op;
  op.is_diagonal_ = true;
  op.diag_ = std::move(diag);
  return op;
}

TruncatedOperator TruncatedOperator::dense(Eigen::MatrixXcd matrix) {
  TruncatedOperator op;
  op.is_diagonal_ = false;
  op.dense_ = std::move(matrix);
  return op;
}

const Eigen::VectorXcd& TruncatedOperator::diag() const {
  if (!is_diagonal_) throw UsageError("operator is not stored in diagonal form");
  return diag_;
}

Eigen::MatrixXcd TruncatedOperator::to_dense() const {
  if (!is_diagonal_) return dense_;
  return diag_.asDiagonal();
}

cplx TruncatedOperator::operator()(Eigen::Index i, Eigen::Index j) const {
  if (is_diagonal_) return i == j ? diag_[i] : cplx{0.0, 0.0};
  return dense_(i, j);
}

Eigen::VectorXcd TruncatedOperator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != cols()) throw UsageError("operator/vector dimension mismatch");
  if (is_diagonal_) return diag_.cwiseProduct(v);
  return dense_ * v;
}

TruncatedOperator TruncatedOperator::operator*(const TruncatedOperator& rhs) const {
  if (cols() != rhs.rows()) throw UsageError("operator dimension mismatch in product");
  if (is_diagonal_ && rhs.is_diagonal_) return diagonal(diag_.cwiseProduct(rhs.diag_));
  if (is_diagonal_) return dense(diag_.asDiagonal() * rhs.dense_);
  if (rhs.is_diagonal_) return dense(dense_ * rhs.diag_.asDiagonal());
  return dense(dense_ * rhs.dense_);
}

TruncatedOperator heat_operator(const FockBasis& basis, double length, double mass, double t) {
  if (!(t >= 0.0)) throw DomainError("heat semigroup time must be >= 0");
  const Eigen::VectorXd e = basis.energies(length, mass);
  return TruncatedOperator::diagonal((-t * e.array()).exp().cast<cplx>().matrix());
}

double heat_trace_oracle(int d, double length, double mass, double t, int window) {
  if (!(t > 0.0)) throw DomainError("heat trace requires t > 0");
  if (d < 1) throw DomainError("polarization count d must be >= 1");
  double log_trace = 0.0;
  for (int k = -window; k <= window; ++k) log_trace -= d * std::log1p(-std::exp(-t * omega(k, length, mass)));
  return std::exp(log_trace);
}

TruncatedOperator ladder_matrix(const FockBasis& basis, const ModeIndex& mode, Ladder which) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& s = basis.state(static_cast<std::size_t>(j));
    const int occ = s.count(mode);
    if (which == Ladder::annihilate) {
      if (occ == 0) continue;
      const auto i = basis.index_of(s.shifted(mode, -1));
      if (i >= 0) a(i, j) = std::sqrt(static_cast<double>(occ));
    } else {
      const auto i = basis.index_of(s.shifted(mode, +1));
      if (i >= 0) a(i, j) = std::sqrt(static_cast<double>(occ + 1));
    }
  }
  return TruncatedOperator::dense(std::move(a));
}

TruncatedOperator rotation_operator(const FockBasis& basis, double theta) {
  Eigen::VectorXcd phase(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    phase[static_cast<Eigen::Index>(i)] = std::polar(1.0, -theta * basis.state(i).total_momentum());
  return TruncatedOperator::diagonal(std::move(phase));
}

nlohmann::json to_json(const OccupationState& s) {
  auto out = nlohmann::json::array();
  for (const auto& [mode, n] : s.entries()) out.push_back({mode.k, mode.pol, n});
  return out;
}

nlohmann::json to_json(const FockBasis& basis) {
  const auto& p = basis.params();
  nlohmann::json j;
  j["params"] = {{"d", p.d}, {"m", p.mass}, {"L0", p.min_length}, {"M", p.cutoff}};
  j["mode_window"] = basis.mode_window();
  j["dimension"] = basis.size();
  auto states = nlohmann::json::array();
  for (const auto& s : basis.states()) states.push_back(to_json(s));
  j["states"] = std::move(states);
  return j;
}

nlohmann::json to_json(const TruncatedOperator& op) {
  nlohmann::json j;
  j["rows"] = op.rows();
  j["cols"] = op.cols();
  j["form"] = op.is_diagonal() ? "diagonal" : "dense";
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  if (op.is_diagonal()) {
    for (Eigen::Index i = 0; i < op.rows(); ++i) {
      re.push_back(op.diag()[i].real());
      im.push_back(op.diag()[i].imag());
    }
  } else {
    for (Eigen::Index i = 0; i < op.rows(); ++i) {
      auto rr = nlohmann::json::array();
      auto ri = nlohmann::json::array();
      for (Eigen::Index k = 0; k < op.cols(); ++k) {
        rr.push_back(op(i, k).real());
        ri.push_back(op(i, k).imag());
      }
      re.push_back(std::move(rr));
      im.push_back(std::move(ri));
    }
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

}  // namespace sft::fock
