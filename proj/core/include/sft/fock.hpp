#pragma once

// Truncated bosonic Fock space over L2(S^1) (x) R^d.
//
// A single-particle mode is a Fourier label k (the function e^{2 pi i k x} on
// the unit-length parametrization of the loop) together with a polarization
// index. On a loop of length l the mode has frequency sqrt((2 pi k / l)^2 + m^2).
// Basis vectors are normalized occupation-number states.

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace sft::fock {

using cplx = std::complex<double>;

struct ModeIndex {
  int k = 0;
  int pol = 1;  // 1..d
  auto operator<=>(const ModeIndex&) const = default;
};

/// Occupation numbers of the occupied modes, sorted by mode. Absent modes
/// have count 0; the empty state is the vacuum.
class OccupationState {
 public:
  OccupationState() = default;
  explicit OccupationState(std::vector<std::pair<ModeIndex, int>> occ);

  static OccupationState vacuum() { return {}; }

  int count(const ModeIndex& mode) const;
  int total_particles() const;
  /// Sum of k over all particles; the phase picked up under rotations.
  int total_momentum() const;
  bool is_vacuum() const { return occ_.empty(); }

  /// State with one more (delta=+1) or one fewer (delta=-1) particle in mode.
  OccupationState shifted(const ModeIndex& mode, int delta) const;

  const std::vector<std::pair<ModeIndex, int>>& entries() const { return occ_; }

  auto operator<=>(const OccupationState&) const = default;

 private:
  std::vector<std::pair<ModeIndex, int>> occ_;
};

/// Single-mode frequency sqrt((2 pi k / l)^2 + m^2).
double omega(int k, double length, double mass);

/// Eigenvalue of H_{l,m} on an occupation state.
double state_energy(const OccupationState& s, double length, double mass);

struct BasisParams {
  int d = 1;
  double mass = 1.0;
  double min_length = 1.0;  // L0
  double cutoff = 0.0;      // M
};

/// All occupation states with energy under H_{L0,m} at most M, ordered by
/// (energy, occupation). The vacuum is always index 0.
class FockBasis {
 public:
  FockBasis(BasisParams params, std::vector<OccupationState> states, int mode_window);

  const BasisParams& params() const { return params_; }
  std::size_t size() const { return states_.size(); }
  const OccupationState& state(std::size_t i) const { return states_[i]; }
  const std::vector<OccupationState>& states() const { return states_; }
  /// Largest |k| with omega(k, L0, m) <= M.
  int mode_window() const { return window_; }

  /// Index of a state, or -1 when the state lies outside the truncation.
  std::ptrdiff_t index_of(const OccupationState& s) const;
  bool contains(const OccupationState& s) const { return index_of(s) >= 0; }

  /// Energies of every basis state under H_{l,m}.
  Eigen::VectorXd energies(double length, double mass) const;
  Eigen::VectorXd energies(double length) const { return energies(length, params_.mass); }

 private:
  BasisParams params_;
  std::vector<OccupationState> states_;
  std::map<OccupationState, std::size_t> lookup_;
  int window_ = 0;
};

inline constexpr std::size_t kDefaultMaxBasisSize = 200000;

/// Smallest K with omega(K+1, L0, m) > M, or -1 when even k=0 exceeds M.
int mode_window(double mass, double min_length, double cutoff);

FockBasis enumerate_basis(const BasisParams& params,
                          std::size_t max_size = kDefaultMaxBasisSize);

/// Dense or diagonal matrix between truncated bases. A diagonal operator is
/// always square.
class TruncatedOperator {
 public:
  static TruncatedOperator diagonal(Eigen::VectorXcd diag);
  static TruncatedOperator dense(Eigen::MatrixXcd matrix);

  bool is_diagonal() const { return is_diagonal_; }
  Eigen::Index rows() const { return is_diagonal_ ? diag_.size() : dense_.rows(); }
  Eigen::Index cols() const { return is_diagonal_ ? diag_.size() : dense_.cols(); }

  const Eigen::VectorXcd& diag() const;
  Eigen::MatrixXcd to_dense() const;
  cplx operator()(Eigen::Index i, Eigen::Index j) const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  TruncatedOperator operator*(const TruncatedOperator& rhs) const;

 private:
  bool is_diagonal_ = true;
  Eigen::VectorXcd diag_;
  Eigen::MatrixXcd dense_;
};

/// e^{-t H_{l,m}}; identity at t = 0.
TruncatedOperator heat_operator(const FockBasis& basis, double length, double mass, double t);
inline TruncatedOperator heat_operator(const FockBasis& basis, double length, double t) {
  return heat_operator(basis, length, basis.params().mass, t);
}

/// Product formula prod_{|k|<=K} (1 - e^{-t omega_k})^{-d} for Tr e^{-tH}.
double heat_trace_oracle(int d, double length, double mass, double t, int window);

enum class Ladder { create, annihilate };

/// Matrix of a(mode) or a*(mode) on the basis; images above the cutoff are dropped.
TruncatedOperator ladder_matrix(const FockBasis& basis, const ModeIndex& mode, Ladder which);

/// Rotation of the loop by angle theta, acting as f -> f(. - theta / 2 pi).
/// A particle in mode k picks up e^{-i k theta}.
TruncatedOperator rotation_operator(const FockBasis& basis, double theta);

nlohmann::json to_json(const OccupationState& s);
nlohmann::json to_json(const FockBasis& basis);
nlohmann::json to_json(const TruncatedOperator& op);

}  // namespace sft::fock
