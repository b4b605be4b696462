#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sft/error.hpp"
#include "sft/fock.hpp"

using namespace sft;
using namespace sft::fock;

namespace {

FockBasis small_basis(int d = 1, double cutoff = 2.5) { return enumerate_basis({d, 1.0, 1.0, cutoff}); }

}  // namespace

TEST(Omega, ZeroModeIsMass) { EXPECT_DOUBLE_EQ(omega(0, 1.0, 1.0), 1.0); }

TEST(Omega, KnownValues) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(omega(1, 1.0, 1.0), std::sqrt(4 * pi * pi + 1), 1e-14);
  EXPECT_NEAR(omega(1, 1.0, 1.0), 6.3623, 1e-4);
  EXPECT_NEAR(omega(-1, 2.0, 0.5), 3.1811, 1e-4);
  EXPECT_DOUBLE_EQ(omega(-3, 2.0, 0.5), omega(3, 2.0, 0.5));
}

TEST(Omega, RejectsNonpositiveArguments) {
  EXPECT_THROW(omega(0, 0.0, 1.0), DomainError);
  EXPECT_THROW(omega(0, 1.0, -1.0), DomainError);
}

TEST(StateEnergy, AdditiveInCounts) {
  EXPECT_DOUBLE_EQ(state_energy(OccupationState::vacuum(), 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(state_energy(OccupationState({{{0, 1}, 1}}), 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(state_energy(OccupationState({{{0, 1}, 2}}), 1.0, 1.0), 2.0);
}

TEST(Basis, SmallDimensions) {
  EXPECT_EQ(small_basis(1, 0.5).size(), 1u);
  const auto b = small_basis(1, 2.5);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_TRUE(b.state(0).is_vacuum());
  EXPECT_EQ(b.state(1).count({0, 1}), 1);
  EXPECT_EQ(b.state(2).count({0, 1}), 2);
  EXPECT_EQ(b.mode_window(), 0);
  const auto b2 = small_basis(2, 1.5);
  ASSERT_EQ(b2.size(), 3u);
  EXPECT_EQ(b2.state(1).count({0, 1}), 1);
  EXPECT_EQ(b2.state(2).count({0, 2}), 1);
}

TEST(Basis, EnergyBoundsAndOrder) {
  const auto b = enumerate_basis({2, 0.7, 1.0, 14.0});
  const auto e = b.energies(1.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_LE(e[i], 14.0 + 1e-12);
    EXPECT_GE(e[i], 0.7 * b.state(i).total_particles() - 1e-12);
    if (i > 0) EXPECT_LE(e[i - 1], e[i] + 1e-12);
    EXPECT_EQ(b.index_of(b.state(i)), static_cast<std::ptrdiff_t>(i));
  }
}

TEST(Basis, MatchesBruteForceCount) {
  // Brute force over occupation vectors of modes k = -2..2 for d = 1.
  const double m = 1.0, l0 = 1.0, cutoff = 14.0;
  int count = 0;
  for (int a = 0; a <= 14; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c)
        for (int d = 0; d <= 1; ++d)
          for (int e = 0; e <= 1; ++e) {
            const double en = a * omega(0, l0, m) + (b + c) * omega(1, l0, m) + (d + e) * omega(2, l0, m);
            if (en <= cutoff) ++count;
          }
  EXPECT_EQ(enumerate_basis({1, m, l0, cutoff}).size(), static_cast<std::size_t>(count));
}

TEST(Basis, CapacityBound) { EXPECT_THROW(enumerate_basis({3, 0.1, 1.0, 40.0}, 1000), CapacityError); }

TEST(ModeWindow, MinimalWindow) {
  EXPECT_EQ(mode_window(1.0, 1.0, 2.5), 0);
  EXPECT_EQ(mode_window(1.0, 1.0, 6.4), 1);
  EXPECT_EQ(mode_window(2.0, 1.0, 1.0), -1);
}

TEST(Heat, DiagonalExponentials) {
  const auto b = small_basis();
  const auto h = heat_operator(b, 1.0, 1.0, 1.0);
  ASSERT_TRUE(h.is_diagonal());
  EXPECT_NEAR(h.diag()[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(h.diag()[1].real(), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(h.diag()[2].real(), std::exp(-2.0), 1e-15);
  const auto id = heat_operator(b, 1.0, 1.0, 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(id.diag()[i], cplx(1.0, 0.0));
  EXPECT_THROW(heat_operator(b, 1.0, 1.0, -0.1), DomainError);
}

TEST(Heat, SemigroupAndMonotoneInLength) {
  const auto b = enumerate_basis({1, 1.0, 1.0, 15.0});
  const auto prod = heat_operator(b, 1.3, 0.4) * heat_operator(b, 1.3, 0.7);
  const auto direct = heat_operator(b, 1.3, 1.1);
  EXPECT_LT((prod.to_dense() - direct.to_dense()).cwiseAbs().maxCoeff(), 1e-12);
  for (double t : {0.1, 1.0, 3.0}) {
    const auto a1 = heat_operator(b, 1.0, t).diag();
    const auto a2 = heat_operator(b, 2.0, t).diag();
    for (Eigen::Index i = 0; i < a1.size(); ++i) EXPECT_GE(a2[i].real(), a1[i].real());
  }
}

TEST(HeatTrace, OracleValues) {
  EXPECT_NEAR(heat_trace_oracle(1, 1.0, 1.0, 1.0, 0), 1.0 / (1.0 - std::exp(-1.0)), 1e-14);
  EXPECT_NEAR(heat_trace_oracle(1, 1.0, 1.0, 1.0, 0), 1.5820, 1e-4);
  EXPECT_NEAR(heat_trace_oracle(1, 1.0, 1.0, 1.0, 1), 1.5875, 1e-4);
  EXPECT_THROW(heat_trace_oracle(1, 1.0, 1.0, 0.0, 1), DomainError);
}

TEST(HeatTrace, TruncatedTraceApproachesOracle) {
  double previous_gap = 1e300;
  for (double cutoff : {3.0, 6.0, 10.0, 14.0, 20.0}) {
    const auto b = enumerate_basis({1, 1.0, 1.0, cutoff});
    const double trace = heat_operator(b, 1.0, 1.0).diag().sum().real();
    const double oracle = heat_trace_oracle(1, 1.0, 1.0, 1.0, b.mode_window());
    EXPECT_LE(trace, oracle * (1.0 + 1e-14));
    const double gap = (oracle - trace) / oracle;
    EXPECT_LE(gap, previous_gap);
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 1e-6);
}

TEST(Ladder, MatrixElements) {
  const auto b = small_basis();
  const auto create = ladder_matrix(b, {0, 1}, Ladder::create).to_dense();
  const auto annihilate = ladder_matrix(b, {0, 1}, Ladder::annihilate).to_dense();
  EXPECT_NEAR(std::abs(create(2, 1) - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(create(1, 0) - 1.0), 0.0, 1e-15);
  EXPECT_LT(annihilate.col(0).norm(), 1e-15);
  EXPECT_LT((create.adjoint() - annihilate).norm(), 1e-15);
}

TEST(Ladder, CanonicalCommutatorBelowCutoff) {
  const auto b = enumerate_basis({2, 1.0, 1.0, 8.0});
  const int window = b.mode_window();
  for (int p = -window; p <= window; ++p)
    for (int q = -window; q <= window; ++q)
      for (int pol : {1, 2}) {
        const ModeIndex mp{p, pol}, mq{q, 1};
        const auto a = ladder_matrix(b, mp, Ladder::annihilate).to_dense();
        const auto c = ladder_matrix(b, mq, Ladder::create).to_dense();
        const Eigen::MatrixXcd comm = a * c - c * a;
        for (std::size_t i = 0; i < b.size(); ++i) {
          // Both images of state i must stay inside the truncation.
          if (!b.contains(b.state(i).shifted(mq, +1))) continue;
          if (b.state(i).count(mp) > 0 && !b.contains(b.state(i).shifted(mp, -1).shifted(mq, +1))) continue;
          for (std::size_t j = 0; j < b.size(); ++j) {
            const double expect = (i == j && mp == mq) ? 1.0 : 0.0;
            EXPECT_NEAR(std::abs(comm(j, i) - expect), 0.0, 1e-12);
          }
        }
      }
}

TEST(Rotation, PhasesAndGroupLaw) {
  const auto b = enumerate_basis({1, 1.0, 1.0, 15.0});
  const auto id0 = rotation_operator(b, 0.0).diag();
  const auto id1 = rotation_operator(b, 2.0 * std::numbers::pi).diag();
  for (Eigen::Index i = 0; i < id0.size(); ++i) {
    EXPECT_NEAR(std::abs(id0[i] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(id1[i] - 1.0), 0.0, 1e-12);
  }
  const auto r = rotation_operator(b, 0.7) * rotation_operator(b, 6.0);
  const auto direct = rotation_operator(b, std::fmod(6.7, 2.0 * std::numbers::pi));
  EXPECT_LT((r.to_dense() - direct.to_dense()).cwiseAbs().maxCoeff(), 1e-12);
  const auto heat = heat_operator(b, 1.0, 0.3).to_dense();
  const auto rot = rotation_operator(b, 1.1).to_dense();
  EXPECT_LT((heat * rot - rot * heat).cwiseAbs().maxCoeff(), 1e-15);

  const OccupationState one_k1({{{1, 1}, 1}});
  const auto idx = b.index_of(one_k1);
  ASSERT_GE(idx, 0);
  const cplx phase = rotation_operator(b, std::numbers::pi).diag()[idx];
  EXPECT_NEAR(std::abs(phase), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(phase - std::polar(1.0, -std::numbers::pi)), 0.0, 1e-15);
}

TEST(Json, StateDumpIsSortedTriples) {
  const OccupationState s({{{-1, 1}, 2}, {{0, 1}, 1}});
  const auto j = to_json(s);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0][0], -1);
  EXPECT_EQ(j[0][2], 2);
}
