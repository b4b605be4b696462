#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "sft/conjecture.hpp"
#include "sft/determinant.hpp"
#include "sft/error.hpp"
#include "sft/fem.hpp"
#include "sft/surface_mesh.hpp"

using namespace sft;
using namespace sft::surfaces;
using graphs::EdgeLabel;
using graphs::RibbonGraph;

namespace {

constexpr double kPi = std::numbers::pi;

// Widths consistent with wide = narrow1 + narrow2 for an n = 1 graph without tadpoles.
std::vector<EdgeLabel> pants_labels(const RibbonGraph& g, double n1, double n2, double t = 0.4) {
  std::vector<EdgeLabel> out;
  for (const auto& e : g.edges()) {
    const int slot = e.conj.slot;
    const bool wide = slot == 0 && g.kind(e.conj.vertex) == graphs::VertexKind::split;
    const int narrow_slot = g.kind(e.conj.vertex) == graphs::VertexKind::join ? e.conj.slot : e.plain.slot;
    out.push_back({t, wide ? n1 + n2 : (narrow_slot == 1 ? n1 : n2)});
  }
  return out;
}

std::vector<RibbonGraph> buildable_genus_two() {
  std::vector<RibbonGraph> out;
  for (const auto& g : graphs::enumerate_graphs(1))
    if (!g.has_tadpole()) out.push_back(g);
  return out;
}

}  // namespace

TEST(Mesh, GenusTwoEulerCharacteristic) {
  SurfaceParams p;
  p.h = 0.1;
  for (const auto& g : buildable_genus_two()) {
    const auto mesh = build_surface(g, pants_labels(g, 1.0, 1.2), p);
    EXPECT_EQ(mesh.euler_characteristic(), -2);
    EXPECT_EQ(mesh.euler_characteristic(), 2 - 2 * graphs::genus(g));
    EXPECT_TRUE(mesh.closed_and_oriented());
    EXPECT_TRUE(mesh.connected());
  }
}

TEST(Mesh, TadpolesViolateTheWidthConstraint) {
  for (const auto& g : graphs::enumerate_graphs(1)) {
    if (!g.has_tadpole()) continue;
    std::vector<EdgeLabel> labels(3, {0.4, 1.2});
    try {
      build_surface(g, labels, {});
      FAIL() << "tadpole surface built";
    } catch (const ConstraintError& e) {
      EXPECT_NE(std::string(e.what()).find("vertex"), std::string::npos);
    }
  }
}

TEST(Mesh, AreaIsAdditive) {
  SurfaceParams p;
  p.h = 0.1;
  p.epsilon = 0.3;
  for (const auto& g : buildable_genus_two()) {
    const auto labels = pants_labels(g, 1.1, 0.9, 0.7);
    const auto mesh = build_surface(g, labels, p);
    // Tubes t_e x l_e plus, per vertex, epsilon times the three widths.
    double expected = 0.0;
    for (const auto& l : labels) expected += l.t * l.length;
    expected += 2 * p.epsilon * (2.0 + 1.1 + 0.9);
    EXPECT_NEAR(mesh.area(), expected, 1e-6 * expected);
  }
}

TEST(Mesh, AngleSums) {
  SurfaceParams p;
  p.h = 0.1;
  for (const auto& g : buildable_genus_two()) {
    const auto mesh = build_surface(g, pants_labels(g, 1.0, 1.2), p);
    const auto angles = mesh.angle_sums();
    std::vector<bool> cone(angles.size(), false);
    for (int c : mesh.cone_points) cone[static_cast<std::size_t>(c)] = true;
    ASSERT_EQ(mesh.cone_points.size(), 2u);
    for (std::size_t i = 0; i < angles.size(); ++i) EXPECT_NEAR(angles[i], cone[i] ? 4 * kPi : 2 * kPi, 1e-9) << i;
  }
}

TEST(Mesh, WidthsAreProjectedOntoTheConstraint) {
  const auto g = buildable_genus_two()[0];
  auto labels = pants_labels(g, 1.0, 1.2);
  labels[0].length += 0.05;
  const auto w = constrained_widths(g, labels);
  double wide = 0.0, narrow = 0.0;
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) (edges[e].conj.slot == 0 && g.kind(edges[e].conj.vertex) == graphs::VertexKind::split ? wide : narrow) += w[e];
  EXPECT_NEAR(wide, narrow, 1e-12);
}

TEST(Mesh, DeterministicAndRoundTrips) {
  const auto g = buildable_genus_two()[1];
  SurfaceParams p;
  p.h = 0.15;
  p.twists = {0.0, 0.3, 0.0};
  const auto a = build_surface(g, pants_labels(g, 1.0, 1.2), p);
  const auto b = build_surface(g, pants_labels(g, 1.0, 1.2), p);
  std::ostringstream sa, sb;
  write_mesh(sa, a);
  write_mesh(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  std::istringstream in(sa.str());
  const auto c = read_mesh(in);
  EXPECT_EQ(c.n_triangles(), a.n_triangles());
  EXPECT_EQ(c.cone_points, a.cone_points);
  EXPECT_NEAR(c.area(), a.area(), 1e-12);
  EXPECT_EQ(c.euler_characteristic(), -2);
}

TEST(Mesh, RejectsDisconnectedGraphs) {
  for (const auto& g : graphs::enumerate_graphs(2))
    if (!g.connected()) {
      EXPECT_THROW(build_surface(g, std::vector<EdgeLabel>(6, {0.4, 1.0}), {}), UsageError);
      break;
    }
}

TEST(Torus, Topology) {
  const auto mesh = flat_torus(2.0, 1.5, 0.1);
  EXPECT_EQ(mesh.euler_characteristic(), 0);
  EXPECT_TRUE(mesh.closed_and_oriented());
  EXPECT_NEAR(mesh.area(), 3.0, 1e-12);
  for (double a : mesh.angle_sums()) EXPECT_NEAR(a, 2 * kPi, 1e-10);
}

TEST(Fem, TorusSpectrumConvergesAtSecondOrder) {
  const double L = 2.0, beta = 2.0;
  const auto exact = torus_eigenvalues(L, beta, 0.0, 10);
  std::vector<double> err;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto s = fem_spectrum(flat_torus(L, beta, h), 0.0, 10);
    double e = 0.0;
    for (int k = 1; k < 10; ++k) e = std::max(e, std::abs(s.eigenvalues[static_cast<std::size_t>(k)] - exact[static_cast<std::size_t>(k)]));
    EXPECT_GE(s.eigenvalues[0], -1e-9);
    err.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    EXPECT_GE(order, 1.7);
    EXPECT_LE(order, 2.3);
  }
}

TEST(Fem, MassShiftIsExact) {
  const auto mesh = flat_torus(2.0, 1.0, 0.1);
  const auto fem = assemble(mesh);
  const auto a = fem_spectrum(fem, 0.0, 8);
  const auto b = fem_spectrum(fem, 1.7, 8);
  for (int k = 0; k < 8; ++k)
    EXPECT_NEAR(b.eigenvalues[static_cast<std::size_t>(k)], a.eigenvalues[static_cast<std::size_t>(k)] + 1.7 * 1.7, 1e-10);
}

TEST(Fem, SparseAndDenseSolversAgree) {
  const auto small = fem_spectrum(flat_torus(2.0, 2.0, 0.1), 1.0, 12);   // dense path
  const auto large = fem_spectrum(flat_torus(2.0, 2.0, 0.0625), 1.0, 12);  // Lanczos path
  for (int k = 0; k < 12; ++k) EXPECT_NEAR(small.eigenvalues[static_cast<std::size_t>(k)], large.eigenvalues[static_cast<std::size_t>(k)], 0.05 * large.eigenvalues[static_cast<std::size_t>(k)]);
  EXPECT_LT(large.max_residual, 1e-8);
}

TEST(Fem, WeylLaw) {
  SurfaceParams p;
  p.h = 0.08;
  const auto g = buildable_genus_two()[0];
  const auto mesh = build_surface(g, pants_labels(g, 1.0, 1.2), p);
  const auto s = fem_spectrum(mesh, 0.0, 120);
  EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-8);
  const double lambda = s.eigenvalues.back();
  const double weyl = mesh.area() * lambda / (4 * kPi);
  EXPECT_NEAR(120.0 / weyl, 1.0, 0.15);
}

TEST(Determinant, OraclesAgree) {
  for (double L : {1.0, 2.0, 3.0})
    for (double m : {0.5, 1.0, 3.0}) EXPECT_NEAR(torus_logdet_lattice(L, 1.7, m), torus_logdet_modesum(L, 1.7, m), 1e-10);
}

TEST(Determinant, TorusGridWithinTwoPercent) {
  DetSpec spec;
  for (double L : {2.0, 2.5})
    for (double beta : {2.0, 2.5}) {
      const double oracle = torus_logdet_modesum(L, beta, 3.0);
      const auto r = logdet_regularized(flat_torus(L, beta, 0.05), 3.0, spec);
      EXPECT_NEAR(r.log_det, oracle, 0.02 * std::abs(oracle)) << L << " x " << beta;
      EXPECT_LT(r.fit_residual, 1e-2);
    }
}

TEST(Determinant, MassDependenceFollowsTheOracle) {
  const auto mesh = flat_torus(2.0, 2.0, 0.1);
  DetSpec spec;
  spec.count = 300;
  const auto fem = assemble(mesh);
  const auto lo = fem_spectrum(fem, 1.5, spec.count), hi = fem_spectrum(fem, 3.0, spec.count);
  // Every eigenvalue grows with m, so any truncated product does.
  double sum_lo = 0.0, sum_hi = 0.0;
  for (int k = 0; k < 50; ++k) {
    sum_lo += std::log(lo.eigenvalues[static_cast<std::size_t>(k)]);
    sum_hi += std::log(hi.eigenvalues[static_cast<std::size_t>(k)]);
  }
  EXPECT_GT(sum_hi, sum_lo);
  // The regularized determinant need not grow: follow the oracle's sign.
  const double oracle = torus_logdet_modesum(2.0, 2.0, 3.0) - torus_logdet_modesum(2.0, 2.0, 1.5);
  const double fem_change = logdet_from_spectrum(hi.eigenvalues, mesh.area(), 3.0, spec).log_det -
                            logdet_from_spectrum(lo.eigenvalues, mesh.area(), 1.5, spec).log_det;
  EXPECT_EQ(std::signbit(fem_change), std::signbit(oracle));
  EXPECT_NEAR(fem_change, oracle, 0.05 * std::abs(oracle));
}

TEST(Determinant, ShortSpectrumRejected) {
  DetSpec spec;
  spec.count = 10;
  EXPECT_THROW(logdet_regularized(flat_torus(2.0, 2.0, 0.1), 3.0, spec), NumericError);
}

TEST(Determinant, IsometricTriangulationsAgree) {
  DetSpec spec;
  // The same torus with the tube circle along either side.
  const auto a = logdet_regularized(flat_torus(2.0, 2.5, 0.05), 3.0, spec);
  const auto b = logdet_regularized(flat_torus(2.5, 2.0, 0.05), 3.0, spec);
  EXPECT_NEAR(a.log_det, b.log_det, 0.02 * std::abs(a.log_det));
}

TEST(Conjecture, ScanColumnsFiniteAndPositive) {
  const auto g = buildable_genus_two()[0];
  ScanParams p;
  p.surface.h = 0.1;
  p.det.count = 300;
  const auto r = conjecture_scan(g, pants_labels(g, 1.0, 1.2), p);
  ASSERT_EQ(r.schedule.size(), 3u);
  for (const auto& rows : {r.schedule, r.v_scan})
    for (const auto& row : rows) {
      EXPECT_TRUE(std::isfinite(row.left) && row.left > 0.0);
      EXPECT_TRUE(std::isfinite(row.right) && row.right > 0.0);
    }
  EXPECT_TRUE(r.v_trend_increasing);
}
