#pragma once

// Flat glued-cylinder surfaces of labeled ribbon graphs.
//
// Each edge e becomes one flat tube of circumference l_e and length
// |t_e| + 2 epsilon (its own propagation time plus the two epsilon-long
// fixture cylinders at its ends). At a vertex the wide circle is cut into two
// arcs glued to the two narrow circles; both cut points become a single cone
// point of total angle 4 pi.
//
// Tubes run from the vertex holding their plain leg (chart y = 0) to the
// vertex holding their conjugate leg (chart y = length), so every vertex has
// its past legs on top and future legs below.

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sft/activity.hpp"
#include "sft/ribbon_graph.hpp"

namespace sft::surfaces {

struct Triangle {
  std::array<int, 3> v{};
  std::array<Eigen::Vector2d, 3> chart;  // counterclockwise flat coordinates
};

struct SurfaceMesh {
  std::vector<Eigen::Vector2d> coords;  // chart position of each vertex (first chart it appears in)
  std::vector<Triangle> triangles;
  std::vector<int> cone_points;
  nlohmann::json metadata;

  int n_vertices() const { return static_cast<int>(coords.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  /// V - E + F with E counted from triangle sides (valid for closed meshes).
  int euler_characteristic() const;
  double area() const;
  /// Sum of triangle angles at every vertex.
  std::vector<double> angle_sums() const;
  /// Every directed side (u, w) is matched by a side (w, u).
  bool closed_and_oriented() const;
  bool connected() const;
  double max_edge_length() const;
};

struct SurfaceParams {
  double epsilon = 0.5;  // fixture cylinder length
  double h = 0.1;        // target mesh size
  std::vector<double> twists;  // optional per-edge twist of the conjugate end
  int min_ring = 3;            // minimum nodes on any circle
};

/// Widths after imposing wide = narrow1 + narrow2 at every vertex (orthogonal
/// projection of the label widths). Throws ConstraintError naming the vertex
/// whose constraint forces a nonpositive width.
std::vector<double> constrained_widths(const graphs::RibbonGraph& g, const std::vector<graphs::EdgeLabel>& labels);

SurfaceMesh build_surface(const graphs::RibbonGraph& g, const std::vector<graphs::EdgeLabel>& labels,
                          const SurfaceParams& params);

/// Flat torus [0, L) x [0, beta) with about h spacing.
SurfaceMesh flat_torus(double length, double beta, double h);

/// ASCII format: "sftmesh 1", then "vertices N" with "x y" lines, "triangles T"
/// with "i j k x0 y0 x1 y1 x2 y2" lines, "cones C" with one id per line.
void write_mesh(std::ostream& os, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(std::istream& is);

nlohmann::json to_json(const SurfaceParams& p);

}  // namespace sft::surfaces
