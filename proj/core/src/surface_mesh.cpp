#include "sft/surface_mesh.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include "sft/error.hpp"

namespace sft::surfaces {

using graphs::RibbonGraph;

int SurfaceMesh::euler_characteristic() const {
  if (triangles.size() % 2 != 0) throw NumericError("closed triangle mesh must have an even face count");
  return n_vertices() - 3 * n_triangles() / 2 + n_triangles();
}

double SurfaceMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    const Eigen::Vector2d u = t.chart[1] - t.chart[0], w = t.chart[2] - t.chart[0];
    a += 0.5 * (u.x() * w.y() - u.y() * w.x());
  }
  return a;
}

std::vector<double> SurfaceMesh::angle_sums() const {
  std::vector<double> out(coords.size(), 0.0);
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d u = t.chart[(k + 1) % 3] - t.chart[k], w = t.chart[(k + 2) % 3] - t.chart[k];
      out[static_cast<std::size_t>(t.v[k])] += std::atan2(u.x() * w.y() - u.y() * w.x(), u.dot(w));
    }
  return out;
}

bool SurfaceMesh::closed_and_oriented() const {
  std::map<std::pair<int, int>, int> sides;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) ++sides[{t.v[k], t.v[(k + 1) % 3]}];
  for (const auto& [e, n] : sides) {
    const auto it = sides.find({e.second, e.first});
    if (it == sides.end() || it->second != n) return false;
  }
  return true;
}

bool SurfaceMesh::connected() const {
  std::vector<int> parent(coords.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const auto& t : triangles)
    for (int k = 1; k < 3; ++k) parent[static_cast<std::size_t>(find(t.v[k]))] = find(t.v[0]);
  for (std::size_t i = 0; i < parent.size(); ++i)
    if (find(static_cast<int>(i)) != find(0)) return false;
  return true;
}

double SurfaceMesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) h = std::max(h, (t.chart[(k + 1) % 3] - t.chart[k]).norm());
  return h;
}

namespace {

struct Ring {
  std::vector<int> ids;
  std::vector<double> x;  // increasing, x[0] = 0
};

struct VertexEdges {
  int wide = -1, narrow1 = -1, narrow2 = -1;
};

std::vector<VertexEdges> vertex_edges(const RibbonGraph& g) {
  std::vector<VertexEdges> out(static_cast<std::size_t>(g.n_vertices()));
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (const auto& h : {edges[e].conj, edges[e].plain}) {
      auto& ve = out[static_cast<std::size_t>(h.vertex)];
      (h.slot == 0 ? ve.wide : (h.slot == 1 ? ve.narrow1 : ve.narrow2)) = static_cast<int>(e);
    }
  return out;
}

// Row v: wide - narrow1 - narrow2.
Eigen::MatrixXd constraint_matrix(const RibbonGraph& g) {
  const auto ve = vertex_edges(g);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(g.n_vertices(), g.n_edges());
  for (int v = 0; v < g.n_vertices(); ++v) {
    const auto& x = ve[static_cast<std::size_t>(v)];
    c(v, x.wide) += 1.0;
    c(v, x.narrow1) -= 1.0;
    c(v, x.narrow2) -= 1.0;
  }
  return c;
}

// Append a tube whose bottom ring sits at y = 0 and top ring at y = length.
// Intermediate rings interpolate the column positions linearly.
void add_tube(SurfaceMesh& mesh, double width, double length, const Ring& bottom, const Ring& top, double twist,
              double h) {
  const std::size_t n = bottom.ids.size();
  if (top.ids.size() != n) throw NumericError("tube ends have different node counts");
  const int rows = std::max(2, static_cast<int>(std::lround(length / h)));
  std::vector<std::vector<int>> ids(static_cast<std::size_t>(rows) + 1);
  std::vector<std::vector<double>> xs(static_cast<std::size_t>(rows) + 1);
  for (int i = 0; i <= rows; ++i) {
    const double s = static_cast<double>(i) / rows;
    auto& row_x = xs[static_cast<std::size_t>(i)];
    auto& row_id = ids[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < n; ++j) row_x.push_back((1.0 - s) * bottom.x[j] + s * (top.x[j] + twist));
    if (i == 0) {
      row_id = bottom.ids;
    } else if (i == rows) {
      row_id = top.ids;
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        row_id.push_back(mesh.n_vertices());
        mesh.coords.emplace_back(row_x[j], s * length);
      }
    }
  }
  for (int i = 0; i < rows; ++i) {
    const double y0 = length * i / rows, y1 = length * (i + 1) / rows;
    const auto& r0 = ids[static_cast<std::size_t>(i)];
    const auto& r1 = ids[static_cast<std::size_t>(i) + 1];
    const auto& x0 = xs[static_cast<std::size_t>(i)];
    const auto& x1 = xs[static_cast<std::size_t>(i) + 1];
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = (j + 1) % n;
      const double wrap = k == 0 ? width : 0.0;
      const Eigen::Vector2d a(x0[j], y0), b(x0[k] + wrap, y0), c(x1[k] + wrap, y1), d(x1[j], y1);
      // Split the quad along its shorter diagonal.
      if ((c - a).norm() <= (d - b).norm()) {
        mesh.triangles.push_back({{r0[j], r0[k], r1[k]}, {a, b, c}});
        mesh.triangles.push_back({{r0[j], r1[k], r1[j]}, {a, c, d}});
      } else {
        mesh.triangles.push_back({{r0[j], r0[k], r1[j]}, {a, b, d}});
        mesh.triangles.push_back({{r0[k], r1[k], r1[j]}, {b, c, d}});
      }
    }
  }
}

// Integer ring sizes n_e close to width / h with wide = narrow1 + narrow2 at
// every vertex. Free edges come from the reduced row echelon form of the
// constraint matrix; the rest follow from the constraints.
std::vector<int> ring_counts(const RibbonGraph& g, const std::vector<double>& widths, double h, int min_ring) {
  Eigen::MatrixXd c = constraint_matrix(g);
  const Eigen::Index rows = c.rows(), cols = c.cols();
  std::vector<Eigen::Index> pivots;
  Eigen::Index r = 0;
  for (Eigen::Index col = 0; col < cols && r < rows; ++col) {
    Eigen::Index best = r;
    for (Eigen::Index i = r; i < rows; ++i)
      if (std::abs(c(i, col)) > std::abs(c(best, col))) best = i;
    if (std::abs(c(best, col)) < 1e-9) continue;
    c.row(r).swap(c.row(best));
    c.row(r) /= c(r, col);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (i != r) c.row(i) -= c(i, col) * c.row(r);
    pivots.push_back(col);
    ++r;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (auto p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const double hh = h / std::pow(2.0, attempt);
    std::vector<double> n(static_cast<std::size_t>(cols), 0.0);
    for (Eigen::Index e = 0; e < cols; ++e)
      if (!is_pivot[static_cast<std::size_t>(e)])
        n[static_cast<std::size_t>(e)] = std::max<double>(min_ring, std::lround(widths[static_cast<std::size_t>(e)] / hh));
    bool ok = true;
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      double v = 0.0;
      for (Eigen::Index e = 0; e < cols; ++e)
        if (!is_pivot[static_cast<std::size_t>(e)]) v -= c(static_cast<Eigen::Index>(k), e) * n[static_cast<std::size_t>(e)];
      if (std::abs(v - std::round(v)) > 1e-9) throw ConstraintError("no integer ring sizes satisfy the vertex constraints");
      n[static_cast<std::size_t>(pivots[k])] = std::round(v);
      ok = ok && std::round(v) >= min_ring;
    }
    if (ok) return {n.begin(), n.end()};
  }
  throw ConstraintError("ring sizes below the minimum; widths too unbalanced for the mesh size");
}

}  // namespace

std::vector<double> constrained_widths(const RibbonGraph& g, const std::vector<graphs::EdgeLabel>& labels) {
  if (labels.size() != static_cast<std::size_t>(g.n_edges()))
    throw UsageError("surface needs one label per edge (" + std::to_string(g.n_edges()) + ")");
  const Eigen::MatrixXd c = constraint_matrix(g);
  Eigen::VectorXd l(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) l[e] = labels[static_cast<std::size_t>(e)].length;
  // Edges whose width every solution forces to zero.
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  const Eigen::MatrixXd kernel = lu.kernel();
  const auto ve = vertex_edges(g);
  for (int e = 0; e < g.n_edges(); ++e) {
    if (lu.rank() > 0 && kernel.cols() > 0 && kernel.row(e).norm() > 1e-9) continue;
    for (int v = 0; v < g.n_vertices(); ++v) {
      const auto& x = ve[static_cast<std::size_t>(v)];
      if (x.wide == e || x.narrow1 == e || x.narrow2 == e)
        throw ConstraintError("vertex " + std::to_string(v) + ": width constraint forces edge " + std::to_string(e) +
                               " to zero width");
    }
  }
  const Eigen::VectorXd proj = l - c.transpose() * c.transpose().completeOrthogonalDecomposition().solve(l);
  std::vector<double> out(proj.data(), proj.data() + proj.size());
  for (int v = 0; v < g.n_vertices(); ++v) {
    const auto& x = ve[static_cast<std::size_t>(v)];
    for (int e : {x.wide, x.narrow1, x.narrow2})
      if (!(out[static_cast<std::size_t>(e)] > 0.0))
        throw ConstraintError("vertex " + std::to_string(v) + ": constrained width of edge " + std::to_string(e) +
                               " is not positive");
  }
  return out;
}

SurfaceMesh build_surface(const RibbonGraph& g, const std::vector<graphs::EdgeLabel>& labels,
                          const SurfaceParams& params) {
  if (g.n_vertices() == 0 || !g.connected()) throw UsageError("surface needs a connected nonempty graph");
  if (!(params.h > 0.0) || !(params.epsilon >= 0.0)) throw ConfigError({"surface needs h > 0 and epsilon >= 0"});
  if (!params.twists.empty() && params.twists.size() != labels.size())
    throw UsageError("twists must be empty or one per edge");
  const auto widths = constrained_widths(g, labels);
  const auto counts = ring_counts(g, widths, params.h, params.min_ring);
  const auto ve = vertex_edges(g);
  const auto edges = g.edges();

  SurfaceMesh mesh;
  // Rings by (vertex, slot).
  std::vector<std::array<Ring, 3>> rings(static_cast<std::size_t>(g.n_vertices()));
  for (int v = 0; v < g.n_vertices(); ++v) {
    const auto& x = ve[static_cast<std::size_t>(v)];
    const int cone = mesh.n_vertices();
    mesh.coords.emplace_back(0.0, 0.0);
    mesh.cone_points.push_back(cone);
    auto& r = rings[static_cast<std::size_t>(v)];
    const int n1 = counts[static_cast<std::size_t>(x.narrow1)], n2 = counts[static_cast<std::size_t>(x.narrow2)];
    const double l1 = widths[static_cast<std::size_t>(x.narrow1)], l2 = widths[static_cast<std::size_t>(x.narrow2)];
    for (int s = 1; s <= 2; ++s) {
      const int n = s == 1 ? n1 : n2;
      const double l = s == 1 ? l1 : l2;
      auto& ring = r[static_cast<std::size_t>(s)];
      for (int j = 0; j < n; ++j) {
        ring.x.push_back(l * j / n);
        if (j == 0) {
          ring.ids.push_back(cone);
        } else {
          ring.ids.push_back(mesh.n_vertices());
          mesh.coords.emplace_back(ring.x.back(), 0.0);
        }
      }
    }
    // Wide circle: arc of narrow1 then arc of narrow2; both cut points are the cone.
    auto& wide = r[0];
    wide.ids = r[1].ids;
    wide.x = r[1].x;
    for (int j = 0; j < n2; ++j) {
      wide.ids.push_back(r[2].ids[static_cast<std::size_t>(j)]);
      wide.x.push_back(l1 + r[2].x[static_cast<std::size_t>(j)]);
    }
  }
  double expected_area = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double length = std::abs(labels[e].t) + 2.0 * params.epsilon;
    if (!(length > 0.0)) throw ConstraintError("edge " + std::to_string(e) + " has zero tube length");
    const auto& bottom = rings[static_cast<std::size_t>(edges[e].plain.vertex)][static_cast<std::size_t>(edges[e].plain.slot)];
    const auto& top = rings[static_cast<std::size_t>(edges[e].conj.vertex)][static_cast<std::size_t>(edges[e].conj.slot)];
    add_tube(mesh, widths[e], length, bottom, top, params.twists.empty() ? 0.0 : params.twists[e], params.h);
    expected_area += length * widths[e];
  }
  mesh.metadata = {{"graph", graphs::to_json(g)}, {"widths", widths}, {"ring_sizes", counts},
                   {"params", to_json(params)}, {"expected_area", expected_area}};
  nlohmann::json lab = nlohmann::json::array();
  for (const auto& l : labels) lab.push_back({{"t", l.t}, {"l", l.length}});
  mesh.metadata["labels"] = lab;
  return mesh;
}

SurfaceMesh flat_torus(double length, double beta, double h) {
  if (!(length > 0.0) || !(beta > 0.0) || !(h > 0.0)) throw ConfigError({"torus needs positive sides and h"});
  SurfaceMesh mesh;
  const int n = std::max(3, static_cast<int>(std::lround(length / h)));
  Ring ring;
  for (int j = 0; j < n; ++j) {
    ring.ids.push_back(mesh.n_vertices());
    ring.x.push_back(length * j / n);
    mesh.coords.emplace_back(ring.x.back(), 0.0);
  }
  add_tube(mesh, length, beta, ring, ring, 0.0, beta / std::max(2, static_cast<int>(std::lround(beta / h))));
  mesh.metadata = {{"torus", {{"L", length}, {"beta", beta}, {"h", h}}}, {"expected_area", length * beta}};
  return mesh;
}

void write_mesh(std::ostream& os, const SurfaceMesh& mesh) {
  os.precision(17);
  os << "sftmesh 1\nvertices " << mesh.coords.size() << '\n';
  for (const auto& c : mesh.coords) os << c.x() << ' ' << c.y() << '\n';
  os << "triangles " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) {
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2];
    for (const auto& p : t.chart) os << ' ' << p.x() << ' ' << p.y();
    os << '\n';
  }
  os << "cones " << mesh.cone_points.size() << '\n';
  for (int c : mesh.cone_points) os << c << '\n';
}

SurfaceMesh read_mesh(std::istream& is) {
  auto expect = [&](const std::string& word) {
    std::string w;
    if (!(is >> w) || w != word) throw UsageError("mesh file: expected '" + word + "'");
  };
  SurfaceMesh mesh;
  int version = 0;
  expect("sftmesh");
  is >> version;
  if (version != 1) throw UsageError("mesh file: unsupported version");
  std::size_t n = 0;
  expect("vertices");
  is >> n;
  mesh.coords.resize(n);
  for (auto& c : mesh.coords) is >> c.x() >> c.y();
  expect("triangles");
  is >> n;
  mesh.triangles.resize(n);
  for (auto& t : mesh.triangles) {
    is >> t.v[0] >> t.v[1] >> t.v[2];
    for (auto& p : t.chart) is >> p.x() >> p.y();
  }
  expect("cones");
  is >> n;
  mesh.cone_points.resize(n);
  for (auto& c : mesh.cone_points) is >> c;
  if (!is) throw UsageError("mesh file: truncated");
  return mesh;
}

nlohmann::json to_json(const SurfaceParams& p) {
  return {{"epsilon", p.epsilon}, {"h", p.h}, {"twists", p.twists}, {"min_ring", p.min_ring}};
}

}  // namespace sft::surfaces
