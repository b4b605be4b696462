#pragma once

// Directed trivalent ribbon graphs indexing the Wick contractions of
// (Re I)^{2n} = 2^{-2n} (I + conj I)^{2n}.
//
// A split vertex comes from a factor I = J(Psi, Psi, Psi): slot 0 (the wide
// string) carries conj(Psi), slots 1 and 2 (the two narrow strings) carry Psi.
// A join vertex comes from conj(I) and has every leg flipped. Slots are listed
// in the cyclic order 0, 1, 2. An edge pairs a conjugate leg with a plain leg,
// since E[Psi Psi] = 0.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sft::graphs {

enum class VertexKind : std::uint8_t { split = 0, join = 1 };

/// Half-edges are numbered 3 * vertex + slot.
struct HalfEdge {
  int vertex = 0;
  int slot = 0;
  int id() const { return 3 * vertex + slot; }
  static HalfEdge from_id(int h) { return {h / 3, h % 3}; }
};

bool is_conjugate(VertexKind kind, int slot);

struct Edge {
  HalfEdge conj;   // conjugate leg
  HalfEdge plain;  // plain leg
};

class RibbonGraph {
 public:
  RibbonGraph() = default;
  /// partner[h] is the half-edge glued to h; must be a fixed-point-free
  /// involution pairing conjugate with plain legs.
  RibbonGraph(std::vector<VertexKind> kinds, std::vector<int> partner);

  int n_vertices() const { return static_cast<int>(kinds_.size()); }
  int n_edges() const { return static_cast<int>(partner_.size() / 2); }
  VertexKind kind(int v) const { return kinds_[static_cast<std::size_t>(v)]; }
  const std::vector<VertexKind>& kinds() const { return kinds_; }
  int partner(int h) const { return partner_[static_cast<std::size_t>(h)]; }
  const std::vector<int>& partners() const { return partner_; }
  bool conjugate_leg(int h) const { return is_conjugate(kinds_[static_cast<std::size_t>(h / 3)], h % 3); }

  /// Edges ordered by their conjugate half-edge.
  std::vector<Edge> edges() const;
  bool connected() const;
  /// True when some edge joins two legs of one vertex.
  bool has_tadpole() const;
  /// Connected components as standalone graphs (vertices renumbered in order).
  std::vector<RibbonGraph> components() const;

  /// Graph relabeled by the vertex permutation v -> perm[v].
  RibbonGraph relabeled(const std::vector<int>& perm) const;

  /// Order of the automorphism group (vertex permutations fixing the graph).
  std::uint64_t aut_order() const { return aut_; }
  /// Number of labeled structures (vertex kinds and gluing on 2n numbered
  /// vertices) isomorphic to this graph: (2n)! / |Aut|.
  std::uint64_t orbit_size() const { return orbit_; }
  /// Weight c of this class in E[(Re I)^{2n}] = sum c * value: orbit_size / 2^{2n}.
  double moment_weight() const;

  /// Lexicographically smallest (kinds, partner) encoding over all relabelings.
  std::vector<int> canonical_code() const;

  bool operator==(const RibbonGraph&) const = default;

 private:
  friend std::vector<RibbonGraph> enumerate_graphs(int, int);
  friend RibbonGraph with_symmetry(RibbonGraph);
  std::vector<VertexKind> kinds_;
  std::vector<int> partner_;
  std::uint64_t aut_ = 1;
  std::uint64_t orbit_ = 1;
};

/// Fills in |Aut| and the orbit size by brute-force stabilizer enumeration.
RibbonGraph with_symmetry(RibbonGraph g);

inline constexpr int kDefaultMaxOrder = 2;

/// Isomorphism-class representatives with 2n vertices (n split, n join), in
/// canonical order. Throws CapacityError for n > max_n.
std::vector<RibbonGraph> enumerate_graphs(int n, int max_n = kDefaultMaxOrder);

/// Genus n + 1 of the closed surface glued from 2n pants; requires a connected graph.
int genus(const RibbonGraph& g);

nlohmann::json to_json(const RibbonGraph& g);

}  // namespace sft::graphs
