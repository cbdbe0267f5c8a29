#ifndef VALTREE_DUALGRAPH_HPP
#define VALTREE_DUALGRAPH_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valtree/skp.hpp"

namespace valtree {

struct FareyWeight {
  long long a = 0, b = 0;
  Rat parameter() const { return Rat(Int(a), Int(b)); }  // A = a/b
  bool operator==(const FareyWeight& o) const { return a == o.a && b == o.b; }
};

enum class PointKind { Origin, Free, Satellite };

// Dual graph of a composition of point blowups. Vertices are exceptional
// components with Farey weights; edges are component intersections. Graphs
// built from branch simulation or explicit blowups carry per-vertex charts
// (x, y) = chart(u, v) with the component at {u = 0}, used to produce
// curvettes; graphs from equisingularity data have no charts.
class DualGraph {
 public:
  struct Vertex {
    FareyWeight w;
    PointKind kind = PointKind::Origin;
    int parent1 = -1, parent2 = -1;  // creating component(s)
    BiPoly chart_x, chart_y;
    bool corner_at_zero = false;     // v = 0 of the chart meets another component
    std::vector<Rat> used_points;    // occupied v-coordinates on this chart
  };
  struct Edge {
    int u_vertex = -1, v_vertex = -1;  // components at {u=0} / {v=0} of the edge chart
    BiPoly chart_x, chart_y;
    bool alive = true;
  };

  bool with_charts = true;

  int blow_origin();
  // Blowup of a free point of vertex v; default picks a fresh generic point.
  int blow_free(int v, std::optional<Rat> point = std::nullopt);
  struct SatelliteResult {
    int vertex;
    int edge_to_u;  // new edge joining the old {u=0} component to the new vertex
    int edge_to_v;
  };
  SatelliteResult blow_satellite(int edge_id);
  SatelliteResult blow_satellite_vertices(int va, int vb);

  int find_live_edge(int va, int vb) const;  // -1 when not adjacent
  void mark_used(int v, const Rat& c);

  const std::vector<Vertex>& verts() const { return verts_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return verts_.size(); }

  std::map<std::string, int> attachments;  // branch label -> vertex

  // Rooted simplicial tree over live edges; parent_of[root] = -1.
  std::vector<int> tree_parents() const;
  std::vector<std::vector<int>> tree_children() const;

  // Label-preserving rooted-tree canonical form: Farey weights + attachments,
  // creation order excluded.
  std::string canonical_string() const;

  std::string dot() const;

 private:
  void require_charts() const;
  std::vector<Vertex> verts_;
  std::vector<Edge> edges_;
};

// Pure blowup: returns a new graph, leaving the input untouched.
struct BlowupSpec {
  PointKind kind = PointKind::Origin;
  int e1 = -1, e2 = -1;            // target component(s)
  std::optional<Rat> point;        // free case: explicit point on the chart
};

DualGraph blowup_at(const DualGraph& g, const BlowupSpec& p);

struct VertexInvariants {
  Rat thinness;      // Farey parameter a/b
  long generic_mult; // b
  long mult;         // min of b over tree-order descendants
};

VertexInvariants vertex_invariants(const DualGraph& g, int v);

// Multiplicity on the half-open segment toward the endpoint farther from the root.
long edge_segment_mult(const DualGraph& g, int edge_id);

// Divisorial valuation of a component, via a curvette through a fresh free
// point. Requires charts.
Skp vertex_to_skp(const DualGraph& g, int v);

struct NearbyPoint {
  PointKind kind;
  int parent1 = -1, parent2 = -1;
};

struct NearbySequence {
  std::vector<NearbyPoint> points;
  DualGraph graph;
  bool normal_crossings;  // stop rule reached (false when cut off by max_points)
  // strict transform of each branch in the chart of its attachment point
  std::map<std::string, std::pair<std::string, std::string>> final_params;
};

NearbySequence nearby_points_of_branch(const BranchParam& c, int max_points = 64);

DualGraph minimal_desing_from_branches(
    const std::vector<std::pair<std::string, BranchParam>>& branches);

// Equisingularity data: per branch its characteristic Farey parameters, plus
// pairwise contact parameters.
struct EquisingData {
  struct Branch {
    std::string label;
    long n = 1;                // multiplicity
    std::vector<Rat> charA;    // A(j,1..g_j), strictly increasing, each > 2
  };
  std::vector<Branch> branches;
  std::map<std::pair<int, int>, Rat> contacts;  // (i<j) -> A(C_i ^ C_j), >= 2

  const Rat& contact(int i, int j) const;
  void validate() const;  // ultrametric and range checks
};

EquisingData equising_data_from_branches(
    const std::vector<std::pair<std::string, BranchParam>>& branches);

DualGraph minimal_desing_from_equising(const EquisingData& data);

struct ClassicalInvariants {
  long n = 1;
  int g = 0;
  std::vector<long> beta;      // characteristic exponents beta_1..beta_g
  std::vector<long> e;         // e_i = gcd(n, beta_1..beta_i)
  std::vector<long> nseq;      // n_i = e_{i-1}/e_i
  std::vector<long> beta_bar;  // semigroup generators beta_bar_0..beta_bar_g
};

ClassicalInvariants classical_invariants(const BranchParam& c);

// Parameterized tree of branch segments [1, inf] glued at contact - 1, with
// marked points at the characteristic parameters - 1.
struct EggersTree {
  struct Node {
    ExtRat param;
    int parent = -1;
    std::vector<int> branches;  // branch indices whose path passes the node
    bool is_end = false;
    bool is_mark = false;  // characteristic mark (root, glue points and ends included)
  };
  std::vector<Node> nodes;
  std::string canonical_string() const;
};

EggersTree eggers_tree(const EquisingData& data);

}  // namespace valtree

#endif
