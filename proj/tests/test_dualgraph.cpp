#include <random>

#include "doctest.h"
#include "valtree/dualgraph.hpp"

using namespace valtree;

static Rat rq(long long n, long long d = 1) { return Rat(Int(n), Int(d)); }
static ExtRat er(long long n, long long d = 1) { return ExtRat(rq(n, d)); }

static BranchParam B(const std::string& s) { return BranchParam::parse(s); }

TEST_CASE("farey weight creation rules") {
  DualGraph g;
  int e0 = g.blow_origin();
  CHECK(g.verts()[e0].w == FareyWeight{2, 1});
  CHECK_THROWS_AS(g.blow_origin(), domain_error);

  int e1 = g.blow_free(e0);
  CHECK(g.verts()[e1].w == FareyWeight{3, 1});

  auto sat = g.blow_satellite_vertices(e0, e1);
  CHECK(g.verts()[sat.vertex].w == FareyWeight{5, 2});
  // the satellite subdivides: E0 and E1 are no longer adjacent
  CHECK(g.find_live_edge(e0, e1) < 0);
  CHECK(g.find_live_edge(e0, sat.vertex) >= 0);
  CHECK(g.find_live_edge(sat.vertex, e1) >= 0);

  CHECK_THROWS_AS(g.blow_satellite_vertices(e0, e1), domain_error);
  CHECK_THROWS_AS(g.blow_free(99), domain_error);
}

TEST_CASE("pure blowup returns a new graph") {
  DualGraph empty;
  DualGraph g0 = blowup_at(empty, {PointKind::Origin, -1, -1, std::nullopt});
  CHECK(empty.vertex_count() == 0);
  CHECK(g0.vertex_count() == 1);
  DualGraph g1 = blowup_at(g0, {PointKind::Free, 0, -1, std::nullopt});
  CHECK(g0.vertex_count() == 1);
  CHECK(g1.vertex_count() == 2);
  DualGraph g2 = blowup_at(g1, {PointKind::Satellite, 0, 1, std::nullopt});
  CHECK(g1.vertex_count() == 2);
  CHECK(g2.verts()[2].w == FareyWeight{5, 2});
  CHECK_THROWS_AS(blowup_at(g0, {PointKind::Origin, -1, -1, std::nullopt}), domain_error);
}

TEST_CASE("farey parameters strictly increase along the root order") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    DualGraph g;
    g.blow_origin();
    for (int step = 0; step < 8; ++step) {
      std::vector<std::pair<int, int>> live;
      for (auto& e : g.edges())
        if (e.alive) live.emplace_back(e.u_vertex, e.v_vertex);
      bool satellite = !live.empty() && (rng() % 2 == 0);
      if (satellite) {
        auto [a, b] = live[rng() % live.size()];
        g.blow_satellite_vertices(a, b);
      } else {
        g.blow_free(static_cast<int>(rng() % g.vertex_count()));
      }
    }
    auto parents = g.tree_parents();
    for (size_t v = 1; v < g.vertex_count(); ++v) {
      CHECK(g.verts()[v].w.parameter() != g.verts()[parents[v]].w.parameter());
      // increasing away from the root
      bool child_above = g.verts()[v].w.parameter() > g.verts()[parents[v]].w.parameter();
      // parent order is the tree order: the deeper vertex has the larger parameter
      CHECK(child_above);
    }
  }
}

TEST_CASE("determinant identity and thinness steps on every edge") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    DualGraph g;
    g.blow_origin();
    for (int step = 0; step < 7; ++step) {
      std::vector<int> live;
      for (size_t i = 0; i < g.edges().size(); ++i)
        if (g.edges()[i].alive) live.push_back(static_cast<int>(i));
      if (!live.empty() && rng() % 2 == 0)
        g.blow_satellite(live[rng() % live.size()]);
      else
        g.blow_free(static_cast<int>(rng() % g.vertex_count()));
    }
    auto parents = g.tree_parents();
    for (size_t i = 0; i < g.edges().size(); ++i) {
      if (!g.edges()[i].alive) continue;
      auto& e = g.edges()[i];
      auto wa = g.verts()[e.u_vertex].w, wb = g.verts()[e.v_vertex].w;
      long long det = wa.a * wb.b - wb.a * wa.b;
      if (det < 0) det = -det;
      CHECK(det == edge_segment_mult(g, static_cast<int>(i)));
      // A(child) - A(parent) = m / (b b')
      int upper = (parents[e.v_vertex] == e.u_vertex) ? e.v_vertex : e.u_vertex;
      int lower = (upper == e.v_vertex) ? e.u_vertex : e.v_vertex;
      Rat diff = g.verts()[upper].w.parameter() - g.verts()[lower].w.parameter();
      CHECK(diff == rq(det) / rq(wa.b * wb.b));
    }
    // free blowups: A(child) = A(parent) + 1/b
    for (size_t v = 0; v < g.vertex_count(); ++v) {
      auto& vert = g.verts()[v];
      if (vert.kind == PointKind::Free) {
        auto& p = g.verts()[vert.parent1];
        CHECK(vert.w.parameter() == p.w.parameter() + rq(1) / rq(p.w.b));
        CHECK(vert.w.b == p.w.b);
      }
      if (vert.kind == PointKind::Satellite)
        CHECK(vert.w.b == g.verts()[vert.parent1].w.b + g.verts()[vert.parent2].w.b);
    }
  }
}

TEST_CASE("exhaustive subdivision keeps the edge determinant") {
  // subdividing any edge repeatedly: every created vertex has multiplicity equal
  // to the determinant of the original edge
  DualGraph g;
  g.blow_origin();
  int e1 = g.blow_free(0);
  g.blow_satellite_vertices(0, e1);  // (5,2)
  int free52 = g.blow_free(2);
  (void)free52;
  // edge (5,2)-(6,2): det = |5*2-6*2| = 2
  int eid = g.find_live_edge(2, 3);
  REQUIRE(eid >= 0);
  std::vector<int> frontier{eid};
  for (int depth = 0; depth < 3; ++depth) {
    std::vector<int> next;
    for (int e : frontier) {
      if (!g.edges()[e].alive) continue;
      auto res = g.blow_satellite(e);
      CHECK(vertex_invariants(g, res.vertex).mult == 2);
      next.push_back(res.edge_to_u);
      next.push_back(res.edge_to_v);
    }
    frontier = next;
  }
}

TEST_CASE("cusp resolution: three blowups, weights (2,1),(3,1),(5,2)") {
  auto seq = nearby_points_of_branch(B("n=2; y=t^3"));
  CHECK(seq.normal_crossings);
  REQUIRE(seq.points.size() == 3);
  CHECK(seq.points[0].kind == PointKind::Origin);
  CHECK(seq.points[1].kind == PointKind::Free);
  CHECK(seq.points[2].kind == PointKind::Satellite);

  const DualGraph& g = seq.graph;
  REQUIRE(g.vertex_count() == 3);
  CHECK(g.verts()[0].w == FareyWeight{2, 1});
  CHECK(g.verts()[1].w == FareyWeight{3, 1});
  CHECK(g.verts()[2].w == FareyWeight{5, 2});
  CHECK(g.attachments.at("C") == 2);
  // path E1 - E2 - E0
  CHECK(g.find_live_edge(0, 2) >= 0);
  CHECK(g.find_live_edge(2, 1) >= 0);
  CHECK(g.find_live_edge(0, 1) < 0);
}

TEST_CASE("smooth branch resolves after one blowup") {
  auto seq = nearby_points_of_branch(B("n=1; y=t"));
  CHECK(seq.normal_crossings);
  CHECK(seq.points.size() == 1);
  CHECK(seq.graph.vertex_count() == 1);
  CHECK(seq.graph.attachments.at("C") == 0);
  // transformed parameterization: (t, 0) after recentering at (0, 1)
  auto& fp = seq.final_params.at("C");
  CHECK(fp.first == "t");
  CHECK(fp.second == "0");
}

TEST_CASE("equisingular to the cusp: same three-step resolution") {
  auto seq = nearby_points_of_branch(B("n=2; y=t^3+t^5"));
  CHECK(seq.normal_crossings);
  CHECK(seq.points.size() == 3);
  CHECK(seq.graph.verts()[2].w == FareyWeight{5, 2});
}

TEST_CASE("tangential pair: shared prefix then two free separations") {
  auto g = minimal_desing_from_branches(
      {{"C1", B("n=2; y=t^3")}, {"C2", B("x = t^2+t^4; y = t^3*(1+t^2)^2")}});
  REQUIRE(g.vertex_count() == 5);
  CHECK(g.verts()[0].w == FareyWeight{2, 1});
  CHECK(g.verts()[1].w == FareyWeight{3, 1});
  CHECK(g.verts()[2].w == FareyWeight{5, 2});
  CHECK(g.verts()[3].w == FareyWeight{6, 2});
  CHECK(g.verts()[4].w == FareyWeight{7, 2});
  CHECK(g.attachments.at("C1") == 4);
  CHECK(g.attachments.at("C2") == 4);
  CHECK(g.find_live_edge(2, 3) >= 0);
  CHECK(g.find_live_edge(3, 4) >= 0);
}

TEST_CASE("two transverse smooth branches separate on the first model") {
  auto g = minimal_desing_from_branches({{"C1", B("n=1; y=t")}, {"C2", B("n=1; y=0-t")}});
  CHECK(g.vertex_count() == 1);
  CHECK(g.attachments.at("C1") == 0);
  CHECK(g.attachments.at("C2") == 0);
}

TEST_CASE("vertex invariants on the cusp graph") {
  auto g = minimal_desing_from_branches({{"C", B("n=2; y=t^3")}});
  auto i0 = vertex_invariants(g, 0);
  CHECK(i0.thinness == rq(2));
  CHECK(i0.generic_mult == 1);
  CHECK(i0.mult == 1);

  auto i2 = vertex_invariants(g, 2);
  CHECK(i2.thinness == rq(5, 2));
  CHECK(i2.generic_mult == 2);
  // the (3,1) component sits above (5,2) in the tree order, so m = min(2, 1) = 1
  CHECK(i2.mult == 1);

  DualGraph g2 = g;
  int f = g2.blow_free(2);
  auto i3 = vertex_invariants(g2, f);
  CHECK(i3.thinness == rq(3));
  CHECK(i3.generic_mult == 2);
  CHECK(i3.mult == 2);
}

TEST_CASE("vertex valuations via curvettes") {
  auto g = minimal_desing_from_branches({{"C", B("n=2; y=t^3")}});
  CHECK(vertex_to_skp(g, 0) == Skp::multiplicity_valuation());
  CHECK(vertex_to_skp(g, 1) == Skp::monomial(er(2)));
  CHECK(vertex_to_skp(g, 2) == Skp::monomial(er(3, 2)));

  DualGraph g2 = g;
  int f = g2.blow_free(2);
  Skp s = vertex_to_skp(g2, f);
  auto rep = invariants(s);
  CHECK(rep.thinness == er(3));
  CHECK(rep.generic_mult.value() == 2);
  CHECK(rep.alpha == er(7, 4));
}

TEST_CASE("graph-side and valuation-side invariants agree across simulations") {
  std::vector<std::vector<std::pair<std::string, BranchParam>>> inputs = {
      {{"C", B("n=2; y=t^3")}},
      {{"C", B("n=3; y=t^4")}},
      {{"C", B("n=3; y=t^5")}},
      {{"C", B("n=2; y=t^5")}},
      {{"C", B("n=3; y=t^4+t^5")}},
      {{"C1", B("n=2; y=t^3")}, {"C2", B("x = t^2+t^4; y = t^3*(1+t^2)^2")}},
      {{"C1", B("n=1; y=t")}, {"C2", B("n=1; y=t^2")}},
  };
  for (auto& in : inputs) {
    DualGraph g = minimal_desing_from_branches(in);
    for (size_t v = 0; v < g.vertex_count(); ++v) {
      auto gi = vertex_invariants(g, static_cast<int>(v));
      Skp s = vertex_to_skp(g, static_cast<int>(v));
      auto rep = invariants(s);
      CHECK(rep.thinness == ExtRat(gi.thinness));
      REQUIRE(rep.generic_mult.has_value());
      CHECK(rep.generic_mult.value() == gi.generic_mult);
      CHECK(rep.mult == gi.mult);
    }
  }
}

TEST_CASE("equisingularity algorithm reproduces the chart oracle") {
  std::vector<std::vector<std::pair<std::string, BranchParam>>> inputs = {
      {{"C", B("n=2; y=t^3")}},
      {{"C", B("n=2; y=t^3+t^5")}},
      {{"C", B("n=3; y=t^4")}},
      {{"C", B("n=4; y=t^6+t^7")}},
      {{"C1", B("n=1; y=t")}, {"C2", B("n=1; y=0-t")}},
      {{"C1", B("n=2; y=t^3")}, {"C2", B("x = t^2+t^4; y = t^3*(1+t^2)^2")}},
      {{"C1", B("n=2; y=t^3")}, {"C2", B("n=1; y=0")}},
      {{"C1", B("n=2; y=t^3")}, {"C2", B("n=3; y=t^4")}},
      {{"C1", B("n=1; y=t")}, {"C2", B("n=1; y=t^2")}},
  };
  for (auto& in : inputs) {
    DualGraph oracle = minimal_desing_from_branches(in);
    EquisingData data = equising_data_from_branches(in);
    DualGraph algo = minimal_desing_from_equising(data);
    CHECK(algo.canonical_string() == oracle.canonical_string());
  }
}

TEST_CASE("equisingularity spec examples") {
  // single branch, n = 2, A(1,1) = 5/2: the cusp graph
  EquisingData cusp;
  cusp.branches.push_back({"C", 2, {rq(5, 2)}});
  DualGraph g = minimal_desing_from_equising(cusp);
  REQUIRE(g.vertex_count() == 3);
  CHECK(g.verts()[2].w == FareyWeight{5, 2});
  CHECK(g.attachments.at("C") == 2);

  // two transverse smooth branches: contact 2
  EquisingData smooth2;
  smooth2.branches.push_back({"C1", 1, {}});
  smooth2.branches.push_back({"C2", 1, {}});
  smooth2.contacts[{0, 1}] = rq(2);
  DualGraph g2 = minimal_desing_from_equising(smooth2);
  CHECK(g2.vertex_count() == 1);

  // tangential pair data: contact 7/2
  EquisingData f18;
  f18.branches.push_back({"C1", 2, {rq(5, 2)}});
  f18.branches.push_back({"C2", 2, {rq(5, 2)}});
  f18.contacts[{0, 1}] = rq(7, 2);
  DualGraph g3 = minimal_desing_from_equising(f18);
  REQUIRE(g3.vertex_count() == 5);
  CHECK(g3.verts()[4].w == FareyWeight{7, 2});
  CHECK(g3.attachments.at("C1") == 4);
  CHECK(g3.attachments.at("C2") == 4);

  // ultrametric violation rejected
  EquisingData bad;
  bad.branches.push_back({"C1", 1, {}});
  bad.branches.push_back({"C2", 1, {}});
  bad.branches.push_back({"C3", 1, {}});
  bad.contacts[{0, 1}] = rq(3);
  bad.contacts[{0, 2}] = rq(5, 2);
  bad.contacts[{1, 2}] = rq(2);
  CHECK_THROWS_AS(minimal_desing_from_equising(bad), domain_error);
}

TEST_CASE("classical invariants") {
  auto cusp = classical_invariants(B("n=2; y=t^3"));
  CHECK(cusp.n == 2);
  CHECK(cusp.g == 1);
  REQUIRE(cusp.beta.size() == 1);
  CHECK(cusp.beta[0] == 3);
  CHECK(cusp.e[0] == 1);
  CHECK(cusp.nseq[0] == 2);
  REQUIRE(cusp.beta_bar.size() == 2);
  CHECK(cusp.beta_bar[0] == 2);
  CHECK(cusp.beta_bar[1] == 3);

  auto c6 = classical_invariants(B("n=2; y=t^3+t^5"));
  CHECK(c6.n == 2);
  CHECK(c6.g == 1);
  CHECK(c6.beta[0] == 3);
  CHECK(c6.beta_bar == std::vector<long>{2, 3});

  auto smooth = classical_invariants(B("n=1; y=t"));
  CHECK(smooth.g == 0);
  CHECK(smooth.beta_bar == std::vector<long>{1});

  auto zar = classical_invariants(B("n=4; y=t^6+t^7"));
  CHECK(zar.n == 4);
  CHECK(zar.g == 2);
  CHECK(zar.beta == std::vector<long>{6, 7});
  CHECK(zar.e == std::vector<long>{2, 1});
  CHECK(zar.nseq == std::vector<long>{2, 2});
  CHECK(zar.beta_bar == std::vector<long>{4, 6, 13});

  auto raw = classical_invariants(B("x = t^2+t^4; y = t^3*(1+t^2)^2"));
  CHECK(raw.n == 2);
  CHECK(raw.beta_bar == std::vector<long>{2, 3});
}

TEST_CASE("eggers trees") {
  EquisingData cusp;
  cusp.branches.push_back({"C", 2, {rq(5, 2)}});
  EggersTree t = eggers_tree(cusp);
  // segment [1, inf] with marks {1, 3/2, inf}
  REQUIRE(t.nodes.size() == 3);
  CHECK(t.nodes[0].param == er(1));
  CHECK(t.nodes[1].param == er(3, 2));
  CHECK(t.nodes[2].param.is_infinite());
  CHECK(t.nodes[2].is_end);

  EquisingData f18;
  f18.branches.push_back({"C1", 2, {rq(5, 2)}});
  f18.branches.push_back({"C2", 2, {rq(5, 2)}});
  f18.contacts[{0, 1}] = rq(7, 2);
  EggersTree t2 = eggers_tree(f18);
  // nodes: 1, 3/2 (shared mark), 5/2 (glue), two infinite ends
  REQUIRE(t2.nodes.size() == 5);
  int glue = -1;
  for (size_t i = 0; i < t2.nodes.size(); ++i)
    if (t2.nodes[i].param == er(5, 2)) glue = static_cast<int>(i);
  REQUIRE(glue >= 0);
  CHECK(t2.nodes[glue].branches == std::vector<int>{0, 1});
  int ends = 0;
  for (auto& n : t2.nodes)
    if (n.is_end) ++ends;
  CHECK(ends == 2);

  EquisingData smooth2;
  smooth2.branches.push_back({"C1", 1, {}});
  smooth2.branches.push_back({"C2", 1, {}});
  smooth2.contacts[{0, 1}] = rq(2);
  EggersTree t3 = eggers_tree(smooth2);
  // glued at the root only
  REQUIRE(t3.nodes.size() == 3);
  CHECK(t3.nodes[0].param == er(1));
  CHECK(t3.nodes[0].branches == std::vector<int>{0, 1});
}

TEST_CASE("dot output shape") {
  auto g = minimal_desing_from_branches({{"C", B("n=2; y=t^3")}});
  std::string dot = g.dot();
  CHECK(dot.find("E0 (2,1)") != std::string::npos);
  CHECK(dot.find("E1 (3,1)") != std::string::npos);
  CHECK(dot.find("E2 (5,2)") != std::string::npos);
  CHECK(dot.find("shape=diamond") != std::string::npos);
}
