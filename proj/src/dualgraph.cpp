#include "valtree/dualgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace valtree {

namespace {

// phi(X(u,v), Y(u,v)) for chart composition.
BiPoly subst(const BiPoly& phi, const BiPoly& xs, const BiPoly& ys) {
  std::vector<BiPoly> xp{BiPoly::constant(Rat(1))}, yp{BiPoly::constant(Rat(1))};
  auto xpow = [&](int e) -> const BiPoly& {
    while (static_cast<int>(xp.size()) <= e) xp.push_back(xp.back() * xs);
    return xp[e];
  };
  auto ypow = [&](int e) -> const BiPoly& {
    while (static_cast<int>(yp.size()) <= e) yp.push_back(yp.back() * ys);
    return yp[e];
  };
  BiPoly r;
  for (auto& [k, c] : phi.terms()) r = r + xpow(k.first) * ypow(k.second) * c;
  return r;
}

BiPoly chart_u() { return BiPoly::var_x(); }
BiPoly chart_v() { return BiPoly::var_y(); }

}  // namespace

void DualGraph::require_charts() const {
  if (!with_charts)
    throw domain_error("no_charts", "operation needs a graph built with charts");
}

void DualGraph::mark_used(int v, const Rat& c) { verts_[v].used_points.push_back(c); }

int DualGraph::blow_origin() {
  if (!verts_.empty())
    throw domain_error("invalid_blowup", "origin blowup only on the empty graph");
  Vertex v;
  v.w = {2, 1};
  v.kind = PointKind::Origin;
  if (with_charts) {
    v.chart_x = chart_u();              // x = u
    v.chart_y = chart_u() * chart_v();  // y = u v
  }
  verts_.push_back(std::move(v));
  return 0;
}

int DualGraph::blow_free(int e, std::optional<Rat> point) {
  if (e < 0 || e >= static_cast<int>(verts_.size()))
    throw domain_error("invalid_blowup", "free blowup on nonexistent vertex");
  Vertex& base = verts_[e];
  Rat c(0);
  if (point) {
    c = *point;
    if (base.corner_at_zero && c.is_zero())
      throw domain_error("invalid_blowup", "requested point is a satellite corner");
  } else {
    long long k = base.corner_at_zero ? 1 : 0;
    for (;; ++k) {
      Rat cand(k);
      if (std::find(base.used_points.begin(), base.used_points.end(), cand) ==
          base.used_points.end()) {
        c = cand;
        break;
      }
    }
  }
  base.used_points.push_back(c);

  Vertex f;
  f.w = {base.w.a + 1, base.w.b};
  f.kind = PointKind::Free;
  f.parent1 = e;
  Edge edge;
  edge.u_vertex = e;
  edge.v_vertex = static_cast<int>(verts_.size());
  if (with_charts) {
    // blown point (0, c) on base's chart: vertex chart (p, q) -> (p, p q + c),
    // edge chart (p, q) -> (p q, q + c)
    BiPoly vc = chart_u() * chart_v() + BiPoly::constant(c);
    f.chart_x = subst(base.chart_x, chart_u(), vc);
    f.chart_y = subst(base.chart_y, chart_u(), vc);
    BiPoly ev = chart_v() + BiPoly::constant(c);
    edge.chart_x = subst(base.chart_x, chart_u() * chart_v(), ev);
    edge.chart_y = subst(base.chart_y, chart_u() * chart_v(), ev);
  }
  verts_.push_back(std::move(f));
  edges_.push_back(std::move(edge));
  return static_cast<int>(verts_.size()) - 1;
}

DualGraph::SatelliteResult DualGraph::blow_satellite(int edge_id) {
  if (edge_id < 0 || edge_id >= static_cast<int>(edges_.size()) || !edges_[edge_id].alive)
    throw domain_error("invalid_blowup", "satellite blowup needs a live edge");
  Edge old = edges_[edge_id];
  edges_[edge_id].alive = false;

  int a = old.u_vertex, b = old.v_vertex;
  Vertex f;
  f.w = {verts_[a].w.a + verts_[b].w.a, verts_[a].w.b + verts_[b].w.b};
  f.kind = PointKind::Satellite;
  f.parent1 = a;
  f.parent2 = b;
  f.corner_at_zero = true;  // v = 0 of the vertex chart is the old {v=0} component
  int fid = static_cast<int>(verts_.size());

  Edge to_u, to_v;
  to_u.u_vertex = a;
  to_u.v_vertex = fid;
  to_v.u_vertex = fid;
  to_v.v_vertex = b;
  if (with_charts) {
    // vertex chart of F == chart A of the blowup: (p, q) -> (p, p q)
    f.chart_x = subst(old.chart_x, chart_u(), chart_u() * chart_v());
    f.chart_y = subst(old.chart_y, chart_u(), chart_u() * chart_v());
    to_v.chart_x = f.chart_x;  // axes: {p=0} = F, {q=0} = old v-side component
    to_v.chart_y = f.chart_y;
    to_u.chart_x = subst(old.chart_x, chart_u() * chart_v(), chart_v());
    to_u.chart_y = subst(old.chart_y, chart_u() * chart_v(), chart_v());
  }
  verts_.push_back(std::move(f));
  int e1 = static_cast<int>(edges_.size());
  edges_.push_back(std::move(to_u));
  int e2 = static_cast<int>(edges_.size());
  edges_.push_back(std::move(to_v));
  return {fid, e1, e2};
}

DualGraph::SatelliteResult DualGraph::blow_satellite_vertices(int va, int vb) {
  int e = find_live_edge(va, vb);
  if (e < 0)
    throw domain_error("invalid_blowup", "satellite blowup of non-adjacent components");
  return blow_satellite(e);
}

int DualGraph::find_live_edge(int va, int vb) const {
  for (size_t i = 0; i < edges_.size(); ++i) {
    if (!edges_[i].alive) continue;
    if ((edges_[i].u_vertex == va && edges_[i].v_vertex == vb) ||
        (edges_[i].u_vertex == vb && edges_[i].v_vertex == va))
      return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> DualGraph::tree_parents() const {
  std::vector<std::vector<int>> adj(verts_.size());
  for (auto& e : edges_) {
    if (!e.alive) continue;
    adj[e.u_vertex].push_back(e.v_vertex);
    adj[e.v_vertex].push_back(e.u_vertex);
  }
  std::vector<int> parent(verts_.size(), -2);
  std::deque<int> q{0};
  parent[0] = -1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (parent[w] == -2) {
        parent[w] = v;
        q.push_back(w);
      }
  }
  for (int p : parent)
    if (p == -2) throw domain_error("internal", "dual graph is not connected");
  return parent;
}

std::vector<std::vector<int>> DualGraph::tree_children() const {
  auto parent = tree_parents();
  std::vector<std::vector<int>> ch(verts_.size());
  for (size_t v = 1; v < verts_.size(); ++v) ch[parent[v]].push_back(static_cast<int>(v));
  return ch;
}

std::string DualGraph::canonical_string() const {
  auto children = tree_children();
  std::vector<std::vector<std::string>> attach(verts_.size());
  for (auto& [label, v] : attachments) attach[v].push_back(label);
  std::function<std::string(int)> enc = [&](int v) -> std::string {
    std::string s =
        "(" + std::to_string(verts_[v].w.a) + "," + std::to_string(verts_[v].w.b) + ")";
    std::sort(attach[v].begin(), attach[v].end());
    for (auto& l : attach[v]) s += "<" + l + ">";
    std::vector<std::string> subs;
    for (int c : children[v]) subs.push_back(enc(c));
    std::sort(subs.begin(), subs.end());
    s += "[";
    for (auto& sub : subs) s += sub;
    s += "]";
    return s;
  };
  return enc(0);
}

std::string DualGraph::dot() const {
  std::ostringstream os;
  os << "graph dual {\n";
  for (size_t v = 0; v < verts_.size(); ++v)
    os << "  v" << v << " [label=\"E" << v << " (" << verts_[v].w.a << "," << verts_[v].w.b
       << ")\"];\n";
  for (auto& e : edges_)
    if (e.alive) os << "  v" << e.u_vertex << " -- v" << e.v_vertex << ";\n";
  int k = 0;
  for (auto& [label, v] : attachments) {
    os << "  b" << k << " [label=\"" << label << "\", shape=diamond];\n";
    os << "  b" << k << " -- v" << v << ";\n";
    ++k;
  }
  os << "}\n";
  return os.str();
}

DualGraph blowup_at(const DualGraph& g, const BlowupSpec& p) {
  DualGraph out = g;
  switch (p.kind) {
    case PointKind::Origin:
      out.blow_origin();
      break;
    case PointKind::Free:
      out.blow_free(p.e1, p.point);
      break;
    case PointKind::Satellite:
      out.blow_satellite_vertices(p.e1, p.e2);
      break;
  }
  return out;
}

// ------------------------------ invariants ----------------------------------

VertexInvariants vertex_invariants(const DualGraph& g, int v) {
  auto children = g.tree_children();
  long best = -1;
  std::function<void(int)> walk = [&](int u) {
    long b = g.verts()[u].w.b;
    if (best < 0 || b < best) best = b;
    for (int c : children[u]) walk(c);
  };
  walk(v);
  return {g.verts()[v].w.parameter(), g.verts()[v].w.b, best};
}

long edge_segment_mult(const DualGraph& g, int edge_id) {
  const auto& e = g.edges()[edge_id];
  auto parents = g.tree_parents();
  int upper = (parents[e.v_vertex] == e.u_vertex) ? e.v_vertex : e.u_vertex;
  return vertex_invariants(g, upper).mult;
}

Skp vertex_to_skp(const DualGraph& g, int v) {
  if (!g.with_charts)
    throw domain_error("no_charts", "vertex valuations need charts from blowup simulation");
  const auto& vert = g.verts()[v];
  Rat a_target = vert.w.parameter();

  long long k = vert.corner_at_zero ? 1 : 0;
  for (; k < 64; ++k) {
    Rat c(k);
    if (std::find(vert.used_points.begin(), vert.used_points.end(), c) !=
        vert.used_points.end())
      continue;
    // curvette through (0, c): image of the transverse line {v = c}
    TPoly xt = compose(vert.chart_x, TPoly::var(), TPoly::constant(c));
    TPoly yt = compose(vert.chart_y, TPoly::var(), TPoly::constant(c));
    bool swap = false;
    auto ox = xt.ord(), oy = yt.ord();
    if (!ox || (oy && *oy < *ox)) {
      std::swap(xt, yt);
      swap = true;
    }
    BranchParam curvette = BranchParam::raw(xt, yt);
    if (curvette.n() != vert.w.b) continue;  // not generic for this component

    for (int depth = 8; depth <= 512; depth *= 2) {
      BranchSkp bs = skp_of_branch(curvette, depth);
      SkewnessProfile prof = profile(bs.skp);
      ExtRat alpha_end = prof.levels.back().alpha_end;
      if (!bs.reached_curve && prof.thinness_at(alpha_end) < ExtRat(a_target)) continue;
      Rat alpha = prof.skewness_at_thinness(a_target);
      Skp trunc = truncate_at_skewness(bs.skp, alpha);
      if (swap && !trunc.is_multiplicity_valuation())
        trunc = Skp(trunc.keys(), trunc.values(), true);
      return trunc;
    }
    throw domain_error("truncation_insufficient", "curvette SKP did not reach the target");
  }
  throw domain_error("internal", "no generic free point found for the curvette");
}

// ------------------------- branch chart simulation ---------------------------

namespace {

struct SimBranch {
  std::string label;
  RatFun u, v;
};

struct Pending {
  bool at_edge = false;
  int vertex = -1;  // vertex case: point (0, c) with branches recentered
  Rat c;
  int edge = -1;
  std::vector<SimBranch> branches;
};

long ord_of(const RatFun& f) {
  auto o = f.ord();
  if (!o) return -1;  // identically zero: the branch runs along the axis
  return *o;
}

struct SimState {
  DualGraph g;
  std::deque<Pending> work;
  std::vector<NearbyPoint> record;
  std::map<std::string, std::pair<std::string, std::string>> final_params;

  bool terminal(const Pending& p) const {
    if (p.at_edge || p.branches.size() != 1) return false;
    return ord_of(p.branches[0].u) == 1;
  }

  void push_vertex_groups(int fid, std::vector<std::pair<Rat, SimBranch>>&& landings) {
    std::map<Rat, Pending> groups;
    for (auto& [c, nb] : landings) {
      auto it = groups.find(c);
      if (it == groups.end()) {
        Pending np;
        np.vertex = fid;
        np.c = c;
        np.branches.push_back(std::move(nb));
        groups.emplace(c, std::move(np));
      } else {
        it->second.branches.push_back(std::move(nb));
      }
    }
    for (auto& [c, np] : groups) work.push_back(std::move(np));
  }

  void blow(const Pending& p) {
    int fid;
    int edge_lo = -1;  // new edge toward the {u=0}-side component
    int edge_hi = -1;  // new edge toward the {v=0}-side component (satellite only)
    if (!p.at_edge) {
      record.push_back({PointKind::Free, p.vertex, -1});
      fid = g.blow_free(p.vertex, p.c);
      edge_lo = g.find_live_edge(p.vertex, fid);
    } else {
      const auto& e = g.edges()[p.edge];
      record.push_back({PointKind::Satellite, e.u_vertex, e.v_vertex});
      auto res = g.blow_satellite(p.edge);
      fid = res.vertex;
      edge_lo = res.edge_to_u;
      edge_hi = res.edge_to_v;
    }

    std::vector<std::pair<Rat, SimBranch>> vertex_landings;
    Pending lo_group, hi_group;
    lo_group.at_edge = true;
    lo_group.edge = edge_lo;
    hi_group.at_edge = true;
    hi_group.edge = edge_hi;

    for (auto& br : p.branches) {
      long ou = ord_of(br.u), ov = ord_of(br.v);
      bool chart_a = (ou >= 1) && (ov < 0 || ov >= ou);
      if (chart_a) {
        SimBranch nb{br.label, br.u, br.v / br.u};
        Rat c = nb.v.value_at_zero();
        if (c.is_zero() && p.at_edge) {
          hi_group.branches.push_back(std::move(nb));  // corner with the old {v=0} side
        } else {
          nb.v = nb.v - RatFun::constant(c);
          vertex_landings.emplace_back(c, std::move(nb));
        }
      } else {
        SimBranch nb{br.label, br.u / br.v, br.v};
        lo_group.branches.push_back(std::move(nb));
      }
    }
    push_vertex_groups(fid, std::move(vertex_landings));
    if (!lo_group.branches.empty()) work.push_back(std::move(lo_group));
    if (!hi_group.branches.empty()) {
      if (edge_hi < 0) throw domain_error("internal", "corner landing without an edge");
      work.push_back(std::move(hi_group));
    }
  }

  void run(int cap) {
    int steps = 0;
    while (!work.empty()) {
      Pending p = std::move(work.front());
      work.pop_front();
      if (terminal(p)) {
        g.attachments[p.branches[0].label] = p.vertex;
        g.mark_used(p.vertex, p.c);
        final_params[p.branches[0].label] = {p.branches[0].u.str(), p.branches[0].v.str()};
        continue;
      }
      if (++steps > cap)
        throw domain_error("nontermination", "blowup simulation exceeded the step cap");
      blow(p);
    }
  }
};

NearbySequence simulate(const std::vector<std::pair<std::string, BranchParam>>& branches,
                        int cap) {
  SimState st;
  st.record.push_back({PointKind::Origin, -1, -1});
  st.g.blow_origin();

  std::vector<std::pair<Rat, SimBranch>> landings;
  for (auto& [label, bp] : branches) {
    RatFun u = RatFun::from_poly(bp.xt());
    RatFun v = RatFun::from_poly(bp.yt()) / u;  // transversality: ord y >= ord x
    Rat c = v.value_at_zero();
    landings.emplace_back(c, SimBranch{label, u, v - RatFun::constant(c)});
  }
  st.push_vertex_groups(0, std::move(landings));

  bool complete = true;
  try {
    st.run(cap);
  } catch (const domain_error& e) {
    if (std::string(e.kind()) == "nontermination")
      complete = false;
    else
      throw;
  }
  return {std::move(st.record), std::move(st.g), complete, std::move(st.final_params)};
}

}  // namespace

NearbySequence nearby_points_of_branch(const BranchParam& c, int max_points) {
  return simulate({{std::string("C"), c}}, max_points);
}

DualGraph minimal_desing_from_branches(
    const std::vector<std::pair<std::string, BranchParam>>& branches) {
  for (size_t i = 0; i < branches.size(); ++i)
    for (size_t j = i + 1; j < branches.size(); ++j) {
      if (branches[i].second == branches[j].second)
        throw domain_error("invalid_input", "branches must be pairwise distinct");
      if (branches[i].first == branches[j].first)
        throw domain_error("invalid_input", "branch labels must be distinct");
    }
  auto seq = simulate(branches, 500);
  if (!seq.normal_crossings)
    throw domain_error("nontermination", "desingularization exceeded the step cap");
  return std::move(seq.graph);
}

// --------------------------- equisingularity data ----------------------------

const Rat& EquisingData::contact(int i, int j) const {
  auto it = contacts.find({std::min(i, j), std::max(i, j)});
  if (it == contacts.end()) throw domain_error("invalid_input", "missing contact parameter");
  return it->second;
}

void EquisingData::validate() const {
  for (auto& b : branches) {
    if (b.n < 1) throw domain_error("invalid_input", "branch multiplicity must be positive");
    Rat prev(2);
    for (auto& a : b.charA) {
      if (!(a > prev))
        throw domain_error("invalid_input",
                           "characteristic parameters must exceed 2 and increase");
      prev = a;
    }
  }
  int r = static_cast<int>(branches.size());
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (contact(i, j) < Rat(2))
        throw domain_error("invalid_input", "contacts start at 2");
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      for (int k = j + 1; k < r; ++k) {
        // ultrametric: the two smallest of the three pairwise contacts agree
        std::vector<Rat> v{contact(i, j), contact(i, k), contact(j, k)};
        std::sort(v.begin(), v.end());
        if (v[0] != v[1])
          throw domain_error("invalid_input", "contact parameters violate the ultrametric");
      }
}

EquisingData equising_data_from_branches(
    const std::vector<std::pair<std::string, BranchParam>>& branches) {
  EquisingData d;
  std::vector<SkewnessProfile> profiles;
  for (auto& [label, bp] : branches) {
    Skp s = skp_of_branch(bp, 64).skp;
    InvariantReport rep = invariants(s);
    EquisingData::Branch b;
    b.label = label;
    b.n = bp.n();
    for (auto& ap : rep.approx) b.charA.push_back(ap.thinness);
    d.branches.push_back(std::move(b));
    profiles.push_back(profile(s));
  }
  for (size_t i = 0; i < branches.size(); ++i)
    for (size_t j = i + 1; j < branches.size(); ++j) {
      ExtRat inter = intersection_number_general(branches[i].second, branches[j].second);
      Rat alpha =
          inter.finite() / (Rat(branches[i].second.n()) * Rat(branches[j].second.n()));
      Rat a_i = profiles[i].thinness_at(ExtRat(alpha)).finite();
      Rat a_j = profiles[j].thinness_at(ExtRat(alpha)).finite();
      if (a_i != a_j)
        throw domain_error("internal", "contact thinness disagrees between the profiles");
      d.contacts[{static_cast<int>(i), static_cast<int>(j)}] = a_i;
    }
  d.validate();
  return d;
}

// --------------------- desingularization from the data -----------------------

DualGraph minimal_desing_from_equising(const EquisingData& data) {
  data.validate();
  int r = static_cast<int>(data.branches.size());

  DualGraph g;
  g.with_charts = false;
  g.blow_origin();

  std::vector<std::vector<int>> vertexJ{{}};  // branch indices at a free point of a vertex
  std::map<int, std::vector<int>> edgeJ;      // keyed by live edge id
  std::vector<size_t> next_char(r, 0);        // realized characteristic count per branch

  for (int j = 0; j < r; ++j) vertexJ[0].push_back(j);

  auto charA = [&](int j) -> ExtRat {
    if (next_char[j] >= data.branches[j].charA.size()) return ExtRat::infinity();
    return ExtRat(data.branches[j].charA[next_char[j]]);
  };

  for (int round = 0; round < 500; ++round) {
    bool acted = false;

    // vertex modifications, creation order, on the vertex set of this round
    size_t vcount = g.vertex_count();
    for (size_t v = 0; v < vcount; ++v) {
      if (vertexJ[v].empty()) continue;
      Rat Ae = g.verts()[v].w.parameter();
      std::vector<int> here = std::move(vertexJ[v]);
      vertexJ[v].clear();
      // partition: same class iff the contact exceeds A(E)
      std::vector<std::vector<int>> classes;
      std::vector<bool> taken(here.size(), false);
      for (size_t i = 0; i < here.size(); ++i) {
        if (taken[i]) continue;
        std::vector<int> cls{here[i]};
        taken[i] = true;
        for (size_t t = i + 1; t < here.size(); ++t) {
          if (taken[t]) continue;
          if (data.contact(here[i], here[t]) > Ae) {
            cls.push_back(here[t]);
            taken[t] = true;
          }
        }
        classes.push_back(std::move(cls));
      }
      std::vector<int> keep;
      for (auto& cls : classes) {
        bool needs = cls.size() >= 2;
        for (int j : cls)
          if (next_char[j] < data.branches[j].charA.size()) needs = true;
        if (!needs) {
          keep.insert(keep.end(), cls.begin(), cls.end());
          continue;
        }
        acted = true;
        int f = g.blow_free(static_cast<int>(v));
        vertexJ.push_back({});
        int fe = g.find_live_edge(static_cast<int>(v), f);
        Rat Af = g.verts()[f].w.parameter();
        for (int j : cls) {
          ExtRat target = charA(j);
          if (ExtRat(Af) == target)
            throw domain_error("invalid_input",
                               "characteristic parameter reached by a free blowup");
          if (ExtRat(Af) < target)
            vertexJ[f].push_back(j);
          else
            edgeJ[fe].push_back(j);
        }
      }
      vertexJ[v] = std::move(keep);
    }

    // edge modifications, creation order, on the edge set of this round
    std::vector<int> pending_edges;
    for (auto& [eid, js] : edgeJ)
      if (!js.empty() && g.edges()[eid].alive) pending_edges.push_back(eid);
    for (int eid : pending_edges) {
      std::vector<int> js = std::move(edgeJ[eid]);
      edgeJ.erase(eid);
      acted = true;
      const auto& e = g.edges()[eid];
      Rat Au = g.verts()[e.u_vertex].w.parameter();
      Rat Av = g.verts()[e.v_vertex].w.parameter();
      bool u_is_lower = Au < Av;
      auto res = g.blow_satellite(eid);
      while (vertexJ.size() < g.vertex_count()) vertexJ.push_back({});
      int f = res.vertex;
      Rat Af = g.verts()[f].w.parameter();
      int edge_lower = u_is_lower ? res.edge_to_u : res.edge_to_v;
      int edge_upper = u_is_lower ? res.edge_to_v : res.edge_to_u;
      for (int j : js) {
        ExtRat target = charA(j);
        if (ExtRat(Af) == target) {
          next_char[j]++;
          vertexJ[f].push_back(j);
        } else if (ExtRat(Af) > target) {
          edgeJ[edge_lower].push_back(j);
        } else {
          edgeJ[edge_upper].push_back(j);
        }
      }
    }

    if (!acted) {
      for (size_t v = 0; v < g.vertex_count(); ++v)
        for (int j : vertexJ[v]) g.attachments[data.branches[j].label] = static_cast<int>(v);
      return g;
    }
  }
  throw domain_error("nontermination",
                     "equisingularity algorithm exceeded the iteration cap");
}

// --------------------------- classical invariants ----------------------------

ClassicalInvariants classical_invariants(const BranchParam& c) {
  // deepen until the curve end, or until the degree ladder reaches n (after
  // which no further multiplicity jumps are possible)
  BranchSkp bs = skp_of_branch(c, 8);
  for (int depth = 16; !bs.reached_curve && bs.skp.d(bs.skp.length()) < c.n() && depth <= 512;
       depth *= 2)
    bs = skp_of_branch(c, depth);
  InvariantReport rep = invariants(bs.skp);

  ClassicalInvariants out;
  out.n = c.n();
  out.g = static_cast<int>(rep.approx.size());
  long e_prev = out.n;
  for (int i = 0; i < out.g; ++i) {
    Rat beta_i = Rat(out.n) * (rep.approx[i].thinness - Rat(1));
    if (!beta_i.is_integer())
      throw domain_error("internal", "characteristic exponent is not an integer");
    long bi = static_cast<long>(beta_i.num());
    out.beta.push_back(bi);
    long ei = static_cast<long>(int_gcd(Int(e_prev), Int(bi)));
    out.e.push_back(ei);
    out.nseq.push_back(e_prev / ei);
    e_prev = ei;
  }
  out.beta_bar.push_back(out.n);
  for (int i = 0; i < out.g; ++i) {
    long bb;
    if (i == 0)
      bb = out.beta[0];
    else
      bb = out.nseq[i - 1] * out.beta_bar[i] + out.beta[i] - out.beta[i - 1];
    out.beta_bar.push_back(bb);
    // cross-check against the tree-side identity beta_bar_i / n = alpha_i m_i
    Rat tree_side = rep.approx[i].alpha * Rat(rep.approx[i].mult) * Rat(out.n);
    if (tree_side != Rat(bb))
      throw domain_error("internal", "semigroup generator disagrees with the tree route");
  }
  return out;
}

// -------------------------------- Eggers tree --------------------------------

EggersTree eggers_tree(const EquisingData& data) {
  data.validate();
  int r = static_cast<int>(data.branches.size());

  auto kval = [&](int i, int j) { return data.contact(i, j) - Rat(1); };

  // Shared segments must carry identical node lists, so each branch's path
  // includes foreign marks lying below the gluing parameter.
  std::vector<std::vector<ExtRat>> params(r);
  for (int j = 0; j < r; ++j) {
    std::vector<ExtRat>& pj = params[j];
    pj.push_back(ExtRat(Rat(1)));
    for (auto& a : data.branches[j].charA) pj.push_back(ExtRat(a - Rat(1)));
    for (int i = 0; i < r; ++i) {
      if (i == j) continue;
      Rat K = kval(std::min(i, j), std::max(i, j));
      pj.push_back(ExtRat(K));
      for (auto& a : data.branches[i].charA)
        if (a - Rat(1) <= K) pj.push_back(ExtRat(a - Rat(1)));
    }
    pj.push_back(ExtRat::infinity());
    std::sort(pj.begin(), pj.end(), [](const ExtRat& a, const ExtRat& b) { return a < b; });
    pj.erase(std::unique(pj.begin(), pj.end()), pj.end());
  }

  auto rep_of = [&](int j, const ExtRat& t) {
    int rep = j;
    for (int i = 0; i < r; ++i) {
      if (i == j) continue;
      if (t.is_finite() && ExtRat(kval(std::min(i, j), std::max(i, j))) >= t)
        rep = std::min(rep, i);
    }
    return rep;
  };

  EggersTree tree;
  std::map<std::pair<int, std::string>, int> index;
  auto node_id = [&](int j, const ExtRat& t) {
    int rep = rep_of(j, t);
    auto key = std::make_pair(rep, t.str());
    auto it = index.find(key);
    if (it != index.end()) {
      tree.nodes[it->second].branches.push_back(j);
      return it->second;
    }
    EggersTree::Node n;
    n.param = t;
    n.is_end = t.is_infinite();
    n.is_mark = true;
    n.branches.push_back(j);
    tree.nodes.push_back(std::move(n));
    int id = static_cast<int>(tree.nodes.size()) - 1;
    index.emplace(key, id);
    return id;
  };

  for (int j = 0; j < r; ++j) {
    int prev = -1;
    for (auto& t : params[j]) {
      int id = node_id(j, t);
      if (prev >= 0 && tree.nodes[id].parent < 0 && id != 0) tree.nodes[id].parent = prev;
      prev = id;
    }
  }
  for (auto& n : tree.nodes) {
    std::sort(n.branches.begin(), n.branches.end());
    n.branches.erase(std::unique(n.branches.begin(), n.branches.end()), n.branches.end());
  }
  return tree;
}

std::string EggersTree::canonical_string() const {
  std::vector<std::vector<int>> children(nodes.size());
  int root = -1;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].parent < 0)
      root = static_cast<int>(i);
    else
      children[nodes[i].parent].push_back(static_cast<int>(i));
  }
  std::function<std::string(int)> enc = [&](int v) -> std::string {
    std::string s = nodes[v].param.str();
    if (nodes[v].is_end) {
      s += "{";
      for (int b : nodes[v].branches) s += "#" + std::to_string(b);
      s += "}";
    }
    std::vector<std::string> subs;
    for (int c : children[v]) subs.push_back(enc(c));
    std::sort(subs.begin(), subs.end());
    s += "[";
    for (auto& sub : subs) s += sub;
    s += "]";
    return s;
  };
  return enc(root);
}

}  // namespace valtree
