#include "valtree/selftest.hpp"

#include <future>
#include <random>
#include <sstream>

#include "valtree/cli.hpp"
#include "valtree/dualgraph.hpp"
#include "valtree/treemeasure.hpp"

namespace valtree::selftest {

namespace {

Rat rq(long long n, long long d = 1) { return Rat(Int(n), Int(d)); }

std::vector<std::pair<std::string, std::string>> corpus_specs() {
  return {
      {"L0", "n=1; y=0"},          {"L1", "n=1; y=t"},
      {"L2", "n=1; y=-t"},         {"P", "n=1; y=t^2"},
      {"K23", "n=2; y=t^3"},       {"K23b", "n=2; y=t^3+t^5"},
      {"K23c", "x = t^2+t^4; y = t^3*(1+t^2)^2"},
      {"K34", "n=3; y=t^4"},       {"K35", "n=3; y=t^5"},
      {"K34b", "n=3; y=t^4+t^5"},  {"Z2", "n=4; y=t^6+t^7"},
      {"K25", "n=2; y=t^5"},
  };
}

std::vector<std::pair<std::string, BranchParam>> corpus() {
  std::vector<std::pair<std::string, BranchParam>> out;
  for (auto& [label, text] : corpus_specs()) out.emplace_back(label, BranchParam::parse(text));
  return out;
}

struct Counter {
  long checks = 0;
  bool ok = true;
  std::string first_failure;
  void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond && ok) {
      ok = false;
      first_failure = what;
    }
  }
};

BiPoly random_poly(std::mt19937& rng, int maxdeg) {
  BiPoly p;
  int terms = 1 + static_cast<int>(rng() % 5);
  for (int k = 0; k < terms; ++k) {
    int i = static_cast<int>(rng() % (maxdeg + 1));
    int j = static_cast<int>(rng() % (maxdeg + 1 - i));
    long long num = static_cast<long long>(rng() % 13) - 6;
    p.set(i, j, rq(num, 1 + static_cast<long long>(rng() % 3)));
  }
  return p;
}

// Random valid SKP of length <= 3 with value heights <= 12.
Skp random_skp(std::mt19937& rng) {
  long long p = 1 + static_cast<long long>(rng() % 12);
  long long q = 1 + static_cast<long long>(rng() % 12);
  if (p < q) std::swap(p, q);
  Skp s = Skp::monomial(ExtRat(rq(p, q)));
  int extensions = static_cast<int>(rng() % 3);
  for (int e = 0; e < extensions; ++e) {
    FinalLevel fl = final_level_decomposition(s);
    static const long long thetas[] = {1, -1, 2, -2, 3, -3};
    Rat theta = rq(thetas[rng() % 6], 1 + static_cast<long long>(rng() % 2));
    BiPoly prod = BiPoly::constant(rq(1));
    for (size_t l = 0; l < fl.m.size(); ++l)
      prod = prod * s.keys()[l].pow(static_cast<int>(fl.m[l]));
    BiPoly next = s.keys().back().pow(static_cast<int>(fl.n)) - prod * theta;
    Rat base = s.values().back().finite() * Rat(fl.n);
    Rat bump = rq(1 + static_cast<long long>(rng() % 12), 1 + static_cast<long long>(rng() % 12));
    std::vector<BiPoly> keys = s.keys();
    keys.push_back(next);
    std::vector<ExtRat> values = s.values();
    values.push_back(ExtRat(base + bump));
    s = Skp(keys, values, false);
  }
  return s;
}

// ------------------------------ criterion 1 ----------------------------------

CheckResult criterion_valuation_axioms() {
  Counter c;
  std::mt19937 rng(20260808);
  for (int it = 0; it < 200; ++it) {
    Skp s = random_skp(rng);
    for (int j = 0; j <= s.length(); ++j)
      c.expect(eval(s, s.keys()[j]) == s.values()[j], "key value mismatch");
    for (int pair = 0; pair < 2; ++pair) {
      BiPoly a = random_poly(rng, 6), b = random_poly(rng, 6);
      if (a.is_zero() || b.is_zero()) continue;
      ExtRat va = eval(s, a), vb = eval(s, b);
      c.expect(eval(s, a * b) == va + vb, "additivity fails");
      c.expect(eval(s, a + b) >= min(va, vb), "ultrametric inequality fails");
    }
  }
  return {"1", "valuation axioms on 200 random SKPs", c.ok,
          c.ok ? std::to_string(c.checks) + " exact checks" : c.first_failure};
}

// ------------------------------ criterion 2 ----------------------------------

CheckResult criterion_oracle_equivalence() {
  Counter c;
  for (auto& [label, bp] : corpus()) {
    Skp s = skp_of_branch(bp, 48).skp;
    Rat inv_n = rq(1) / rq(bp.n());
    for (int i = 0; i + 0 <= 8; ++i)
      for (int j = 0; i + j <= 8; ++j) {
        if (i == 0 && j == 0) continue;
        BiPoly mono = BiPoly::monomial(i, j, rq(1));
        ExtRat direct = substitute_order(mono, bp);
        ExtRat viaskp = eval(s, mono);
        bool same = direct.is_infinite() ? viaskp.is_infinite()
                                         : viaskp == ExtRat(direct.finite() * inv_n);
        c.expect(same, "oracle mismatch on " + label + " at x^" + std::to_string(i) +
                           "y^" + std::to_string(j));
      }
  }
  return {"2", "substitution-order oracle equivalence over the corpus", c.ok,
          c.ok ? std::to_string(c.checks) + " exact checks" : c.first_failure};
}

// ------------------------------ criterion 3 ----------------------------------

std::vector<DualGraph> corpus_graphs(size_t max_vertices) {
  std::vector<DualGraph> graphs;
  for (auto& [label, bp] : corpus()) {
    DualGraph g = minimal_desing_from_branches({{label, bp}});
    if (g.vertex_count() <= max_vertices) graphs.push_back(std::move(g));
  }
  DualGraph f18 = minimal_desing_from_branches(
      {{"C1", BranchParam::parse("n=2; y=t^3")},
       {"C2", BranchParam::parse("x = t^2+t^4; y = t^3*(1+t^2)^2")}});
  if (f18.vertex_count() <= max_vertices) graphs.push_back(std::move(f18));
  return graphs;
}

void enumerate_graphs(DualGraph& g, int remaining, std::vector<DualGraph>& out) {
  out.push_back(g);
  if (remaining == 0) return;
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    DualGraph next = g;
    next.blow_free(static_cast<int>(v));
    enumerate_graphs(next, remaining - 1, out);
  }
  for (size_t e = 0; e < g.edges().size(); ++e) {
    if (!g.edges()[e].alive) continue;
    DualGraph next = g;
    next.blow_satellite(static_cast<int>(e));
    enumerate_graphs(next, remaining - 1, out);
  }
}

std::vector<DualGraph> abstract_graphs(int depth) {
  DualGraph g;
  g.blow_origin();
  std::vector<DualGraph> out;
  enumerate_graphs(g, depth - 1, out);
  return out;
}

CheckResult criterion_graph_valuation_isometry() {
  Counter c;
  std::vector<DualGraph> graphs = corpus_graphs(8);
  for (auto& g : abstract_graphs(4)) graphs.push_back(g);
  for (auto& g : graphs) {
    for (size_t v = 0; v < g.vertex_count(); ++v) {
      auto gi = vertex_invariants(g, static_cast<int>(v));
      InvariantReport rep = invariants(vertex_to_skp(g, static_cast<int>(v)));
      c.expect(rep.thinness == ExtRat(gi.thinness), "thinness != Farey parameter");
      c.expect(rep.generic_mult.has_value() &&
                   rep.generic_mult.value() == gi.generic_mult,
               "generic multiplicity != Farey b");
    }
    for (size_t e = 0; e < g.edges().size(); ++e) {
      if (!g.edges()[e].alive) continue;
      auto wa = g.verts()[g.edges()[e].u_vertex].w;
      auto wb = g.verts()[g.edges()[e].v_vertex].w;
      long long det = wa.a * wb.b - wb.a * wa.b;
      if (det < 0) det = -det;
      c.expect(det == edge_segment_mult(g, static_cast<int>(e)),
               "determinant law fails on an edge");
    }
  }
  return {"3", "Farey side equals SKP side on all generated graphs", c.ok,
          c.ok ? std::to_string(graphs.size()) + " graphs, " + std::to_string(c.checks) +
                     " exact checks"
               : c.first_failure};
}

// ------------------------------ criterion 4 ----------------------------------

CheckResult criterion_desing_equality() {
  Counter c;
  std::vector<std::vector<std::pair<std::string, BranchParam>>> inputs;
  for (auto& e : corpus()) inputs.push_back({e});
  inputs.push_back({{"C1", BranchParam::parse("n=2; y=t^3")},
                    {"C2", BranchParam::parse("x = t^2+t^4; y = t^3*(1+t^2)^2")}});
  inputs.push_back({{"C1", BranchParam::parse("n=1; y=t")},
                    {"C2", BranchParam::parse("n=1; y=-t")}});
  inputs.push_back({{"C1", BranchParam::parse("n=2; y=t^3")},
                    {"C2", BranchParam::parse("n=3; y=t^4")}});
  inputs.push_back({{"C1", BranchParam::parse("n=2; y=t^3")},
                    {"C2", BranchParam::parse("n=1; y=0")},
                    {"C3", BranchParam::parse("n=1; y=t")}});

  // the tangential-pair contact comes from the substitution oracle
  ExtRat inter = intersection_number_general(
      BranchParam::parse("n=2; y=t^3"),
      BranchParam::parse("x = t^2+t^4; y = t^3*(1+t^2)^2"));
  c.expect(inter == ExtRat(rq(8)), "tangential pair intersection is not 8");

  for (auto& in : inputs) {
    EquisingData data = equising_data_from_branches(in);
    if (in.size() == 2 && in[1].first == "C2" && !in[1].second.normal_exact())
      c.expect(data.contact(0, 1) == rq(7, 2), "tangential pair contact is not 7/2");
    DualGraph oracle = minimal_desing_from_branches(in);
    DualGraph algo = minimal_desing_from_equising(data);
    c.expect(algo.canonical_string() == oracle.canonical_string(),
             "equisingularity output differs from the chart oracle");
  }
  return {"4", "desingularization from data matches the chart oracle", c.ok,
          c.ok ? std::to_string(inputs.size()) + " configurations" : c.first_failure};
}

// ------------------------------ criterion 5 ----------------------------------

CheckResult criterion_classical_dictionary() {
  Counter c;
  for (auto& [label, bp] : corpus()) {
    ClassicalInvariants ci = classical_invariants(bp);  // cross-checks both routes
    Skp s = skp_of_branch(bp, 64).skp;
    InvariantReport rep = invariants(s);
    c.expect(static_cast<int>(rep.approx.size()) == ci.g, "genus mismatch on " + label);
    for (int i = 0; i < ci.g; ++i) {
      Rat tree_side = rep.approx[i].alpha * rq(rep.approx[i].mult) * rq(ci.n);
      c.expect(tree_side == rq(ci.beta_bar[i + 1]),
               "semigroup generator mismatch on " + label);
      Rat farey_side = rq(ci.n) * (rep.approx[i].thinness - rq(1));
      c.expect(farey_side == rq(ci.beta[i]), "characteristic exponent mismatch on " + label);
    }
  }
  ClassicalInvariants cusp = classical_invariants(BranchParam::parse("n=2; y=t^3"));
  c.expect(cusp.beta_bar == std::vector<long>{2, 3}, "cusp semigroup is not {2,3}");
  return {"5", "classical dictionary verified on every corpus branch", c.ok,
          c.ok ? std::to_string(c.checks) + " exact checks" : c.first_failure};
}

// ------------------------------ criterion 6 ----------------------------------

CheckResult criterion_zariski() {
  Counter c;
  AtomicMeasure expect2vm(
      {{Skp::multiplicity_valuation(), ComplexRat(rq(2)), false}});
  IdealSpec sq = IdealSpec::monomial(2, 2);
  c.expect(laplacian(tree_transform(sq)) == expect2vm, "(x^2,y^2) measure is not 2 v_m");
  IdealSpec full;
  full.branches = {axis_branch(true), axis_branch(false)};
  full.generators = {{{0, 2}}, {{0, 1}, {1, 1}}, {{1, 2}}};
  c.expect(laplacian(tree_transform(full)) == expect2vm,
           "(x^2,xy,y^2) measure is not 2 v_m");
  c.expect(integral_closure_member({{0, 1}, {1, 1}}, sq), "xy is not in the closure");

  std::mt19937 rng(616);
  std::vector<DeclaredBranch> pool = {axis_branch(true), axis_branch(false),
                                      make_branch("C1", BranchParam::parse("n=2; y=t^3")),
                                      make_branch("C2", BranchParam::parse("n=3; y=t^4")),
                                      make_branch("C3", BranchParam::parse("n=1; y=t"))};
  auto random_ideal = [&]() {
    IdealSpec spec;
    spec.branches = pool;
    int ngens = 1 + static_cast<int>(rng() % 3);
    for (int g = 0; g < ngens; ++g) {
      std::map<int, long> exps;
      int nf = 1 + static_cast<int>(rng() % 2);
      for (int f = 0; f < nf; ++f)
        exps[static_cast<int>(rng() % pool.size())] += 1 + rng() % 2;
      IdealSpec::Generator gen;
      for (auto& [b, e] : exps) gen.push_back({b, e});
      spec.generators.push_back(std::move(gen));
    }
    return spec;
  };
  for (int it = 0; it < 50; ++it) {
    IdealSpec i = random_ideal(), j = random_ideal();
    TreePotential gi = tree_transform(i);
    c.expect(gi.check_positive().ok, "transform violates the positivity conditions");
    AtomicMeasure ri = laplacian(gi);
    AtomicMeasure rj = laplacian(tree_transform(j));
    c.expect(laplacian(tree_transform(i.product(j))) == ri + rj,
             "product measure is not additive");
    c.expect(ri.mass() == ComplexRat(rq(i.min_multiplicity())),
             "measure mass differs from m(I)");
    c.expect(rj.mass() == ComplexRat(rq(j.min_multiplicity())),
             "measure mass differs from m(J)");
  }
  return {"6", "Zariski measures: pinned examples plus 50 random products", c.ok,
          c.ok ? std::to_string(c.checks) + " exact checks" : c.first_failure};
}

// ------------------------------ criterion 7 ----------------------------------

struct MonomialStaircase {
  std::vector<std::pair<long, long>> gens;
  MonomialStaircase product(const MonomialStaircase& o) const {
    MonomialStaircase out;
    for (auto& g : gens)
      for (auto& h : o.gens) out.gens.push_back({g.first + h.first, g.second + h.second});
    return out;
  }
  MonomialStaircase power(long k) const {
    MonomialStaircase out = *this;
    for (long i = 1; i < k; ++i) out = out.product(*this);
    return out;
  }
  long codim() const {
    long bound = 0;
    for (auto& g : gens) bound = std::max({bound, g.first, g.second});
    long count = 0;
    for (long i = 0; i <= 2 * bound + 1; ++i)
      for (long j = 0; j <= 2 * bound + 1; ++j) {
        bool inside = false;
        for (auto& g : gens)
          if (i >= g.first && j >= g.second) inside = true;
        if (!inside) ++count;
      }
    return count;
  }
};

long staircase_mixed(const MonomialStaircase& i, const MonomialStaircase& j) {
  auto dim = [&](long n, long m) {
    return i.power(n).product(j.power(m)).codim();
  };
  return dim(3, 3) - dim(2, 3) - dim(3, 2) + dim(2, 2);
}

CheckResult criterion_mixed_multiplicities() {
  Counter c;
  c.expect(mixed_multiplicity(IdealSpec::monomial(2, 3), IdealSpec::monomial(2, 3)) == rq(6),
           "e(x^2,y^3) is not 6");
  for (long a = 1; a <= 3; ++a)
    for (long b = 1; b <= 3; ++b) {
      IdealSpec ma = IdealSpec::monomial(1, 1).power(a);
      IdealSpec mb = IdealSpec::monomial(1, 1).power(b);
      c.expect(mixed_multiplicity(ma, mb) == rq(a * b), "e(m^a, m^b) is not ab");
    }
  std::vector<std::pair<long, long>> shapes = {{2, 3}, {1, 1}, {3, 2}, {2, 5}, {4, 3}, {1, 4}};
  long pairs = 0;
  for (size_t x = 0; x < shapes.size(); ++x)
    for (size_t y = x; y < shapes.size(); ++y) {
      IdealSpec i = IdealSpec::monomial(shapes[x].first, shapes[x].second);
      IdealSpec j = IdealSpec::monomial(shapes[y].first, shapes[y].second);
      MonomialStaircase mi{{{shapes[x].first, 0}, {0, shapes[x].second}}};
      MonomialStaircase mj{{{shapes[y].first, 0}, {0, shapes[y].second}}};
      c.expect(mixed_multiplicity(i, j) == rq(staircase_mixed(mi, mj)),
               "lattice oracle disagrees");
      ++pairs;
    }

  // principal ideals: the pairing of their tree measures recovers the
  // substitution-order intersection number of the branches
  std::vector<std::pair<std::string, std::string>> principal_pairs = {
      {"n=2; y=t^3", "n=1; y=t"},      {"n=2; y=t^3", "n=3; y=t^4"},
      {"n=2; y=t^5", "n=3; y=t^4"},    {"n=2; y=t^3", "n=1; y=0"},
      {"n=4; y=t^6+t^7", "n=2; y=t^3"}};
  for (auto& [t1, t2] : principal_pairs) {
    BranchParam b1 = BranchParam::parse(t1), b2 = BranchParam::parse(t2);
    IdealSpec p1, p2;
    p1.branches = {make_branch("A", b1), make_branch("B", b2)};
    p1.generators = {{{0, 1}}};
    p2.branches = p1.branches;
    p2.generators = {{{1, 1}}};
    AtomicMeasure r1 = laplacian(tree_transform(p1));
    AtomicMeasure r2 = laplacian(tree_transform(p2));
    ExtRat direct = intersection_number_general(b1, b2);
    c.expect(inner_product(r1, r2).re == direct,
             "principal pairing differs from the intersection number");
    ++pairs;
  }
  return {"7", "mixed multiplicities against the staircase oracle", c.ok,
          c.ok ? std::to_string(pairs + 10) + " pairs, exact" : c.first_failure};
}

// ------------------------------ criterion 8 ----------------------------------

CheckResult criterion_cohomology_isometry() {
  Counter c;
  std::vector<DualGraph> graphs = corpus_graphs(6);
  for (auto& g : abstract_graphs(4)) graphs.push_back(g);
  for (auto& g : graphs) {
    int n = static_cast<int>(g.vertex_count());
    std::vector<AtomicMeasure> rho;
    std::vector<CohomClass> cls;
    for (int v = 0; v < n; ++v) {
      rho.push_back(class_measure(g, v));
      cls.push_back(class_of_vertex(g, v));
    }
    for (int a = 0; a < n; ++a) {
      for (auto& atom : rho[a].atoms()) {
        InvariantReport rep = invariants(atom.node);
        Rat q = atom.mass.re / rq(rep.generic_mult.value());
        c.expect(atom.mass.is_real() && q.is_integer(),
                 "class measure mass is not in b(v) Z");
      }
      for (int b = 0; b < n; ++b) {
        InnerProduct p = inner_product(rho[a], rho[b]);
        ComplexRat neg = ComplexRat(Rat(0)) - cls[a].pair(cls[b]);
        c.expect(p.re == ExtRat(neg.re) && p.im == neg.im,
                 "-omega.omega' differs from rho.rho'");
        c.expect(p.re == ExtRat(a == b ? rq(1) : rq(0)), "pairing is not Kronecker");
      }
    }
    for (int v = 0; v < n; ++v) {
      Skp s = vertex_to_skp(g, v);
      CohomClass w = class_of_divisorial(s, g);
      InvariantReport rep = invariants(s);
      Rat b2a = rq(rep.generic_mult.value()) * rq(rep.generic_mult.value()) *
                rep.alpha.finite();
      ComplexRat neg = ComplexRat(Rat(0)) - w.pair(w);
      c.expect(neg == ComplexRat(b2a), "-omega.omega differs from b^2 alpha");
    }
  }
  return {"8", "cohomology classes pair like their tree measures", c.ok,
          c.ok ? std::to_string(graphs.size()) + " graphs, " + std::to_string(c.checks) +
                     " exact checks"
               : c.first_failure};
}

// ------------------------------ criterion 9 ----------------------------------

CheckResult criterion_determinism() {
  Counter c;
  std::vector<std::vector<std::string>> commands = {
      {"invariants", "--branch", "n=2; y=t^3"},
      {"invariants", "--branch", "n=2; y=t^3", "--json"},
      {"skp", "--branch", "n=2; y=t^3+t^5", "--json"},
      {"desing", "--branch", "n=2; y=t^3", "--dot"},
      {"desing", "--branch", "n=2; y=t^3", "--branch", "x = t^2+t^4; y = t^3*(1+t^2)^2",
       "--json"},
      {"mult", "--ideal", "x^2, y^3"},
      {"ideal-factor", "--ideal", "x^2, y^3", "--json"},
      {"classical", "--branch", "n=4; y=t^6+t^7", "--json"},
      {"eggers", "--branch", "n=2; y=t^3", "--branch", "n=1; y=t"},
      {"wedge", "--branch", "n=2; y=t^3", "--branch", "n=1; y=t", "--json"},
      {"classmeasure", "--branch", "n=2; y=t^3", "--vertex", "2"},
      {"closure", "--ideal", "x^2, y^2", "--poly", "x*y"},
  };
  for (auto& cmd : commands) {
    std::ostringstream out1, err1, out2, err2;
    int rc1 = cli_run(cmd, out1, err1);
    int rc2 = cli_run(cmd, out2, err2);
    c.expect(rc1 == 0, "command failed: " + cmd[0] + " (" + err1.str() + ")");
    c.expect(rc1 == rc2 && out1.str() == out2.str() && err1.str() == err2.str(),
             "output is not byte-stable for " + cmd[0]);
    c.expect(!out1.str().empty(), "no output from " + cmd[0]);
  }
  return {"9", "CLI outputs byte-stable across repeated runs", c.ok,
          c.ok ? std::to_string(commands.size()) + " commands run twice" : c.first_failure};
}

}  // namespace

std::vector<CheckResult> run_all(int jobs) {
  std::vector<std::function<CheckResult()>> criteria = {
      criterion_valuation_axioms,   criterion_oracle_equivalence,
      criterion_graph_valuation_isometry, criterion_desing_equality,
      criterion_classical_dictionary, criterion_zariski,
      criterion_mixed_multiplicities, criterion_cohomology_isometry,
      criterion_determinism,
  };
  std::vector<CheckResult> results(criteria.size());
  if (jobs <= 1) {
    for (size_t i = 0; i < criteria.size(); ++i) results[i] = criteria[i]();
    return results;
  }
  std::vector<std::future<CheckResult>> futures;
  for (auto& fn : criteria) futures.push_back(std::async(std::launch::async, fn));
  for (size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  return results;
}

std::string format_table(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  bool all = true;
  for (auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.description << " ["
       << r.detail << "]\n";
    all &= r.pass;
  }
  os << (all ? "all criteria passed" : "SOME CRITERIA FAILED") << "\n";
  return os.str();
}

}  // namespace valtree::selftest
