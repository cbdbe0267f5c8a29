#include <random>

#include "doctest.h"
#include "valtree/dualgraph.hpp"
#include "valtree/treemeasure.hpp"

using namespace valtree;

static Rat rq(long long n, long long d = 1) { return Rat(Int(n), Int(d)); }
static ExtRat er(long long n, long long d = 1) { return ExtRat(rq(n, d)); }
static BranchParam B(const std::string& s) { return BranchParam::parse(s); }

TEST_CASE("three characteristic pairs: (t^8, t^12 + t^14 + t^15)") {
  BranchParam c = B("n=8; y=t^12+t^14+t^15");
  auto ci = classical_invariants(c);
  CHECK(ci.n == 8);
  CHECK(ci.g == 3);
  CHECK(ci.beta == std::vector<long>{12, 14, 15});
  CHECK(ci.e == std::vector<long>{4, 2, 1});
  CHECK(ci.nseq == std::vector<long>{2, 2, 2});
  CHECK(ci.beta_bar == std::vector<long>{8, 12, 26, 53});

  auto bs = skp_of_branch(c, 48);
  CHECK(bs.reached_curve);
  auto rep = invariants(bs.skp);
  REQUIRE(rep.approx.size() == 3);
  CHECK(rep.approx[0].alpha == rq(3, 2));
  CHECK(rep.approx[0].mult == 1);
  CHECK(rep.approx[1].mult == 2);
  CHECK(rep.approx[2].mult == 4);
  // semigroup generators over the approximating sequence: beta_bar / n
  CHECK(rep.approx[0].alpha * rq(rep.approx[0].mult) == rq(12, 8));
  CHECK(rep.approx[1].alpha * rq(rep.approx[1].mult) == rq(26, 8));
  CHECK(rep.approx[2].alpha * rq(rep.approx[2].mult) == rq(53, 8));

  // oracle equivalence on a sample of polynomials
  std::mt19937 rng(3333);
  Rat inv_n = rq(1, 8);
  for (int it = 0; it < 25; ++it) {
    BiPoly phi;
    for (int k = 0; k < 4; ++k)
      phi.set(static_cast<int>(rng() % 7), static_cast<int>(rng() % 7),
              rq(static_cast<long long>(rng() % 9) - 4));
    if (phi.is_zero()) continue;
    ExtRat direct = substitute_order(phi, c);
    if (direct.is_infinite())
      CHECK(eval(bs.skp, phi).is_infinite());
    else
      CHECK(eval(bs.skp, phi) == ExtRat(direct.finite() * inv_n));
  }
}

TEST_CASE("deep curve: desingularization and the graph-valuation match") {
  auto g = minimal_desing_from_branches({{"C", B("n=8; y=t^12+t^14+t^15")}});
  CHECK(g.vertex_count() >= 7);
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    auto gi = vertex_invariants(g, static_cast<int>(v));
    auto rep = invariants(vertex_to_skp(g, static_cast<int>(v)));
    CHECK(rep.thinness == ExtRat(gi.thinness));
    CHECK(rep.generic_mult.value() == gi.generic_mult);
    CHECK(rep.mult == gi.mult);
  }
  // equisingularity route reproduces it
  EquisingData data =
      equising_data_from_branches({{"C", B("n=8; y=t^12+t^14+t^15")}});
  REQUIRE(data.branches[0].charA.size() == 3);
  DualGraph algo = minimal_desing_from_equising(data);
  CHECK(algo.canonical_string() == g.canonical_string());
}

TEST_CASE("ball distances satisfy the ultrametric on corpus triples") {
  std::vector<BranchParam> branches = {
      B("n=1; y=0"),  B("n=1; y=t"),          B("n=1; y=t^2"),
      B("n=2; y=t^3"), B("n=2; y=t^3+t^5"),    B("n=3; y=t^4"),
      B("n=3; y=t^5"), B("x = t^2+t^4; y = t^3*(1+t^2)^2"), B("n=2; y=t^5")};
  for (size_t a = 0; a < branches.size(); ++a)
    for (size_t b = a + 1; b < branches.size(); ++b)
      for (size_t c = b + 1; c < branches.size(); ++c) {
        Rat dab = ball_distance(branches[a], branches[b]).finite();
        Rat dac = ball_distance(branches[a], branches[c]).finite();
        Rat dbc = ball_distance(branches[b], branches[c]).finite();
        std::vector<Rat> v{dab, dac, dbc};
        std::sort(v.begin(), v.end());
        CHECK(v[1] == v[2]);       // the two largest agree
        CHECK(v[2] <= rq(1));      // diameter one
      }
}

TEST_CASE("values land in the semigroup generated by the report") {
  Skp s({parse_poly("x"), parse_poly("y"), parse_poly("y^2-x^3")},
        {er(1), er(3, 2), er(7)});
  auto rep = invariants(s);
  std::vector<Rat> gens;
  for (auto& gv : rep.semigroup) gens.push_back(gv.finite());
  auto in_semigroup = [&](const Rat& v) {
    // bounded enumeration over the three generators
    for (long a = 0; rq(a) * gens[0] <= v; ++a)
      for (long b = 0; rq(a) * gens[0] + rq(b) * gens[1] <= v; ++b) {
        Rat rest = v - rq(a) * gens[0] - rq(b) * gens[1];
        Rat q = rest / gens[2];
        if (q.is_integer() && q.sign() >= 0) return true;
      }
    return false;
  };
  std::mt19937 rng(97);
  for (int it = 0; it < 120; ++it) {
    BiPoly phi;
    for (int k = 0; k < 3; ++k)
      phi.set(static_cast<int>(rng() % 5), static_cast<int>(rng() % 5),
              rq(static_cast<long long>(rng() % 9) - 4));
    if (phi.is_zero()) continue;
    Rat v = eval(s, phi).finite();
    CHECK(in_semigroup(v));
    // integrality: b * value is an integer (b = 2 here)
    CHECK((v * rq(rep.generic_mult.value())).is_integer());
  }
}

TEST_CASE("five-branch desingularization stays consistent") {
  std::vector<std::pair<std::string, BranchParam>> in = {
      {"A", B("n=2; y=t^3")},   {"B", B("n=1; y=t")},
      {"C", B("n=3; y=t^4")},   {"D", B("n=1; y=0")},
      {"E", B("n=2; y=t^3+t^5")}};
  DualGraph g = minimal_desing_from_branches(in);
  // every branch attaches somewhere, all strict transforms separated
  CHECK(g.attachments.size() == 5);
  // the equisingularity reconstruction agrees
  EquisingData data = equising_data_from_branches(in);
  DualGraph algo = minimal_desing_from_equising(data);
  CHECK(algo.canonical_string() == g.canonical_string());
  // graph-side vs valuation-side invariants everywhere
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    auto gi = vertex_invariants(g, static_cast<int>(v));
    auto rep = invariants(vertex_to_skp(g, static_cast<int>(v)));
    CHECK(rep.thinness == ExtRat(gi.thinness));
    CHECK(rep.generic_mult.value() == gi.generic_mult);
  }
}

TEST_CASE("ideal with a deep branch factors integrally") {
  IdealSpec spec;
  spec.branches = {axis_branch(true), axis_branch(false),
                   make_branch("Z", B("n=4; y=t^6+t^7"))};
  spec.generators = {{{0, 3}, {2, 1}}, {{1, 5}, {2, 1}}, {{0, 1}, {1, 1}, {2, 1}}};
  auto z = zariski_factor(spec);
  Rat total(0);
  for (auto& a : z.measure.atoms()) total += a.mass.re;
  CHECK(total == rq(spec.min_multiplicity()));
  for (auto& f : z.factors) CHECK(f.exponent >= 1);
  CHECK(tree_transform(spec).check_positive().ok);
}
