#include <random>

#include "doctest.h"
#include "valtree/jsonio.hpp"
#include "valtree/treemeasure.hpp"

using namespace valtree;

static Rat rq(long long n, long long d = 1) { return Rat(Int(n), Int(d)); }
static ExtRat er(long long n, long long d = 1) { return ExtRat(rq(n, d)); }
static BranchParam B(const std::string& s) { return BranchParam::parse(s); }

TEST_CASE("truncation monotonicity and the boundary value of the next key") {
  std::mt19937 rng(8080);
  Skp full = Skp({parse_poly("x"), parse_poly("y"), parse_poly("y^2-x^3")},
                 {er(1), er(3, 2), er(7)});
  Skp prefix = Skp::monomial(er(3, 2));
  for (int it = 0; it < 60; ++it) {
    BiPoly p;
    for (int k = 0; k < 4; ++k)
      p.set(static_cast<int>(rng() % 6), static_cast<int>(rng() % 6),
            rq(static_cast<long long>(rng() % 9) - 4));
    if (p.is_zero()) continue;
    CHECK(eval(prefix, p) <= eval(full, p));
  }
  // the prefix valuation of the next key equals n_k b_k, strictly below b_{k+1}
  CHECK(eval(prefix, full.keys()[2]) == er(3));
  CHECK(er(3) < full.values()[2]);
}

TEST_CASE("infinitely-singular truncation tag survives serialization") {
  Skp s = Skp({parse_poly("x"), parse_poly("y"), parse_poly("y^2-x^3")},
              {er(1), er(3, 2), er(7)});
  s.inf_sing_truncated = true;
  auto rep = invariants(s);
  CHECK(rep.kind == "infinitely-singular-truncated");
  CHECK(rep.rk == 1);
  CHECK(rep.rat_rk == 1);
  CHECK(rep.tr_deg == 0);
  CHECK_FALSE(rep.generic_mult.has_value());
  Skp back = skp_from_json(skp_to_json(s));
  CHECK(back.inf_sing_truncated);
  CHECK(back == s);
}

TEST_CASE("axis curve valuations compare and wedge correctly") {
  Skp vx = Skp::axis_curve(true);
  Skp vy = Skp::axis_curve(false);
  CHECK(compare(vx, vy) == Order::Incomparable);
  CHECK(wedge(vx, vy) == Skp::multiplicity_valuation());
  CHECK(compare(Skp::multiplicity_valuation(), vx) == Order::Less);
  CHECK(eval(vx, parse_poly("x")).is_infinite());
  CHECK(eval(vx, parse_poly("y")) == er(1));
  CHECK(eval(vy, parse_poly("y")).is_infinite());
  auto rx = invariants(vx);
  CHECK(rx.kind == "curve");
  CHECK(rx.mult == 1);
}

TEST_CASE("relative invariants of curve valuations") {
  Skp cusp = skp_of_branch(B("n=2; y=t^3")).skp;
  auto r = relative_invariants(cusp);
  CHECK(r.alpha_x.is_infinite());
  CHECK(r.thinness_x.is_infinite());
  CHECK(r.mult_x == er(2));

  Skp vy = Skp::axis_curve(false);
  auto ry = relative_invariants(vy);
  CHECK(ry.alpha_x.is_infinite());
  CHECK(ry.mult_x == er(1));
}

TEST_CASE("ball distance between two raw parameterizations") {
  // reparameterize-resistant: both inputs are general polynomial pairs
  BranchParam a = B("x = t^2+t^4; y = t^3*(1+t^2)^2");
  BranchParam b = B("x = t^3+t^4; y = t^4");
  // b has ord x = 3, ord y = 4: a cusp-like (3,4) branch
  ExtRat inter = intersection_number_general(a, b);
  // wedge of a (2,3)-branch with a (3,4)-branch sits at skewness 4/3:
  // intersection = 2 * 3 * 4/3 = 8
  CHECK(inter == er(8));
  CHECK(ball_distance(a, b) == er(3, 4));
  CHECK(ball_distance(a, a) == er(0));
}

TEST_CASE("zariski factorization with mixed atom kinds") {
  // C * (x^2, y^3): measure is the principal part plus the monomial part
  IdealSpec spec;
  spec.branches = {axis_branch(true), axis_branch(false),
                   make_branch("C", B("n=2; y=t^3"))};
  spec.generators = {{{0, 2}, {2, 1}}, {{1, 3}, {2, 1}}};
  auto z = zariski_factor(spec);
  REQUIRE(z.factors.size() == 2);
  bool saw_curve = false, saw_div = false;
  for (auto& f : z.factors) {
    if (f.divisorial) {
      saw_div = true;
      CHECK(f.unit_mass == 2);
      CHECK(f.exponent == 1);
      CHECK(invariants(f.valuation).thinness == er(5, 2));
    } else {
      saw_curve = true;
      CHECK(f.unit_mass == 2);
      CHECK(f.exponent == 1);
    }
  }
  CHECK(saw_curve);
  CHECK(saw_div);
  // mass = m(I) = 2 + 2
  CHECK(z.measure.mass() == ComplexRat(rq(4)));
  // mixed multiplicity rejects the curve atom
  CHECK_THROWS_AS(mixed_multiplicity(spec, spec), domain_error);
}

TEST_CASE("inner products are conjugate bilinear for complex masses") {
  Skp vm = Skp::multiplicity_valuation();
  Skp m2 = Skp::monomial(er(2));
  AtomicMeasure a({{vm, ComplexRat(rq(1), rq(2)), false}});
  AtomicMeasure b({{m2, ComplexRat(rq(3), rq(-1)), false}});
  // alpha(wedge) = 1: product = (1+2i) * conj(3-i) = (1+2i)(3+i) = 1+7i
  InnerProduct p = inner_product(a, b);
  CHECK(p.re == er(1));
  CHECK(p.im == rq(7));
  // swapping arguments conjugates
  InnerProduct q = inner_product(b, a);
  CHECK(q.re == er(1));
  CHECK(q.im == rq(-7));
  // scaling the first argument by i multiplies the product by i
  AtomicMeasure ia = a.scaled(ComplexRat(rq(0), rq(1)));
  InnerProduct r = inner_product(ia, b);
  CHECK(r.re == er(-7));
  CHECK(r.im == rq(1));
}

TEST_CASE("potential of a measure with a raw-branch curve atom") {
  BranchParam raw = B("x = t^2+t^4; y = t^3*(1+t^2)^2");
  Skp stand_in = skp_of_branch(raw, 16).skp;
  AtomicMeasure rho({{stand_in, ComplexRat(rq(2)), true},
                     {Skp::monomial(er(3, 2)), ComplexRat(rq(1)), false}});
  CHECK(laplacian(potential_of_measure(rho)) == rho);
}

TEST_CASE("nearby points respects the stop cap") {
  auto seq = nearby_points_of_branch(B("n=4; y=t^6+t^7"), 2);
  CHECK_FALSE(seq.normal_crossings);
  CHECK(seq.points.size() >= 2);
  auto full = nearby_points_of_branch(B("n=4; y=t^6+t^7"));
  CHECK(full.normal_crossings);
  CHECK(full.points.size() == 5);
}

TEST_CASE("duplicate labels and duplicate branches are rejected") {
  CHECK_THROWS_AS(
      minimal_desing_from_branches({{"C", B("n=2; y=t^3")}, {"C", B("n=1; y=t")}}),
      domain_error);
  CHECK_THROWS_AS(
      minimal_desing_from_branches({{"C1", B("n=2; y=t^3")}, {"C2", B("n=2; y=t^3")}}),
      domain_error);
}

TEST_CASE("equising rejects out-of-range data") {
  EquisingData bad;
  bad.branches.push_back({"C", 2, {rq(3, 2)}});  // characteristic parameter must exceed 2
  CHECK_THROWS_AS(minimal_desing_from_equising(bad), domain_error);

  EquisingData bad2;
  bad2.branches.push_back({"C1", 1, {}});
  bad2.branches.push_back({"C2", 1, {}});
  bad2.contacts[{0, 1}] = rq(3, 2);  // contacts start at 2
  CHECK_THROWS_AS(minimal_desing_from_equising(bad2), domain_error);
}

TEST_CASE("eval matches on swapped-coordinate documents") {
  Skp xside = Skp::monomial(er(5, 2), true);
  Json j = skp_to_json(xside);
  CHECK(j["swap"] == true);
  Skp back = skp_from_json(j);
  CHECK(back == xside);
  CHECK(eval(back, parse_poly("x^2*y")) == er(6));  // 2*(5/2) + 1
}
