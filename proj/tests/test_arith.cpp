#include <random>

#include "doctest.h"
#include "valtree/branch.hpp"
#include "valtree/poly.hpp"
#include "valtree/rational.hpp"

using namespace valtree;

static Rat rq(long long n, long long d = 1) { return Rat(Int(n), Int(d)); }

TEST_CASE("rational arithmetic is exact and normalized") {
  Rat a = rq(2, 4);
  CHECK(a == rq(1, 2));
  CHECK((a + rq(1, 3)) == rq(5, 6));
  CHECK((rq(3, 2) * rq(2, 3)) == rq(1));
  CHECK(rq(-4, -6) == rq(2, 3));
  CHECK(rq(1, -2) == rq(-1, 2));
  CHECK(Rat::parse("7/3") == rq(7, 3));
  CHECK(Rat::parse("-5") == rq(-5));
  CHECK(rq(7, 3).floor() == 2);
  CHECK(rq(-7, 3).floor() == -3);
  // big values stay exact
  Rat big = rq(1);
  for (int i = 0; i < 40; ++i) big *= rq(1000003);
  for (int i = 0; i < 40; ++i) big /= rq(1000003);
  CHECK(big == rq(1));
}

TEST_CASE("extended rationals handle infinity strictly") {
  ExtRat inf = ExtRat::infinity();
  ExtRat two(rq(2));
  CHECK((two + inf).is_infinite());
  CHECK(min(two, inf) == two);
  CHECK(inf > two);
  CHECK((inf * rq(3)).is_infinite());
  CHECK_THROWS_AS(inf * rq(0), domain_error);
  CHECK_THROWS_AS(two - inf, domain_error);
  CHECK(ExtRat::parse("inf").is_infinite());
  CHECK(ExtRat::parse("3/2") == ExtRat(rq(3, 2)));
}

TEST_CASE("polynomial parsing matches the grammar") {
  BiPoly p = parse_poly("y^2 - x^3");
  CHECK(p.coeff(0, 2) == rq(1));
  CHECK(p.coeff(3, 0) == rq(-1));
  CHECK(p.terms().size() == 2);

  BiPoly q = parse_poly("(x+y)^2");
  CHECK(q.coeff(2, 0) == rq(1));
  CHECK(q.coeff(1, 1) == rq(2));
  CHECK(q.coeff(0, 2) == rq(1));

  try {
    parse_poly("x + ");
    FAIL("expected syntax error");
  } catch (const domain_error& e) {
    CHECK(e.kind() == "syntax");
    CHECK(std::string(e.what()).find("offset 4") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_poly("x^-2"), domain_error);
  CHECK(parse_poly("3/2*x*y").coeff(1, 1) == rq(3, 2));
  CHECK(parse_poly("2x y") == parse_poly("2*x*y"));
}

TEST_CASE("canonical printing round-trips") {
  std::mt19937 rng(12345);
  for (int it = 0; it < 200; ++it) {
    BiPoly p;
    int nt = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < nt; ++k) {
      long long num = static_cast<long long>(rng() % 19) - 9;
      long long den = 1 + static_cast<long long>(rng() % 4);
      p.set(static_cast<int>(rng() % 5), static_cast<int>(rng() % 5), rq(num, den));
    }
    if (p.is_zero()) continue;
    CHECK(parse_poly(p.str()) == p);
  }
  CHECK(parse_poly("y^2-x^3").str() == "y^2 - x^3");
  CHECK(parse_poly("(x+y)^2").str() == "x^2 + 2*x*y + y^2");
}

TEST_CASE("multiplicity and degrees") {
  BiPoly p = parse_poly("y^2 - x^3");
  CHECK(p.multiplicity() == 2);
  CHECK(p.deg_y() == 2);
  CHECK(p.deg_x() == 3);
  CHECK(parse_poly("x*y + y^4").multiplicity() == 2);
  CHECK_THROWS_AS(BiPoly::zero().multiplicity(), domain_error);
}

TEST_CASE("weierstrass division examples") {
  BiPoly u = parse_poly("y^2 - x^3");

  auto q = weierstrass_divide(parse_poly("y^3"), u);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == parse_poly("x^3*y"));
  CHECK(q[1] == parse_poly("y"));

  auto id = weierstrass_divide(u, u);
  REQUIRE(id.size() == 2);
  CHECK(id[0].is_zero());
  CHECK(id[1] == BiPoly::constant(rq(1)));

  auto low = weierstrass_divide(parse_poly("x^5 + y"), u);
  REQUIRE(low.size() == 1);
  CHECK(low[0] == parse_poly("x^5 + y"));

  CHECK_THROWS_AS(weierstrass_divide(parse_poly("y"), parse_poly("2*y^2 - x")), domain_error);
}

TEST_CASE("weierstrass reconstruction on randomized inputs") {
  std::mt19937 rng(777);
  for (int it = 0; it < 100; ++it) {
    // random monic-in-y divisor
    int d = 1 + static_cast<int>(rng() % 3);
    BiPoly u = BiPoly::monomial(0, d, rq(1));
    for (int j = 0; j < d; ++j)
      u.set(static_cast<int>(rng() % 4), j,
            rq(static_cast<long long>(rng() % 7) - 3, 1 + static_cast<long long>(rng() % 3)));
    BiPoly phi;
    int nt = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < nt; ++k)
      phi.set(static_cast<int>(rng() % 6), static_cast<int>(rng() % 6),
              rq(static_cast<long long>(rng() % 11) - 5));
    auto parts = weierstrass_divide(phi, u);
    BiPoly back;
    for (size_t j = 0; j < parts.size(); ++j) {
      CHECK(parts[j].deg_y() < u.deg_y());
      back = back + parts[j] * u.pow(static_cast<int>(j));
    }
    CHECK(back == phi);
  }
}

TEST_CASE("branch parsing and validation") {
  BranchParam cusp = BranchParam::parse("n=2; y=t^3");
  CHECK(cusp.n() == 2);
  CHECK(cusp.ycoeffs().at(3) == rq(1));
  CHECK(cusp.normal_exact());

  BranchParam line = BranchParam::parse("branch n=1; y = t");
  CHECK(line.n() == 1);

  // primitivity: every exponent even
  CHECK_THROWS_AS(BranchParam::parse("n=2; y=t^4"), domain_error);
  // transversality: ord y < ord x
  CHECK_THROWS_AS(BranchParam::parse("n=3; y=t^2"), domain_error);

  BranchParam pair = BranchParam::parse("x = t^2 + t^4; y = t^3*(1+t^2)^2");
  CHECK(pair.n() == 2);
  CHECK_FALSE(pair.normal_exact());
  // Puiseux normal form starts t~^3 + (1/2) t~^5 + ...
  CHECK(pair.ycoeffs().at(3) == rq(1));
  CHECK(pair.ycoeffs().at(5) == rq(1, 2));
}

TEST_CASE("substitution orders") {
  BranchParam cusp = BranchParam::parse("n=2; y=t^3");
  CHECK(substitute_order(parse_poly("y"), cusp) == ExtRat(rq(3)));
  CHECK(substitute_order(parse_poly("y^2-x^3"), cusp).is_infinite());

  BranchParam c6 = BranchParam::parse("n=2; y=t^3+t^5");
  CHECK(substitute_order(parse_poly("y^2-x^3"), c6) == ExtRat(rq(8)));

  // vanishing iff divisible by the Weierstrass polynomial
  BiPoly w = weierstrass_poly(c6);
  CHECK(w == parse_poly("y^2 - x^3 - 2*x^4 - x^5"));
  CHECK(substitute_order(w * parse_poly("1 + x + y^3"), c6).is_infinite());
}

TEST_CASE("substitution order is additive") {
  std::mt19937 rng(424242);
  BranchParam c = BranchParam::parse("n=3; y=t^4+t^5");
  for (int it = 0; it < 60; ++it) {
    BiPoly a, b;
    for (int k = 0; k < 3; ++k) {
      a.set(static_cast<int>(rng() % 4), static_cast<int>(rng() % 4),
            rq(static_cast<long long>(rng() % 9) - 4));
      b.set(static_cast<int>(rng() % 4), static_cast<int>(rng() % 4),
            rq(static_cast<long long>(rng() % 9) - 4));
    }
    if (a.is_zero() || b.is_zero()) continue;
    ExtRat oa = substitute_order(a, c), ob = substitute_order(b, c);
    if (oa.is_infinite() || ob.is_infinite()) continue;
    CHECK(substitute_order(a * b, c) == oa + ob);
  }
}

TEST_CASE("intersection numbers of branches") {
  BranchParam cusp = BranchParam::parse("n=2; y=t^3");
  BranchParam xaxis = BranchParam::parse("n=1; y=0");
  CHECK(intersection_number(cusp, xaxis) == ExtRat(rq(3)));
  CHECK(intersection_number(xaxis, cusp) == ExtRat(rq(3)));

  BranchParam line = BranchParam::parse("n=1; y=t");
  CHECK(intersection_number(cusp, line) == ExtRat(rq(2)));

  BranchParam cusp2 = BranchParam::parse("x = t^2 + t^4; y = t^3*(1+t^2)^2");
  CHECK(intersection_number(cusp, cusp2) == ExtRat(rq(8)));
  CHECK(intersection_number(cusp2, cusp) == ExtRat(rq(8)));

  CHECK(intersection_number(cusp, cusp).is_infinite());

  // against the Weierstrass-composition oracle
  BranchParam c34 = BranchParam::parse("n=3; y=t^4");
  BiPoly w34 = weierstrass_poly(c34);
  CHECK(w34 == parse_poly("y^3 - x^4"));
  CHECK(ExtRat(rq(8)) == intersection_number(c34, cusp));
  CHECK(substitute_order(w34, cusp) == ExtRat(rq(8)));
}
