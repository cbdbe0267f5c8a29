#ifndef VALTREE_POLY_HPP
#define VALTREE_POLY_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "valtree/rational.hpp"

namespace valtree {

// Sparse bivariate polynomial over Q. Keys are (i, j) for x^i y^j; no zero
// coefficients are stored. The canonical print order is graded lex with x < y,
// lowest grade first.
class BiPoly {
 public:
  using Key = std::pair<int, int>;
  using Terms = std::map<Key, Rat>;

  BiPoly() = default;

  static BiPoly zero() { return BiPoly(); }
  static BiPoly constant(const Rat& c);
  static BiPoly var_x() { return monomial(1, 0, Rat(1)); }
  static BiPoly var_y() { return monomial(0, 1, Rat(1)); }
  static BiPoly monomial(int i, int j, const Rat& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat coeff(int i, int j) const;

  int deg_x() const;
  int deg_y() const;
  // Order of vanishing at the origin: min(i + j) over the support.
  int multiplicity() const;

  BiPoly operator-() const;
  BiPoly operator+(const BiPoly& o) const;
  BiPoly operator-(const BiPoly& o) const;
  BiPoly operator*(const BiPoly& o) const;
  BiPoly operator*(const Rat& c) const;
  BiPoly pow(int e) const;
  bool operator==(const BiPoly& o) const { return terms_ == o.terms_; }
  bool operator!=(const BiPoly& o) const { return !(*this == o); }

  // Exchanges the two variables.
  BiPoly swapped_vars() const;

  // Coefficient of y^j as a polynomial in x alone.
  BiPoly y_coeff(int j) const;
  // True when the coefficient of y^deg_y is the constant 1.
  bool monic_in_y() const;

  void set(int i, int j, const Rat& c);

  std::string str() const;

  // Total order compatible with the canonical print (for deterministic maps).
  static bool less(const BiPoly& a, const BiPoly& b);

 private:
  Terms terms_;
};

// Division by a divisor that is monic in y: phi = q * u + r, deg_y r < deg_y u.
std::pair<BiPoly, BiPoly> divmod_monic_y(const BiPoly& phi, const BiPoly& u);

// Expansion phi = sum_j out[j] * u^j with deg_y out[j] < deg_y u (u monic in y).
std::vector<BiPoly> weierstrass_divide(const BiPoly& phi, const BiPoly& u);

// Parses the expression grammar: rationals `p/q`, variables (default x,y),
// operators + - * ^ (and implicit products), parentheses. Throws domain_error
// kind="syntax" with the offset in the message on malformed input.
BiPoly parse_poly(const std::string& text, const std::string& vx = "x",
                  const std::string& vy = "y");

// ---------------------------------------------------------------------------

// Sparse univariate polynomial in t over Q.
class TPoly {
 public:
  TPoly() = default;
  static TPoly constant(const Rat& c);
  static TPoly monomial(long e, const Rat& c);
  static TPoly var() { return monomial(1, Rat(1)); }

  const std::map<long, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Smallest exponent with nonzero coefficient; nullopt for the zero polynomial.
  std::optional<long> ord() const;
  long deg() const;
  Rat coeff(long e) const;
  Rat lead_low() const;  // coefficient at ord()
  Rat at_zero() const { return coeff(0); }

  TPoly operator-() const;
  TPoly operator+(const TPoly& o) const;
  TPoly operator-(const TPoly& o) const;
  TPoly operator*(const TPoly& o) const;
  TPoly operator*(const Rat& c) const;
  TPoly pow(int e) const;
  bool operator==(const TPoly& o) const { return terms_ == o.terms_; }

  TPoly shifted(long k) const;          // multiply by t^k (k may be negative if ord allows)
  TPoly truncated(long order) const;    // drop exponents >= order
  void set(long e, const Rat& c);

  std::string str(const std::string& var = "t") const;

 private:
  std::map<long, Rat> terms_;
};

// Exact quotient; throws if the division is not exact.
TPoly tpoly_divexact(const TPoly& a, const TPoly& b);
TPoly tpoly_gcd(TPoly a, TPoly b);

// Rational function p/q in t with q(0) != 0, used for exact chart transforms
// of branch parameterizations. The zero function is num = 0.
class RatFun {
 public:
  RatFun() : num_(), den_(TPoly::constant(Rat(1))) {}
  RatFun(TPoly num, TPoly den);
  static RatFun from_poly(const TPoly& p) { return RatFun(p, TPoly::constant(Rat(1))); }
  static RatFun constant(const Rat& c) { return from_poly(TPoly::constant(c)); }

  const TPoly& num() const { return num_; }
  const TPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  std::optional<long> ord() const { return num_.ord(); }
  // Lowest series coefficient: lc(num at ord) / den(0).
  Rat lead_low() const;
  Rat value_at_zero() const;

  std::string str(const std::string& var = "t") const;

  RatFun operator+(const RatFun& o) const;
  RatFun operator-(const RatFun& o) const;
  RatFun operator*(const RatFun& o) const;
  RatFun operator/(const RatFun& o) const;
  RatFun operator-() const;

 private:
  void reduce();
  TPoly num_, den_;
};

// Evaluation of phi(x, y) along a pair of substitutions.
TPoly compose(const BiPoly& phi, const TPoly& xt, const TPoly& yt);
RatFun compose(const BiPoly& phi, const RatFun& xt, const RatFun& yt);

// Resultant with respect to s of f(s), g(s) whose coefficients live in Q[t];
// polynomials are given as coefficient vectors indexed by the power of s.
TPoly resultant_in_s(const std::vector<TPoly>& f, const std::vector<TPoly>& g);

}  // namespace valtree

#endif
