#ifndef VALTREE_BRANCH_HPP
#define VALTREE_BRANCH_HPP

#include <map>
#include <string>

#include "valtree/poly.hpp"

namespace valtree {

// Primitive parameterization of an irreducible formal curve transverse to
// {x = 0}. The exact polynomial pair (xt, yt) is the computational source of
// truth; the Puiseux normal form (n, ycoeffs) is derived from it, exactly when
// xt = t^n, otherwise by series reversion up to the working truncation order.
class BranchParam {
 public:
  // Standard form x = t^n, y = y(t).
  static BranchParam standard(long n, const TPoly& y, long trunc = 0);
  // General polynomial pair x = x(t), y = y(t).
  static BranchParam raw(const TPoly& x, const TPoly& y, long trunc = 0);
  // Grammar: ["branch"] "n=<int>; y=<poly in t>"  or  "x=<poly in t>; y=<poly in t>".
  static BranchParam parse(const std::string& text, long trunc = 0);

  long n() const { return n_; }                       // multiplicity m(C)
  const TPoly& xt() const { return xt_; }
  const TPoly& yt() const { return yt_; }
  const std::map<long, Rat>& ycoeffs() const;
  long trunc() const { return trunc_; }
  bool normal_exact() const { return normal_exact_; }
  // False when the normal form would need an algebraic extension (the exact
  // raw pair is still fully usable).
  bool normal_form_available() const { return normal_available_; }

  bool operator==(const BranchParam& o) const { return xt_ == o.xt_ && yt_ == o.yt_; }

  std::string str() const;

 private:
  BranchParam() = default;
  void normalize_and_validate();

  long n_ = 0;
  std::map<long, Rat> ycoeffs_;
  long trunc_ = 0;
  TPoly xt_, yt_;
  bool normal_exact_ = false;
  bool normal_available_ = true;
};

// ord_t phi(x(t), y(t)); infinity when the composition vanishes identically
// (phi is then a multiple of the branch's Weierstrass polynomial).
ExtRat substitute_order(const BiPoly& phi, const BranchParam& c);

// Minimal polynomial of y(t) over Q(x) for a standard-form branch: monic in y
// of degree n with polynomial coefficients. Characteristic polynomial of the
// multiplication-by-y matrix on the basis 1, t, ..., t^(n-1).
BiPoly weierstrass_poly(const BranchParam& c);

// Intersection multiplicity of two branches; infinity iff they define the
// same curve. Computed as ord_t Res_s(x2(s) - x1(t), y2(s) - y1(t)).
ExtRat intersection_number(const BranchParam& a, const BranchParam& b);

// Default working truncation: 4 * (largest exponent in the inputs) + 8,
// doubled on demand up to the configurable cap.
long default_truncation(long largest_exponent);
long truncation_cap();
void set_truncation_cap(long cap);

}  // namespace valtree

#endif
