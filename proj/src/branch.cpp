#include "valtree/branch.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>
#include <atomic>

namespace valtree {

namespace {

std::atomic<long> g_trunc_cap{4096};

// ---- truncated power series helpers (all mod t^T) ----

TPoly ser_mul(const TPoly& a, const TPoly& b, long T) { return (a * b).truncated(T); }

// 1/a mod t^T for a with a(0) != 0.
TPoly ser_inv(const TPoly& a, long T) {
  Rat a0 = a.at_zero();
  if (a0.is_zero()) throw domain_error("pole", "series inverse needs unit constant term");
  TPoly r = TPoly::constant(Rat(1) / a0);
  long prec = 1;
  while (prec < T) {
    prec = std::min(2 * prec, T);
    // r <- r * (2 - a r)
    TPoly ar = ser_mul(a.truncated(prec), r, prec);
    TPoly two_minus = TPoly::constant(Rat(2)) - ar;
    r = ser_mul(r, two_minus, prec);
  }
  return r;
}

// a^(1/n) mod t^T for a with a(0) = 1.
TPoly ser_nth_root(const TPoly& a, long nroot, long T) {
  TPoly r = TPoly::constant(Rat(1));
  long prec = 1;
  while (prec < T) {
    prec = std::min(2 * prec, T);
    // Newton: r <- r - (r^n - a) / (n r^(n-1))
    TPoly rn = r.pow(static_cast<int>(nroot)).truncated(prec);
    TPoly num = rn - a.truncated(prec);
    TPoly den = (r.pow(static_cast<int>(nroot - 1)) * Rat(nroot)).truncated(prec);
    r = (r - ser_mul(num, ser_inv(den, prec), prec)).truncated(prec);
  }
  return r;
}

// f(g(t)) mod t^T, requiring ord g >= 1.
TPoly ser_compose(const TPoly& f, const TPoly& g, long T) {
  TPoly r, gp = TPoly::constant(Rat(1));
  long prev = 0;
  for (auto& [e, c] : f.terms()) {
    if (e >= T) break;
    for (long k = prev; k < e; ++k) gp = ser_mul(gp, g, T);
    prev = e;
    r = r + gp * c;
  }
  return r.truncated(T);
}

TPoly ser_derivative(const TPoly& a) {
  TPoly r;
  for (auto& [e, c] : a.terms())
    if (e > 0) r.set(e - 1, c * Rat(e));
  return r;
}

// Compositional inverse of w (ord w = 1) mod t^T.
TPoly ser_reversion(const TPoly& w, long T) {
  Rat w1 = w.coeff(1);
  if (w1.is_zero()) throw domain_error("reversion", "series reversion needs order one");
  TPoly s = TPoly::monomial(1, Rat(1) / w1);
  long prec = 2;
  while (prec <= T) {
    // Newton: s <- s - (w(s) - t) / w'(s)
    TPoly ws = ser_compose(w.truncated(prec), s, prec);
    TPoly err = ws - TPoly::var();
    if (!err.is_zero()) {
      TPoly dws = ser_compose(ser_derivative(w).truncated(prec), s, prec);
      s = (s - ser_mul(err, ser_inv(dws, prec), prec)).truncated(prec);
    }
    if (prec == T) break;
    prec = std::min(2 * prec, T);
  }
  return s;
}

// Exact n-th root of a rational; error of kind field_extension_required if absent.
Rat rat_nth_root(const Rat& a, long nroot) {
  if (a.sign() < 0 && nroot % 2 == 0)
    throw domain_error("field_extension_required", "even root of a negative leading coefficient");
  auto iroot = [&](const Int& v) {
    if (v == 0) return Int(0);
    Int lo = 0, hi = 1;
    while (boost::multiprecision::pow(hi, static_cast<unsigned>(nroot)) < v) hi <<= 1;
    while (lo < hi) {
      Int mid = (lo + hi + 1) / 2;
      if (boost::multiprecision::pow(mid, static_cast<unsigned>(nroot)) <= v)
        lo = mid;
      else
        hi = mid - 1;
    }
    if (boost::multiprecision::pow(lo, static_cast<unsigned>(nroot)) != v)
      throw domain_error("field_extension_required",
                         "leading coefficient is not an exact n-th power over Q");
    return lo;
  };
  Int num = a.num() < 0 ? Int(-a.num()) : a.num();
  Rat r(iroot(num), iroot(a.den()));
  if (a.sign() < 0) r = -r;
  return r;
}

long largest_exponent(const TPoly& p) { return p.is_zero() ? 0 : p.deg(); }

}  // namespace

long default_truncation(long e) { return 4 * e + 8; }
long truncation_cap() { return g_trunc_cap.load(); }
void set_truncation_cap(long cap) { g_trunc_cap.store(std::max<long>(cap, 16)); }

BranchParam BranchParam::standard(long n, const TPoly& y, long trunc) {
  BranchParam b;
  b.xt_ = TPoly::monomial(n, Rat(1));
  b.yt_ = y;
  b.trunc_ = trunc;
  b.normalize_and_validate();
  return b;
}

BranchParam BranchParam::raw(const TPoly& x, const TPoly& y, long trunc) {
  BranchParam b;
  b.xt_ = x;
  b.yt_ = y;
  b.trunc_ = trunc;
  b.normalize_and_validate();
  return b;
}

void BranchParam::normalize_and_validate() {
  auto ox = xt_.ord();
  if (!ox || *ox < 1)
    throw domain_error("invalid_branch", "x(t) must vanish at t = 0 and not be identically zero");
  n_ = *ox;
  auto oy = yt_.ord();
  if (oy && *oy < n_)
    throw domain_error("invalid_branch",
                       "transversality to {x=0} fails: ord y(t) < ord x(t)");
  if (yt_.is_zero() && n_ != 1)
    throw domain_error("invalid_branch", "parameterization is not primitive");

  if (trunc_ <= 0) {
    long e = std::max({largest_exponent(xt_), largest_exponent(yt_), n_});
    trunc_ = default_truncation(e);
  }
  trunc_ = std::min(trunc_, truncation_cap());

  normal_exact_ = (xt_ == TPoly::monomial(n_, Rat(1)));
  if (normal_exact_) {
    ycoeffs_ = yt_.terms();
  } else {
    // Puiseux normal form by exact series reversion: t~ = (x(t))^{1/n}.
    try {
      Rat lead = xt_.coeff(n_);
      Rat root = rat_nth_root(lead, n_);
      TPoly unit = tpoly_divexact(xt_, TPoly::monomial(n_, lead)).truncated(trunc_);
      TPoly w = (TPoly::monomial(1, root) * ser_nth_root(unit, n_, trunc_)).truncated(trunc_);
      TPoly back = ser_reversion(w, trunc_);
      ycoeffs_ = ser_compose(yt_, back, trunc_).terms();
    } catch (const domain_error& e) {
      if (std::string(e.kind()) != "field_extension_required") throw;
      normal_available_ = false;
    }
  }

  if (normal_available_) {
    // Primitivity: gcd(n, exponents of the normal form) must reach 1.
    Int g(n_);
    for (auto& [e, c] : ycoeffs_) {
      g = int_gcd(g, Int(e));
      if (g == 1) break;
    }
    if (g != 1) {
      if (!normal_exact_ && !yt_.is_zero() &&
          largest_exponent(yt_) * largest_exponent(xt_) >= trunc_)
        throw domain_error("truncation_insufficient",
                           "cannot certify primitivity within the truncation order");
      if (n_ != 1) throw domain_error("invalid_branch", "parameterization is not primitive");
    }
  } else {
    // Raw support test only (necessary condition).
    Int g(0);
    for (auto& [e, c] : xt_.terms()) g = int_gcd(g, Int(e));
    for (auto& [e, c] : yt_.terms()) g = int_gcd(g, Int(e));
    if (g != 1) throw domain_error("invalid_branch", "parameterization is not primitive");
  }
}

const std::map<long, Rat>& BranchParam::ycoeffs() const {
  if (!normal_available_)
    throw domain_error("field_extension_required",
                       "Puiseux normal form needs an algebraic extension");
  return ycoeffs_;
}

BranchParam BranchParam::parse(const std::string& text, long trunc) {
  std::string s = text;
  auto strip = [](std::string v) {
    size_t a = v.find_first_not_of(" \t");
    size_t b = v.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
  };
  s = strip(s);
  if (s.rfind("branch", 0) == 0) s = strip(s.substr(6));

  auto semi = s.find(';');
  if (semi == std::string::npos)
    throw domain_error("syntax", "branch needs two ';'-separated assignments");
  std::string first = strip(s.substr(0, semi));
  std::string second = strip(s.substr(semi + 1));
  auto split_assign = [&](const std::string& part) -> std::pair<std::string, std::string> {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw domain_error("syntax", "expected '=' in '" + part + "'");
    return {strip(part.substr(0, eq)), strip(part.substr(eq + 1))};
  };
  auto [k1, v1] = split_assign(first);
  auto [k2, v2] = split_assign(second);
  if (k2 != "y") throw domain_error("syntax", "second branch assignment must be 'y = ...'");

  auto parse_t = [&](const std::string& txt) {
    BiPoly p = parse_poly(txt, "t", "");
    TPoly out;
    for (auto& [k, c] : p.terms()) out.set(k.first, c);
    return out;
  };

  if (k1 == "n") {
    long n = 0;
    try {
      n = std::stol(v1);
    } catch (...) {
      throw domain_error("syntax", "bad multiplicity '" + v1 + "'");
    }
    if (n < 1) throw domain_error("invalid_branch", "multiplicity must be positive");
    return standard(n, parse_t(v2), trunc);
  }
  if (k1 == "x") return raw(parse_t(v1), parse_t(v2), trunc);
  throw domain_error("syntax", "first branch assignment must be 'n = ...' or 'x = ...'");
}

std::string BranchParam::str() const {
  if (normal_exact_ && normal_available_) {
    TPoly y;
    for (auto& [e, c] : ycoeffs_) y.set(e, c);
    return "n=" + std::to_string(n_) + "; y=" + y.str();
  }
  return "x=" + xt_.str() + "; y=" + yt_.str();
}

ExtRat substitute_order(const BiPoly& phi, const BranchParam& c) {
  if (phi.is_zero()) return ExtRat::infinity();
  TPoly comp = compose(phi, c.xt(), c.yt());
  auto o = comp.ord();
  if (!o) return ExtRat::infinity();
  return ExtRat(Rat(*o));
}

BiPoly weierstrass_poly(const BranchParam& c) {
  if (!c.normal_exact())
    throw domain_error("unsupported",
                       "Weierstrass polynomial is computed for standard-form branches only");
  long n = c.n();
  // Multiplication-by-y(t) matrix on Q(x)-basis 1, t, ..., t^(n-1), with
  // t^e reduced to x^(e div n) t^(e mod n).
  std::vector<std::vector<BiPoly>> m(n, std::vector<BiPoly>(n, BiPoly::zero()));
  for (long col = 0; col < n; ++col) {
    for (auto& [e, a] : c.ycoeffs()) {
      long ee = e + col;
      m[ee % n][col] = m[ee % n][col] + BiPoly::monomial(static_cast<int>(ee / n), 0, a);
    }
  }
  // char poly det(Y I - M) by cofactor expansion over the commutative ring Q[x][Y];
  // Y is carried in the second slot of a helper BiPoly(x, Y).
  std::vector<std::vector<BiPoly>> a(n, std::vector<BiPoly>(n));
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      a[i][j] = -m[i][j];
      if (i == j) a[i][j] = a[i][j] + BiPoly::monomial(0, 1, Rat(1));
    }
  std::vector<long> cols(n);
  for (long j = 0; j < n; ++j) cols[j] = j;
  std::function<BiPoly(long, std::vector<long>&)> det = [&](long row,
                                                            std::vector<long>& cs) -> BiPoly {
    if (cs.empty()) return BiPoly::constant(Rat(1));
    BiPoly acc;
    for (size_t k = 0; k < cs.size(); ++k) {
      long cj = cs[k];
      if (a[row][cj].is_zero()) continue;
      std::vector<long> rest;
      rest.reserve(cs.size() - 1);
      for (size_t l = 0; l < cs.size(); ++l)
        if (l != k) rest.push_back(cs[l]);
      BiPoly sub = det(row + 1, rest);
      BiPoly term = a[row][cj] * sub;
      acc = (k % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
  };
  return det(0, cols);
}

ExtRat intersection_number(const BranchParam& a, const BranchParam& b) {
  // Eliminating s is only sound when every root of x_b(s) = x_a(t) is local,
  // i.e. when x_b(s) = s^n; otherwise the parameterization can revisit the
  // origin at s away from 0 and contaminate the order. Prefer a standard-form
  // second argument; raw pairs are handled at the valuation layer.
  if (!b.normal_exact()) {
    if (a.normal_exact()) return intersection_number(b, a);
    throw domain_error("unsupported",
                       "intersection of two non-standard parameterizations needs the "
                       "valuative route");
  }
  // f(s) = x_b(s) - x_a(t), g(s) = y_b(s) - y_a(t), eliminate s.
  long dx = std::max<long>(b.xt().deg(), 0);
  long dy = std::max<long>(b.yt().is_zero() ? 0 : b.yt().deg(), 0);
  std::vector<TPoly> f(dx + 1), g(dy + 1);
  for (auto& [e, c] : b.xt().terms()) f[e] = TPoly::constant(c);
  for (auto& [e, c] : b.yt().terms()) g[e] = TPoly::constant(c);
  f[0] = f[0] - a.xt();
  g[0] = g[0] - a.yt();
  while (f.size() > 1 && f.back().is_zero()) f.pop_back();
  while (g.size() > 1 && g.back().is_zero()) g.pop_back();
  TPoly res = resultant_in_s(f, g);
  auto o = res.ord();
  if (!o) return ExtRat::infinity();
  return ExtRat(Rat(*o));
}

}  // namespace valtree
