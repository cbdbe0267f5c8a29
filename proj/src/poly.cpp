#include "valtree/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace valtree {

BiPoly BiPoly::constant(const Rat& c) { return monomial(0, 0, c); }

BiPoly BiPoly::monomial(int i, int j, const Rat& c) {
  BiPoly p;
  if (!c.is_zero()) p.terms_[{i, j}] = c;
  return p;
}

bool BiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Key{0, 0});
}

Rat BiPoly::coeff(int i, int j) const {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? Rat(0) : it->second;
}

int BiPoly::deg_x() const {
  int d = 0;
  for (auto& [k, c] : terms_) d = std::max(d, k.first);
  return d;
}

int BiPoly::deg_y() const {
  int d = 0;
  for (auto& [k, c] : terms_) d = std::max(d, k.second);
  return d;
}

int BiPoly::multiplicity() const {
  if (terms_.empty()) throw domain_error("zero_polynomial", "multiplicity of the zero polynomial");
  int m = -1;
  for (auto& [k, c] : terms_) {
    int g = k.first + k.second;
    if (m < 0 || g < m) m = g;
  }
  return m;
}

BiPoly BiPoly::operator-() const {
  BiPoly r;
  for (auto& [k, c] : terms_) r.terms_[k] = -c;
  return r;
}

BiPoly BiPoly::operator+(const BiPoly& o) const {
  BiPoly r = *this;
  for (auto& [k, c] : o.terms_) {
    auto it = r.terms_.find(k);
    if (it == r.terms_.end()) {
      r.terms_[k] = c;
    } else {
      it->second += c;
      if (it->second.is_zero()) r.terms_.erase(it);
    }
  }
  return r;
}

BiPoly BiPoly::operator-(const BiPoly& o) const { return *this + (-o); }

BiPoly BiPoly::operator*(const BiPoly& o) const {
  BiPoly r;
  for (auto& [ka, ca] : terms_)
    for (auto& [kb, cb] : o.terms_) {
      Key k{ka.first + kb.first, ka.second + kb.second};
      auto it = r.terms_.find(k);
      if (it == r.terms_.end()) {
        Rat c = ca * cb;
        if (!c.is_zero()) r.terms_[k] = c;
      } else {
        it->second += ca * cb;
        if (it->second.is_zero()) r.terms_.erase(it);
      }
    }
  return r;
}

BiPoly BiPoly::operator*(const Rat& c) const {
  BiPoly r;
  if (c.is_zero()) return r;
  for (auto& [k, a] : terms_) r.terms_[k] = a * c;
  return r;
}

BiPoly BiPoly::pow(int e) const {
  if (e < 0) throw domain_error("negative_exponent", "negative polynomial power");
  BiPoly r = constant(Rat(1));
  BiPoly b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

BiPoly BiPoly::swapped_vars() const {
  BiPoly r;
  for (auto& [k, c] : terms_) r.terms_[{k.second, k.first}] = c;
  return r;
}

BiPoly BiPoly::y_coeff(int j) const {
  BiPoly r;
  for (auto& [k, c] : terms_)
    if (k.second == j) r.terms_[{k.first, 0}] = c;
  return r;
}

bool BiPoly::monic_in_y() const {
  if (is_zero()) return false;
  int d = deg_y();
  BiPoly lead = y_coeff(d);
  return lead.terms().size() == 1 && lead.coeff(0, 0) == Rat(1);
}

void BiPoly::set(int i, int j, const Rat& c) {
  if (c.is_zero())
    terms_.erase({i, j});
  else
    terms_[{i, j}] = c;
}

namespace {
// Canonical term order: by total degree, then by x-degree ascending.
std::vector<std::pair<BiPoly::Key, Rat>> graded_terms(const BiPoly& p) {
  std::vector<std::pair<BiPoly::Key, Rat>> v(p.terms().begin(), p.terms().end());
  std::sort(v.begin(), v.end(), [](auto& a, auto& b) {
    int ga = a.first.first + a.first.second, gb = b.first.first + b.first.second;
    if (ga != gb) return ga < gb;
    return a.first.first > b.first.first;
  });
  return v;
}

void append_monomial(std::string& out, int i, int j, const Rat& c, const char* vx,
                     const char* vy) {
  Rat a = c;
  bool neg = a.sign() < 0;
  if (neg) a = -a;
  if (out.empty())
    out += neg ? "-" : "";
  else
    out += neg ? " - " : " + ";
  std::string parts;
  auto add_var = [&](const char* v, int e) {
    if (e == 0) return;
    if (!parts.empty()) parts += "*";
    parts += v;
    if (e > 1) parts += "^" + std::to_string(e);
  };
  add_var(vx, i);
  add_var(vy, j);
  if (parts.empty()) {
    out += a.str();
  } else if (a == Rat(1)) {
    out += parts;
  } else {
    out += a.str() + "*" + parts;
  }
}
}  // namespace

std::string BiPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto& [k, c] : graded_terms(*this)) append_monomial(out, k.first, k.second, c, "x", "y");
  return out;
}

bool BiPoly::less(const BiPoly& a, const BiPoly& b) {
  auto ta = graded_terms(a), tb = graded_terms(b);
  for (size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
    if (ta[i].first != tb[i].first) return ta[i].first < tb[i].first;
    if (ta[i].second != tb[i].second) return ta[i].second < tb[i].second;
  }
  return ta.size() < tb.size();
}

std::pair<BiPoly, BiPoly> divmod_monic_y(const BiPoly& phi, const BiPoly& u) {
  if (!u.monic_in_y() || u.deg_y() < 1)
    throw domain_error("not_monic", "divisor must be monic in y of positive degree");
  int d = u.deg_y();
  BiPoly q, r = phi;
  while (!r.is_zero() && r.deg_y() >= d) {
    int dr = r.deg_y();
    BiPoly lead = r.y_coeff(dr);  // polynomial in x
    BiPoly term;
    for (auto& [k, c] : lead.terms()) term.set(k.first, dr - d, c);
    q = q + term;
    r = r - term * u;
  }
  return {q, r};
}

std::vector<BiPoly> weierstrass_divide(const BiPoly& phi, const BiPoly& u) {
  if (!u.monic_in_y() || u.deg_y() < 1)
    throw domain_error("not_monic", "key divisor must be monic in y of positive degree");
  std::vector<BiPoly> out;
  BiPoly rest = phi;
  if (rest.is_zero()) {
    out.push_back(BiPoly::zero());
    return out;
  }
  while (!rest.is_zero()) {
    auto [q, r] = divmod_monic_y(rest, u);
    out.push_back(r);
    rest = q;
  }
  return out;
}

// --------------------------- expression parser ------------------------------

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  std::string vx, vy;

  explicit Parser(const std::string& text, std::string x, std::string y)
      : s(text), vx(std::move(x)), vy(std::move(y)) {}

  [[noreturn]] void fail(const std::string& msg, size_t at) {
    throw domain_error("syntax", msg + " at offset " + std::to_string(at));
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool starts_factor() {
    skip_ws();
    if (pos >= s.size()) return false;
    char c = s[pos];
    if (c == '(') return true;
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return matches_var(vx) || matches_var(vy);
  }

  bool matches_var(const std::string& v) {
    if (v.empty() || s.compare(pos, v.size(), v) != 0) return false;
    size_t end = pos + v.size();
    if (end < s.size() && std::isalnum(static_cast<unsigned char>(s[end]))) return false;
    return true;
  }

  Int parse_int() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected integer", start);
    return Int(s.substr(start, pos - start));
  }

  int parse_exponent() {
    skip_ws();
    if (pos < s.size() && s[pos] == '-') fail("negative exponent", pos);
    Int e = parse_int();
    if (e > 1000000) fail("exponent too large", pos);
    return static_cast<int>(e);
  }

  BiPoly parse_base() {
    skip_ws();
    if (pos >= s.size()) fail("expected operand", pos);
    char c = s[pos];
    if (c == '(') {
      size_t open = pos++;
      BiPoly e = parse_expr();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') fail("missing ')' for '(' ", open);
      ++pos;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int n = parse_int();
      skip_ws();
      if (pos < s.size() && s[pos] == '/') {
        // Only a plain rational literal p/q; general division is not in the grammar.
        size_t save = pos;
        ++pos;
        skip_ws();
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          Int d = parse_int();
          if (d == 0) fail("zero denominator", save);
          return BiPoly::constant(Rat(n, d));
        }
        pos = save;
      }
      return BiPoly::constant(Rat(n));
    }
    if (matches_var(vx)) {
      pos += vx.size();
      return BiPoly::var_x();
    }
    if (matches_var(vy)) {
      pos += vy.size();
      return BiPoly::var_y();
    }
    fail("unexpected character", pos);
  }

  BiPoly parse_factor() {
    BiPoly b = parse_base();
    skip_ws();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      int e = parse_exponent();
      b = b.pow(e);
    }
    return b;
  }

  BiPoly parse_term() {
    BiPoly p = parse_factor();
    for (;;) {
      skip_ws();
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        skip_ws();
        if (pos >= s.size()) fail("expected operand", pos);
        p = p * parse_factor();
      } else if (starts_factor()) {
        p = p * parse_factor();  // juxtaposition
      } else {
        break;
      }
    }
    return p;
  }

  BiPoly parse_expr() {
    skip_ws();
    bool neg = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      neg = s[pos] == '-';
      ++pos;
    }
    BiPoly p = parse_term();
    if (neg) p = -p;
    for (;;) {
      skip_ws();
      if (pos >= s.size()) break;
      char c = s[pos];
      if (c != '+' && c != '-') break;
      ++pos;
      skip_ws();
      if (pos >= s.size()) fail("expected operand", pos);
      BiPoly t = parse_term();
      p = (c == '+') ? p + t : p - t;
    }
    return p;
  }

  BiPoly run() {
    BiPoly p = parse_expr();
    skip_ws();
    if (pos != s.size()) fail("trailing input", pos);
    return p;
  }
};

}  // namespace

BiPoly parse_poly(const std::string& text, const std::string& vx, const std::string& vy) {
  return Parser(text, vx, vy).run();
}

// --------------------------------- TPoly ------------------------------------

TPoly TPoly::constant(const Rat& c) { return monomial(0, c); }

TPoly TPoly::monomial(long e, const Rat& c) {
  TPoly p;
  if (!c.is_zero()) p.terms_[e] = c;
  return p;
}

std::optional<long> TPoly::ord() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first;
}

long TPoly::deg() const { return terms_.empty() ? -1 : terms_.rbegin()->first; }

Rat TPoly::coeff(long e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

Rat TPoly::lead_low() const {
  if (terms_.empty()) throw domain_error("zero_polynomial", "lowest coefficient of zero");
  return terms_.begin()->second;
}

TPoly TPoly::operator-() const {
  TPoly r;
  for (auto& [e, c] : terms_) r.terms_[e] = -c;
  return r;
}

TPoly TPoly::operator+(const TPoly& o) const {
  TPoly r = *this;
  for (auto& [e, c] : o.terms_) {
    auto it = r.terms_.find(e);
    if (it == r.terms_.end()) {
      r.terms_[e] = c;
    } else {
      it->second += c;
      if (it->second.is_zero()) r.terms_.erase(it);
    }
  }
  return r;
}

TPoly TPoly::operator-(const TPoly& o) const { return *this + (-o); }

TPoly TPoly::operator*(const TPoly& o) const {
  TPoly r;
  for (auto& [ea, ca] : terms_)
    for (auto& [eb, cb] : o.terms_) {
      long e = ea + eb;
      auto it = r.terms_.find(e);
      if (it == r.terms_.end()) {
        Rat c = ca * cb;
        if (!c.is_zero()) r.terms_[e] = c;
      } else {
        it->second += ca * cb;
        if (it->second.is_zero()) r.terms_.erase(it);
      }
    }
  return r;
}

TPoly TPoly::operator*(const Rat& c) const {
  TPoly r;
  if (c.is_zero()) return r;
  for (auto& [e, a] : terms_) r.terms_[e] = a * c;
  return r;
}

TPoly TPoly::pow(int e) const {
  if (e < 0) throw domain_error("negative_exponent", "negative polynomial power");
  TPoly r = constant(Rat(1));
  TPoly b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

TPoly TPoly::shifted(long k) const {
  TPoly r;
  for (auto& [e, c] : terms_) {
    if (e + k < 0) throw domain_error("negative_exponent", "shift below t^0");
    r.terms_[e + k] = c;
  }
  return r;
}

TPoly TPoly::truncated(long order) const {
  TPoly r;
  for (auto& [e, c] : terms_) {
    if (e >= order) break;
    r.terms_[e] = c;
  }
  return r;
}

void TPoly::set(long e, const Rat& c) {
  if (c.is_zero())
    terms_.erase(e);
  else
    terms_[e] = c;
}

std::string TPoly::str(const std::string& var) const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto& [e, c] : terms_) {
    Rat a = c;
    bool neg = a.sign() < 0;
    if (neg) a = -a;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (e == 0) {
      out += a.str();
    } else {
      std::string v = var + (e == 1 ? "" : "^" + std::to_string(e));
      out += (a == Rat(1)) ? v : a.str() + "*" + v;
    }
  }
  return out;
}

TPoly tpoly_divexact(const TPoly& a, const TPoly& b) {
  if (b.is_zero()) throw domain_error("division_by_zero", "division by zero polynomial");
  TPoly r = a, q;
  long db = b.deg();
  Rat lb = b.coeff(db);
  while (!r.is_zero()) {
    long dr = r.deg();
    if (dr < db) throw domain_error("inexact_division", "polynomial division not exact");
    Rat c = r.coeff(dr) / lb;
    q.set(dr - db, c);
    r = r - b * TPoly::monomial(dr - db, c);
  }
  return q;
}

TPoly tpoly_gcd(TPoly a, TPoly b) {
  while (!b.is_zero()) {
    // plain remainder in Q[t]
    TPoly r = a;
    long db = b.deg();
    Rat lb = b.coeff(db);
    while (!r.is_zero() && r.deg() >= db) {
      long dr = r.deg();
      Rat c = r.coeff(dr) / lb;
      r = r - b * TPoly::monomial(dr - db, c);
    }
    a = b;
    b = r;
  }
  if (a.is_zero()) return a;
  return a * (Rat(1) / a.coeff(a.deg()));
}

// --------------------------------- RatFun -----------------------------------

RatFun::RatFun(TPoly num, TPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw domain_error("division_by_zero", "rational function with zero denominator");
  reduce();
}

void RatFun::reduce() {
  if (num_.is_zero()) {
    den_ = TPoly::constant(Rat(1));
    return;
  }
  long dord = den_.ord().value();
  if (dord > 0) {
    auto nord = num_.ord();
    if (!nord || *nord < dord)
      throw domain_error("pole", "rational function with a pole at t = 0");
    num_ = num_.shifted(-dord);
    den_ = den_.shifted(-dord);
  }
  if (num_.deg() + den_.deg() > 96) {
    TPoly g = tpoly_gcd(num_, den_);
    if (g.deg() > 0) {
      num_ = tpoly_divexact(num_, g);
      den_ = tpoly_divexact(den_, g);
    }
  }
  Rat d0 = den_.at_zero();
  num_ = num_ * (Rat(1) / d0);
  den_ = den_ * (Rat(1) / d0);
}

std::string RatFun::str(const std::string& var) const {
  if (den_ == TPoly::constant(Rat(1))) return num_.str(var);
  return "(" + num_.str(var) + ") / (" + den_.str(var) + ")";
}

Rat RatFun::lead_low() const { return num_.lead_low() / den_.at_zero(); }

Rat RatFun::value_at_zero() const {
  auto o = num_.ord();
  if (!o || *o > 0) return Rat(0);
  return num_.at_zero() / den_.at_zero();
}

RatFun RatFun::operator+(const RatFun& o) const {
  return RatFun(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
RatFun RatFun::operator-(const RatFun& o) const {
  return RatFun(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
RatFun RatFun::operator*(const RatFun& o) const { return RatFun(num_ * o.num_, den_ * o.den_); }
RatFun RatFun::operator/(const RatFun& o) const {
  if (o.num_.is_zero()) throw domain_error("division_by_zero", "division by zero function");
  return RatFun(num_ * o.den_, den_ * o.num_);
}
RatFun RatFun::operator-() const { return RatFun(-num_, den_); }

// ------------------------------- composition --------------------------------

TPoly compose(const BiPoly& phi, const TPoly& xt, const TPoly& yt) {
  // Cache powers; supports come from small desk-scale polynomials.
  std::vector<TPoly> xp{TPoly::constant(Rat(1))}, yp{TPoly::constant(Rat(1))};
  auto xpow = [&](int e) -> const TPoly& {
    while (static_cast<int>(xp.size()) <= e) xp.push_back(xp.back() * xt);
    return xp[e];
  };
  auto ypow = [&](int e) -> const TPoly& {
    while (static_cast<int>(yp.size()) <= e) yp.push_back(yp.back() * yt);
    return yp[e];
  };
  TPoly r;
  for (auto& [k, c] : phi.terms()) r = r + xpow(k.first) * ypow(k.second) * c;
  return r;
}

RatFun compose(const BiPoly& phi, const RatFun& xt, const RatFun& yt) {
  std::vector<RatFun> xp{RatFun::constant(Rat(1))}, yp{RatFun::constant(Rat(1))};
  auto xpow = [&](int e) -> const RatFun& {
    while (static_cast<int>(xp.size()) <= e) xp.push_back(xp.back() * xt);
    return xp[e];
  };
  auto ypow = [&](int e) -> const RatFun& {
    while (static_cast<int>(yp.size()) <= e) yp.push_back(yp.back() * yt);
    return yp[e];
  };
  RatFun r;
  for (auto& [k, c] : phi.terms())
    r = r + xpow(k.first) * ypow(k.second) * RatFun::constant(c);
  return r;
}

// -------------------------------- resultant ---------------------------------

namespace {

// Determinant of a rational matrix by Gaussian elimination.
Rat det_rational(std::vector<std::vector<Rat>> m) {
  size_t n = m.size();
  Rat det(1);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) return Rat(0);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    Rat inv = Rat(1) / m[col][col];
    for (size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      Rat f = m[r][col] * inv;
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

Rat eval_tpoly(const TPoly& p, const Rat& t) {
  Rat acc(0), tp(1);
  long prev = 0;
  for (auto& [e, c] : p.terms()) {
    for (long k = prev; k < e; ++k) tp *= t;
    prev = e;
    acc += c * tp;
  }
  return acc;
}

Rat sylvester_at(const std::vector<TPoly>& f, const std::vector<TPoly>& g, const Rat& t) {
  int m = static_cast<int>(f.size()) - 1, n = static_cast<int>(g.size()) - 1;
  std::vector<std::vector<Rat>> mat(m + n, std::vector<Rat>(m + n, Rat(0)));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) mat[r][r + (m - k)] = eval_tpoly(f[k], t);
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) mat[n + r][r + (n - k)] = eval_tpoly(g[k], t);
  return det_rational(std::move(mat));
}

}  // namespace

TPoly resultant_in_s(const std::vector<TPoly>& f, const std::vector<TPoly>& g) {
  int m = static_cast<int>(f.size()) - 1, n = static_cast<int>(g.size()) - 1;
  if (m < 0 || f[m].is_zero() || n < 0 || g[n].is_zero())
    throw domain_error("resultant", "leading coefficient must be nonzero");
  if (m == 0 && n == 0) return TPoly::constant(Rat(1));
  long degt = 0;
  for (auto& c : f) degt = std::max(degt, c.is_zero() ? 0 : c.deg());
  long degt2 = 0;
  for (auto& c : g) degt2 = std::max(degt2, c.is_zero() ? 0 : c.deg());
  long bound = degt * n + degt2 * m + 1;

  // Evaluate at points where both leading coefficients stay nonzero, then
  // interpolate (Newton form) back to a polynomial in t.
  std::vector<Rat> xs, ys;
  long candidate = 0;
  while (static_cast<long>(xs.size()) < bound + 1) {
    Rat t(candidate++);
    if (eval_tpoly(f[m], t).is_zero() || eval_tpoly(g[n], t).is_zero()) continue;
    xs.push_back(t);
    ys.push_back(sylvester_at(f, g, t));
  }
  size_t npts = xs.size();
  std::vector<Rat> coef = ys;  // Newton divided differences
  for (size_t j = 1; j < npts; ++j)
    for (size_t i = npts - 1; i >= j; --i) {
      coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  TPoly result = TPoly::constant(coef[npts - 1]);
  for (size_t i = npts - 1; i-- > 0;) {
    // result = result * (t - xs[i]) + coef[i]
    TPoly lin;
    lin.set(1, Rat(1));
    lin.set(0, -xs[i]);
    result = result * lin + TPoly::constant(coef[i]);
  }
  return result;
}

}  // namespace valtree
