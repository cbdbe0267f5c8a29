#include "valtree/skp.hpp"

#include <algorithm>
#include <sstream>

namespace valtree {

namespace {

BiPoly work_x() { return BiPoly::var_x(); }
BiPoly work_y() { return BiPoly::var_y(); }

// Common denominator representation of values[0..j] as integers.
struct LatticeView {
  Int denom;
  std::vector<Int> nums;  // values[l] = nums[l] / denom
};

LatticeView lattice_view(const std::vector<ExtRat>& values, int upto) {
  LatticeView lv;
  lv.denom = 1;
  for (int l = 0; l <= upto; ++l) lv.denom = int_lcm(lv.denom, values[l].finite().den());
  for (int l = 0; l <= upto; ++l) {
    const Rat& r = values[l].finite();
    lv.nums.push_back(r.num() * (lv.denom / r.den()));
  }
  return lv;
}

// Minimal n >= 1 with n*values[j] inside the Z-lattice of values[0..j-1].
Int minimal_multiplier(const std::vector<ExtRat>& values, int j) {
  LatticeView lv = lattice_view(values, j);
  Int g = 0;
  for (int l = 0; l < j; ++l) g = int_gcd(g, lv.nums[l]);
  if (g == 0) throw domain_error("invalid_skp", "degenerate value lattice");
  Int r = int_gcd(lv.nums[j], g);
  return g / r;
}

bool in_lattice(const std::vector<ExtRat>& values, int count, const Rat& target) {
  // membership of target in sum of Z*values[l], l < count
  Int denom = 1;
  for (int l = 0; l < count; ++l) denom = int_lcm(denom, values[l].finite().den());
  denom = int_lcm(denom, target.den());
  Int g = 0;
  for (int l = 0; l < count; ++l) {
    const Rat& r = values[l].finite();
    g = int_gcd(g, r.num() * (denom / r.den()));
  }
  Int t = target.num() * (denom / target.den());
  if (g == 0) return t == 0;
  return t % g == 0;
}

}  // namespace

Skp::Skp(std::vector<BiPoly> keys, std::vector<ExtRat> values, bool swapped)
    : keys_(std::move(keys)), values_(std::move(values)), swapped_(swapped) {
  finalize();
}

Skp Skp::multiplicity_valuation() {
  return Skp({work_x(), work_y()}, {ExtRat(Rat(1)), ExtRat(Rat(1))}, false);
}

Skp Skp::monomial(const ExtRat& beta1, bool swapped) {
  return Skp({work_x(), work_y()}, {ExtRat(Rat(1)), beta1}, swapped);
}

Skp Skp::axis_curve(bool x_axis) { return monomial(ExtRat::infinity(), x_axis); }

long Skp::d(int j) const { return deg_[j]; }
const Int& Skp::n(int j) const {
  if (j == length() && final_n_) return *final_n_;
  return n_.at(j);
}
const std::vector<Int>& Skp::m_row(int j) const { return m_.at(j); }
const Rat& Skp::theta(int j) const { return theta_.at(j); }

bool Skp::is_multiplicity_valuation() const {
  return length() == 1 && values_[1] == ExtRat(Rat(1));
}

bool Skp::operator==(const Skp& o) const {
  if (is_multiplicity_valuation() && o.is_multiplicity_valuation()) return true;
  return swapped_ == o.swapped_ && keys_ == o.keys_ && values_ == o.values_;
}

bool Skp::less(const Skp& a, const Skp& b) {
  if (a == b) return false;
  if (a.swapped_ != b.swapped_) return !a.swapped_;
  if (a.keys_.size() != b.keys_.size()) return a.keys_.size() < b.keys_.size();
  for (size_t j = 0; j < a.values_.size(); ++j) {
    if (a.values_[j] != b.values_[j]) return a.values_[j] < b.values_[j];
  }
  for (size_t j = 0; j < a.keys_.size(); ++j) {
    if (a.keys_[j] != b.keys_[j]) return BiPoly::less(a.keys_[j], b.keys_[j]);
  }
  return false;
}

std::string Skp::str() const {
  std::string out = "[(";
  for (size_t j = 0; j < keys_.size(); ++j) {
    if (j) out += ", ";
    out += keys_[j].str();
  }
  out += "); (";
  for (size_t j = 0; j < values_.size(); ++j) {
    if (j) out += ", ";
    out += values_[j].str();
  }
  out += ")]";
  if (swapped_) out += " [coords swapped]";
  return out;
}

void Skp::finalize() {
  auto bad = [](const std::string& what, const std::string& msg) {
    throw domain_error(what, msg);
  };
  int k = length();
  if (k < 1 || keys_.size() != values_.size())
    bad("invalid_skp", "need keys (U_0..U_k) with matching values, k >= 1");
  if (keys_[0] != work_x() || keys_[1] != work_y())
    bad("invalid_skp", "(P0) violated: U_0 = x and U_1 = y required");
  for (int j = 0; j < k; ++j)
    if (values_[j].is_infinite() && !(j == 1 && k == 1))
      bad("invalid_skp", "only the final value may be infinite");
  if (values_[0] != ExtRat(Rat(1)))
    bad("invalid_skp", "normalization requires b_0 = 1 (after the optional swap)");
  if (values_[1] < values_[0])
    bad("invalid_skp", "normalization requires b_1 >= b_0; use the swap flag");

  deg_.assign(k + 1, 0);
  deg_[0] = 0;
  for (int j = 1; j <= k; ++j) {
    deg_[j] = keys_[j].deg_y();
    if (j >= 1 && !keys_[j].monic_in_y())
      bad("invalid_skp", "key U_" + std::to_string(j) + " is not monic in y");
  }
  if (deg_[1] != 1) bad("invalid_skp", "U_1 must have degree 1 in y");

  n_.assign(k, Int(0));
  m_.assign(k, {});
  theta_.assign(k, Rat(0));

  for (int j = 1; j < k; ++j) {
    Int nj = minimal_multiplier(values_, j);
    n_[j] = nj;
    // unique decomposition n_j b_j = sum m_l b_l with 0 <= m_l < n_l for l >= 1
    Rat target = values_[j].finite() * Rat(nj);
    std::vector<Int> row(j, Int(0));
    for (int l = j - 1; l >= 1; --l) {
      Int nl = n_[l];
      bool found = false;
      for (Int cand = 0; cand < nl; ++cand) {
        Rat rest = target - values_[l].finite() * Rat(cand);
        if (in_lattice(values_, l, rest)) {
          row[l] = cand;
          target = rest;
          found = true;
          break;
        }
      }
      if (!found)
        bad("invalid_skp", "(P1) violated: no admissible decomposition at level " +
                               std::to_string(j));
    }
    if (!target.is_integer() || target.sign() < 0)
      bad("invalid_skp", "(P1) violated: decomposition at level " + std::to_string(j) +
                             " leaves m_{j,0} = " + target.str());
    row[0] = target.num();
    m_[j] = row;

    if (!(values_[j + 1] > values_[j] * Rat(nj)))
      bad("invalid_skp", "(P1) violated: b_" + std::to_string(j + 1) + " <= n_" +
                             std::to_string(j) + " b_" + std::to_string(j));

    // (P2): U_{j+1} = U_j^n_j - theta_j prod U_l^{m_l}
    if (deg_[j + 1] != nj * deg_[j])
      bad("invalid_skp", "(P2) violated: deg_y U_" + std::to_string(j + 1) +
                             " != n_j deg_y U_j");
    BiPoly w = keys_[j].pow(static_cast<int>(nj)) - keys_[j + 1];
    BiPoly p = BiPoly::constant(Rat(1));
    for (int l = 0; l < j; ++l)
      p = p * keys_[l].pow(static_cast<int>(row[l]));
    if (w.is_zero()) bad("invalid_skp", "(P2) violated: theta_j must be nonzero");
    auto first = p.terms().begin();
    Rat th = w.coeff(first->first.first, first->first.second) / first->second;
    if (th.is_zero() || !(p * th == w))
      bad("invalid_skp", "(P2) violated: U_" + std::to_string(j + 1) +
                             " is not U_j^n_j - theta * prod U_l^m_l");
    theta_[j] = th;
  }

  for (int j = 1; j <= k; ++j) {
    long expect = 1;
    for (int l = 1; l < j; ++l) expect *= static_cast<long>(n_[l]);
    if (deg_[j] != expect)
      bad("invalid_skp", "degree ladder violated at U_" + std::to_string(j));
    if (keys_[j].multiplicity() != deg_[j])
      bad("invalid_skp", "key multiplicity != degree at U_" + std::to_string(j));
  }

  if (values_[k].is_finite()) final_n_ = minimal_multiplier(values_, k);

  // the multiplicity valuation is coordinate-agnostic
  if (is_multiplicity_valuation()) swapped_ = false;
}

Violation validate(const std::vector<BiPoly>& keys, const std::vector<ExtRat>& values,
                   bool swapped) {
  try {
    Skp s(keys, values, swapped);
    (void)s;
    return {true, "ok"};
  } catch (const domain_error& e) {
    return {false, e.what()};
  }
}

// ----------------------------------- eval -----------------------------------

namespace {

ExtRat eval_work(const Skp& s, int level, const BiPoly& phi) {
  if (phi.is_zero()) return ExtRat::infinity();
  if (level == 1) {
    const ExtRat& b0 = s.values()[0];
    const ExtRat& b1 = s.values()[1];
    std::optional<ExtRat> best;
    for (auto& [key, c] : phi.terms()) {
      ExtRat v = b0 * Rat(key.first);
      if (key.second > 0) v = v + b1 * Rat(key.second);
      if (!best || v < *best) best = v;
    }
    return *best;
  }
  auto parts = weierstrass_divide(phi, s.keys()[level]);
  const ExtRat& bk = s.values()[level];
  std::optional<ExtRat> best;
  for (size_t j = 0; j < parts.size(); ++j) {
    if (parts[j].is_zero()) continue;
    ExtRat v = eval_work(s, level - 1, parts[j]);
    if (j > 0) v = v + bk * Rat(static_cast<long long>(j));
    if (!best || v < *best) best = v;
  }
  if (!best) return ExtRat::infinity();
  return *best;
}

}  // namespace

ExtRat eval(const Skp& s, const BiPoly& phi) {
  if (phi.is_zero()) return ExtRat::infinity();
  BiPoly work = s.swapped() ? phi.swapped_vars() : phi;
  return eval_work(s, s.length(), work);
}

// ------------------------------ skp_of_branch -------------------------------

BranchSkp skp_of_branch(const BranchParam& c, int max_depth, std::optional<Rat> stop_alpha) {
  Rat inv_n = Rat(1) / Rat(c.n());
  auto value_of = [&](const BiPoly& u) -> ExtRat {
    ExtRat o = substitute_order(u, c);
    if (o.is_infinite()) return o;
    return ExtRat(o.finite() * inv_n);
  };

  std::vector<BiPoly> keys{work_x(), work_y()};
  std::vector<ExtRat> values{ExtRat(Rat(1)), value_of(work_y())};

  for (;;) {
    int k = static_cast<int>(keys.size()) - 1;
    const ExtRat& bk = values[k];
    if (bk.is_infinite()) return {Skp(keys, values, false), true};
    long dk = keys[k].deg_y();
    if (stop_alpha && !(Rat(dk) * (*stop_alpha) > bk.finite())) break;
    if (k >= max_depth) break;

    Int nk = minimal_multiplier(values, k);
    // decomposition of n_k b_k; reuse the structural data of the prefix
    Skp prefix(keys, values, false);
    Rat target = bk.finite() * Rat(nk);
    std::vector<Int> row(k, Int(0));
    for (int l = k - 1; l >= 1; --l) {
      Int nl = prefix.n(l);
      for (Int cand = 0; cand < nl; ++cand) {
        Rat rest = target - values[l].finite() * Rat(cand);
        if (in_lattice(values, l, rest)) {
          row[l] = cand;
          target = rest;
          break;
        }
      }
    }
    row[0] = target.num();
    if (!target.is_integer() || target.sign() < 0)
      throw domain_error("internal", "branch SKP decomposition failed");

    BiPoly prod = BiPoly::constant(Rat(1));
    for (int l = 0; l < k; ++l) prod = prod * keys[l].pow(static_cast<int>(row[l]));
    TPoly a = compose(keys[k].pow(static_cast<int>(nk)), c.xt(), c.yt());
    TPoly b = compose(prod, c.xt(), c.yt());
    if (a.is_zero() || b.is_zero() || *a.ord() != *b.ord())
      throw domain_error("internal", "branch SKP leading orders disagree");
    Rat theta = a.lead_low() / b.lead_low();
    BiPoly next = keys[k].pow(static_cast<int>(nk)) - prod * theta;
    keys.push_back(next);
    values.push_back(value_of(next));
  }
  return {Skp(keys, values, false), false};
}

// ------------------------------ order & wedge -------------------------------

namespace {

// Largest j such that the keys agree up to j and the values up to j-1.
int contact_level(const Skp& a, const Skp& b) {
  int top = std::min(a.length(), b.length());
  int k = 1;
  while (k < top && a.keys()[k + 1] == b.keys()[k + 1] && a.values()[k] == b.values()[k]) ++k;
  return k;
}

}  // namespace

Order compare(const Skp& a, const Skp& b) {
  if (a == b) return Order::Equal;
  if (a.is_multiplicity_valuation()) return Order::Less;
  if (b.is_multiplicity_valuation()) return Order::Greater;
  if (a.swapped() != b.swapped()) return Order::Incomparable;
  int k = contact_level(a, b);
  if (k == a.length() && k <= b.length()) {
    if (b.values()[k] >= a.values()[k]) return Order::Less;
  }
  if (k == b.length() && k <= a.length()) {
    if (a.values()[k] >= b.values()[k]) return Order::Greater;
  }
  return Order::Incomparable;
}

Skp wedge(const Skp& a, const Skp& b) {
  if (a == b) return a;
  if (a.is_multiplicity_valuation() || b.is_multiplicity_valuation())
    return Skp::multiplicity_valuation();
  if (a.swapped() != b.swapped()) return Skp::multiplicity_valuation();
  int k = contact_level(a, b);
  std::vector<BiPoly> keys(a.keys().begin(), a.keys().begin() + k + 1);
  std::vector<ExtRat> values(a.values().begin(), a.values().begin() + k);
  values.push_back(min(a.values()[k], b.values()[k]));
  return Skp(keys, values, a.swapped());
}

// ---------------------------- contact evaluation ----------------------------

ExtRat eval_irreducible(const Skp& s, const Skp& phi_skp) {
  if (!phi_skp.is_curve_type())
    throw domain_error("not_a_curve", "second argument must be a curve-type SKP");
  if (s.values()[0] != ExtRat(Rat(1)) || phi_skp.values()[0] != ExtRat(Rat(1)))
    throw domain_error("normalization_mismatch", "both SKPs must be normalized by b_0 = 1");

  long mult_phi = phi_skp.keys().back().deg_y();  // multiplicity of the curve
  if (s.swapped() != phi_skp.swapped()) {
    // opposite coordinate cones: the wedge is v_m, so v(phi) = m(phi) * 1
    return ExtRat(Rat(mult_phi));
  }
  if (s == phi_skp) return ExtRat::infinity();

  int k = contact_level(s, phi_skp);
  Rat gamma(1);
  for (int j = k; j < phi_skp.length(); ++j) gamma *= Rat(phi_skp.n(j));
  ExtRat m = min(s.values()[k], phi_skp.values()[k]);
  return m * gamma;
}

// -------------------------------- invariants --------------------------------

InvariantReport invariants(const Skp& s) {
  InvariantReport r;
  int k = s.length();
  bool curve = s.is_curve_type();
  long dk = s.d(k);
  r.mult = dk;
  r.monomial = (k == 1) && !curve;

  if (curve) {
    r.kind = "curve";
    r.rk = 2;
    r.rat_rk = 2;
    r.tr_deg = 0;
    r.alpha = ExtRat::infinity();
    r.thinness = ExtRat::infinity();
  } else if (s.inf_sing_truncated) {
    r.kind = "infinitely-singular-truncated";
    r.rk = 1;
    r.rat_rk = 1;
    r.tr_deg = 0;
    r.alpha = ExtRat(s.values()[k].finite() / Rat(dk));
  } else {
    r.kind = "divisorial";
    r.rk = 1;
    r.rat_rk = 1;
    r.tr_deg = 1;
    r.alpha = ExtRat(s.values()[k].finite() / Rat(dk));
  }

  // approximating sequence: key indices with n_j >= 2, strictly below the end
  Rat a_run(2), alpha_prev(1);
  for (int j = 1; j < k; ++j) {
    if (s.n(j) < 2) continue;
    Rat alpha_j = s.values()[j].finite() / Rat(s.d(j));
    a_run += Rat(s.d(j)) * (alpha_j - alpha_prev);
    alpha_prev = alpha_j;
    r.approx.push_back({j, s.d(j), alpha_j, a_run});
  }
  if (!curve) {
    Rat alpha_end = s.values()[k].finite() / Rat(dk);
    r.thinness = ExtRat(a_run + Rat(dk) * (alpha_end - alpha_prev));
    if (r.kind == "divisorial")
      r.generic_mult = static_cast<long>(s.n(k)) * dk;
  }

  // value semigroup generators: m_i alpha_i for the approximating sequence
  // (including the root) and m * alpha for the valuation itself
  std::vector<ExtRat> gens;
  gens.push_back(ExtRat(Rat(1)));
  for (auto& e : r.approx) gens.push_back(ExtRat(e.alpha * Rat(e.mult)));
  gens.push_back(r.alpha * Rat(dk));
  std::sort(gens.begin(), gens.end(), [](const ExtRat& a, const ExtRat& b) { return a < b; });
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  r.semigroup = std::move(gens);
  return r;
}

RelativeInvariants relative_invariants(const Skp& s) {
  if (s.swapped() && s.is_curve_type() && s.length() == 1)
    throw domain_error("unsupported", "relative invariants are undefined at the x-axis itself");
  InvariantReport base = invariants(s);
  ExtRat vx = s.swapped() ? s.values()[1] : s.values()[0];  // value of the original x
  Rat vxr = vx.finite();
  RelativeInvariants r;
  r.alpha_x = base.alpha * (Rat(1) / (vxr * vxr));
  r.thinness_x = base.thinness * (Rat(1) / vxr);
  bool on_x_segment = s.swapped() && s.length() == 1;  // monomial on [v_x, v_m]
  if (s.is_multiplicity_valuation()) on_x_segment = true;
  if (on_x_segment)
    r.mult_x = ExtRat(Rat(1));
  else
    r.mult_x = ExtRat(Rat(base.mult) * vxr);
  return r;
}

// ------------------------------- ball metric --------------------------------

ExtRat intersection_number_general(const BranchParam& a, const BranchParam& b) {
  if (a == b) return ExtRat::infinity();
  if (a.normal_exact() || b.normal_exact()) return intersection_number(a, b);
  // Both raw: go through the wedge of the curve valuations, deepening the
  // truncated SKPs until the contact level is stable. The wedge is stable once
  // it sits strictly below every truncation end that has not reached its curve.
  for (int depth = 8;; depth *= 2) {
    BranchSkp sa = skp_of_branch(a, depth);
    BranchSkp sb = skp_of_branch(b, depth);
    const Skp& x = sa.skp;
    const Skp& y = sb.skp;
    int k = contact_level(x, y);
    bool stable_a = sa.reached_curve || k < x.length();
    bool stable_b = sb.reached_curve || k < y.length();
    bool identical = (k == x.length() && k == y.length() && x.values()[k] == y.values()[k]);
    if (stable_a && stable_b && !(identical && !sa.reached_curve)) {
      if (identical && sa.reached_curve && sb.reached_curve) return ExtRat::infinity();
      Skp w = wedge(x, y);
      InvariantReport iw = invariants(w);
      return iw.alpha * Rat(a.n()) * Rat(b.n());
    }
    if (depth > 512)
      throw domain_error("truncation_insufficient",
                         "branches agree beyond the SKP depth cap");
  }
}

ExtRat ball_distance(const BranchParam& a, const BranchParam& b) {
  ExtRat inter = intersection_number_general(a, b);
  if (inter.is_infinite()) return ExtRat(Rat(0));  // identical curves
  Rat m1(a.n()), m2(b.n());
  return ExtRat(m1 * m2 / inter.finite());
}

// ------------------------------ profile helpers -----------------------------

FinalLevel final_level_decomposition(const Skp& s) {
  int k = s.length();
  if (s.values()[k].is_infinite())
    throw domain_error("infinite_value", "the final value must be rational");
  const auto& values = s.values();
  Int nk = minimal_multiplier(values, k);
  Rat target = values[k].finite() * Rat(nk);
  std::vector<Int> row(k, Int(0));
  for (int l = k - 1; l >= 1; --l) {
    Int nl = s.n(l);
    for (Int cand = 0; cand < nl; ++cand) {
      Rat rest = target - values[l].finite() * Rat(cand);
      if (in_lattice(values, l, rest)) {
        row[l] = cand;
        target = rest;
        break;
      }
    }
  }
  if (!target.is_integer() || target.sign() < 0)
    throw domain_error("internal", "final level decomposition failed");
  row[0] = target.num();
  return {nk, row};
}

Skp truncate_at_skewness(const Skp& s, const Rat& alpha_target) {
  if (alpha_target < Rat(1))
    throw domain_error("out_of_range", "skewness targets start at 1");
  if (alpha_target == Rat(1)) return Skp::multiplicity_valuation();
  int k = s.length();
  for (int l = 1; l <= k; ++l) {
    ExtRat alpha_l = s.values()[l].is_infinite()
                         ? ExtRat::infinity()
                         : ExtRat(s.values()[l].finite() / Rat(s.d(l)));
    if (ExtRat(alpha_target) <= alpha_l) {
      std::vector<BiPoly> keys(s.keys().begin(), s.keys().begin() + l + 1);
      std::vector<ExtRat> values(s.values().begin(), s.values().begin() + l);
      if (ExtRat(alpha_target) == alpha_l)
        values.push_back(s.values()[l]);
      else
        values.push_back(ExtRat(alpha_target * Rat(s.d(l))));
      return Skp(keys, values, s.swapped());
    }
  }
  throw domain_error("out_of_range", "skewness target exceeds the skewness of the valuation");
}

SkewnessProfile profile(const Skp& s) {
  SkewnessProfile p;
  int k = s.length();
  for (int l = 1; l <= k; ++l) {
    ExtRat alpha_l = s.values()[l].is_infinite()
                         ? ExtRat::infinity()
                         : ExtRat(s.values()[l].finite() / Rat(s.d(l)));
    long mult = s.d(l) == 0 ? 1 : s.d(l);
    if (!p.levels.empty() && p.levels.back().alpha_end == alpha_l) continue;
    p.levels.push_back({alpha_l, mult});
  }
  return p;
}

ExtRat SkewnessProfile::thinness_at(const ExtRat& alpha) const {
  Rat acc(2), prev(1);
  for (auto& lv : levels) {
    const ExtRat upper = min(alpha, lv.alpha_end);
    if (upper.is_infinite()) return ExtRat::infinity();
    if (upper.finite() > prev) {
      acc += Rat(lv.mult) * (upper.finite() - prev);
      prev = upper.finite();
    }
    if (alpha <= lv.alpha_end) break;
  }
  if (alpha.is_infinite()) return ExtRat::infinity();
  if (ExtRat(prev) < alpha)
    throw domain_error("out_of_range", "skewness beyond the profile");
  return ExtRat(acc);
}

Rat SkewnessProfile::skewness_at_thinness(const Rat& a) const {
  Rat acc(2), prev(1);
  if (a < Rat(2)) throw domain_error("out_of_range", "thinness starts at 2");
  if (a == Rat(2)) return Rat(1);
  for (auto& lv : levels) {
    if (lv.alpha_end.is_infinite())
      return prev + (a - acc) / Rat(lv.mult);
    Rat seg = Rat(lv.mult) * (lv.alpha_end.finite() - prev);
    if (acc + seg >= a) return prev + (a - acc) / Rat(lv.mult);
    acc += seg;
    prev = lv.alpha_end.finite();
  }
  throw domain_error("out_of_range", "thinness beyond the profile");
}

long SkewnessProfile::mult_at(const Rat& alpha) const {
  if (alpha <= Rat(1)) return 1;
  for (auto& lv : levels) {
    if (ExtRat(alpha) <= lv.alpha_end) return lv.mult;
  }
  throw domain_error("out_of_range", "skewness beyond the profile");
}

}  // namespace valtree
