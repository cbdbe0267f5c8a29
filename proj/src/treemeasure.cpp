#include "valtree/treemeasure.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace valtree {

std::string ComplexRat::str() const {
  if (im.is_zero()) return re.str();
  return "(" + re.str() + (im.sign() >= 0 ? "+" : "") + im.str() + "i)";
}

// ---------------------------- declared branches ------------------------------

long DeclaredBranch::mult() const {
  if (is_axis) return 1;
  return param->n();
}

Skp DeclaredBranch::curve_skp() const {
  if (is_axis) return Skp::axis_curve(axis_is_x);
  return skp_of_branch(*param, 64).skp;
}

SkewnessProfile DeclaredBranch::path_profile() const { return profile(curve_skp()); }

DeclaredBranch make_branch(const std::string& name, const BranchParam& p) {
  DeclaredBranch b;
  b.name = name;
  b.param = p;
  return b;
}

DeclaredBranch axis_branch(bool x_axis) {
  DeclaredBranch b;
  b.name = x_axis ? "x" : "y";
  b.is_axis = true;
  b.axis_is_x = x_axis;
  return b;
}

namespace {

// Pairwise wedge skewness of two declared branches (infinite iff same curve).
ExtRat wedge_alpha(const DeclaredBranch& a, const DeclaredBranch& b) {
  if (a.is_axis && b.is_axis) {
    if (a.axis_is_x == b.axis_is_x) return ExtRat::infinity();
    return ExtRat(Rat(1));
  }
  if (a.is_axis || b.is_axis) {
    const DeclaredBranch& axis = a.is_axis ? a : b;
    const DeclaredBranch& crv = a.is_axis ? b : a;
    ExtRat inter;
    if (axis.axis_is_x) {
      auto o = crv.param->xt().ord();
      inter = o ? ExtRat(Rat(*o)) : ExtRat::infinity();
    } else {
      auto o = crv.param->yt().ord();
      inter = o ? ExtRat(Rat(*o)) : ExtRat::infinity();
    }
    if (inter.is_infinite()) return ExtRat::infinity();
    return ExtRat(inter.finite() / Rat(crv.param->n()));
  }
  ExtRat inter = intersection_number_general(*a.param, *b.param);
  if (inter.is_infinite()) return ExtRat::infinity();
  return ExtRat(inter.finite() / (Rat(a.param->n()) * Rat(b.param->n())));
}

// SKP of a branch deep enough to truncate at every needed finite skewness.
Skp deep_skp(const DeclaredBranch& b, const Rat& alpha_needed) {
  if (b.is_axis) return Skp::axis_curve(b.axis_is_x);
  for (int depth = 16; depth <= 1024; depth *= 2) {
    BranchSkp bs = skp_of_branch(*b.param, depth);
    if (bs.reached_curve) return bs.skp;
    SkewnessProfile prof = profile(bs.skp);
    ExtRat end = prof.levels.back().alpha_end;
    if (end.is_infinite() || end.finite() >= alpha_needed) return bs.skp;
  }
  throw domain_error("truncation_insufficient", "branch SKP depth cap reached");
}

}  // namespace

// -------------------------------- ideal spec ---------------------------------

void IdealSpec::validate() const {
  if (generators.empty())
    throw domain_error("invalid_input", "an ideal needs at least one generator");
  for (auto& g : generators)
    for (auto& f : g) {
      if (f.branch < 0 || f.branch >= static_cast<int>(branches.size()))
        throw domain_error("invalid_input", "generator references an undeclared branch");
      if (f.exp < 1) throw domain_error("invalid_input", "exponents must be positive");
    }
  for (size_t i = 0; i < branches.size(); ++i)
    for (size_t j = i + 1; j < branches.size(); ++j)
      if (wedge_alpha(branches[i], branches[j]).is_infinite())
        throw domain_error("invalid_input", "declared branches must be distinct curves");
}

long IdealSpec::min_multiplicity() const {
  long best = -1;
  for (auto& g : generators) {
    long m = 0;
    for (auto& f : g) m += f.exp * branches[f.branch].mult();
    if (best < 0 || m < best) best = m;
  }
  return best;
}

IdealSpec IdealSpec::product(const IdealSpec& other) const {
  if (branches.size() != other.branches.size())
    throw domain_error("invalid_input", "ideal product needs a common branch list");
  for (size_t i = 0; i < branches.size(); ++i)
    if (branches[i].name != other.branches[i].name)
      throw domain_error("invalid_input", "ideal product needs a common branch list");
  IdealSpec out;
  out.branches = branches;
  for (auto& g1 : generators)
    for (auto& g2 : other.generators) {
      std::map<int, long> exps;
      for (auto& f : g1) exps[f.branch] += f.exp;
      for (auto& f : g2) exps[f.branch] += f.exp;
      Generator g;
      for (auto& [b, e] : exps) g.push_back({b, e});
      out.generators.push_back(std::move(g));
    }
  return out;
}

IdealSpec IdealSpec::power(long k) const {
  if (k < 1) throw domain_error("invalid_input", "ideal powers start at 1");
  IdealSpec out = *this;
  for (long i = 1; i < k; ++i) out = out.product(*this);
  return out;
}

IdealSpec IdealSpec::monomial(long a, long b) {
  IdealSpec out;
  out.branches.push_back(axis_branch(true));
  out.branches.push_back(axis_branch(false));
  out.generators.push_back({{0, a}});
  out.generators.push_back({{1, b}});
  return out;
}

// ------------------------------ atomic measures -------------------------------

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  normalize();
}

void AtomicMeasure::normalize() {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) {
    if (a.curve != b.curve) return !a.curve;
    return Skp::less(a.node, b.node);
  });
  std::vector<Atom> merged;
  for (auto& a : atoms_) {
    if (!merged.empty() && merged.back().curve == a.curve && merged.back().node == a.node)
      merged.back().mass = merged.back().mass + a.mass;
    else
      merged.push_back(a);
  }
  atoms_.clear();
  for (auto& a : merged)
    if (!a.mass.is_zero()) atoms_.push_back(std::move(a));
}

bool AtomicMeasure::operator==(const AtomicMeasure& o) const {
  if (atoms_.size() != o.atoms_.size()) return false;
  for (size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].curve != o.atoms_[i].curve) return false;
    if (!(atoms_[i].node == o.atoms_[i].node)) return false;
    if (!(atoms_[i].mass == o.atoms_[i].mass)) return false;
  }
  return true;
}

AtomicMeasure AtomicMeasure::operator+(const AtomicMeasure& o) const {
  std::vector<Atom> all = atoms_;
  all.insert(all.end(), o.atoms_.begin(), o.atoms_.end());
  return AtomicMeasure(std::move(all));
}

AtomicMeasure AtomicMeasure::operator-(const AtomicMeasure& o) const {
  std::vector<Atom> all = atoms_;
  for (auto a : o.atoms_) {
    a.mass = ComplexRat(Rat(0)) - a.mass;
    all.push_back(std::move(a));
  }
  return AtomicMeasure(std::move(all));
}

AtomicMeasure AtomicMeasure::scaled(const ComplexRat& c) const {
  std::vector<Atom> all = atoms_;
  for (auto& a : all) a.mass = a.mass * c;
  return AtomicMeasure(std::move(all));
}

ComplexRat AtomicMeasure::mass() const {
  ComplexRat m;
  for (auto& a : atoms_) m = m + a.mass;
  return m;
}

bool AtomicMeasure::is_real() const {
  for (auto& a : atoms_)
    if (!a.mass.is_real()) return false;
  return true;
}

std::string AtomicMeasure::str() const {
  if (atoms_.empty()) return "0";
  std::string out;
  for (auto& a : atoms_) {
    if (!out.empty()) out += " + ";
    out += a.mass.str() + " * [" + a.node.str() + "]";
  }
  return out;
}

// -------------------------------- span trees ---------------------------------

std::optional<int> FiniteTree::find(const Skp& s) const {
  for (size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].val == s) return static_cast<int>(i);
  return std::nullopt;
}

int FiniteTree::add_node(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void FiniteTree::rebuild_children() {
  children_.assign(nodes_.size(), {});
  for (size_t v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].parent >= 0) children_[nodes_[v].parent].push_back(static_cast<int>(v));
}

class SpanBuilder {
 public:
  static FiniteTree build(const std::vector<DeclaredBranch>& branches,
                          const std::vector<std::pair<int, Rat>>& kinks,
                          std::vector<std::vector<ExtRat>>* wedge_out);
};

FiniteTree SpanBuilder::build(const std::vector<DeclaredBranch>& branches,
                              const std::vector<std::pair<int, Rat>>& kinks,
                              std::vector<std::vector<ExtRat>>* wedge_out) {
  int r = static_cast<int>(branches.size());
  if (r == 0) throw domain_error("invalid_input", "span tree needs at least one branch");

  std::vector<std::vector<ExtRat>> W(r, std::vector<ExtRat>(r, ExtRat::infinity()));
  Rat max_finite(1);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      W[i][j] = W[j][i] = wedge_alpha(branches[i], branches[j]);
      if (W[i][j].is_infinite())
        throw domain_error("invalid_input", "declared branches must be distinct curves");
      max_finite = std::max(max_finite, W[i][j].finite());
    }
  for (auto& [bi, al] : kinks) {
    if (bi < 0 || bi >= r) throw domain_error("invalid_input", "kink on unknown branch");
    max_finite = std::max(max_finite, al);
  }
  if (wedge_out) *wedge_out = W;

  // per-branch finite params above the root, closed under shared segments
  std::vector<std::vector<Rat>> params(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (i != j) params[i].push_back(W[i][j].finite());
  for (auto& [bi, al] : kinks)
    if (al > Rat(1)) params[bi].push_back(al);
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (i == j) continue;
        for (auto& p : params[j])
          if (ExtRat(p) <= W[i][j]) params[i].push_back(p);
      }
  for (int i = 0; i < r; ++i) {
    std::sort(params[i].begin(), params[i].end());
    params[i].erase(std::unique(params[i].begin(), params[i].end()), params[i].end());
  }

  std::vector<Skp> rails(r);
  for (int i = 0; i < r; ++i) rails[i] = deep_skp(branches[i], max_finite + Rat(1));
  std::vector<SkewnessProfile> profs;
  for (int i = 0; i < r; ++i) profs.push_back(profile(rails[i]));

  auto rep_of = [&](int i, const Rat& t) {
    int rep = i;
    for (int j = 0; j < r; ++j)
      if (j != i && ExtRat(t) <= W[i][j]) rep = std::min(rep, j);
    return rep;
  };

  FiniteTree tree;
  tree.add_node({Skp::multiplicity_valuation(), ExtRat(Rat(1)), -1, 1, 0});
  std::map<std::pair<int, std::string>, int> index;

  for (int i = 0; i < r; ++i) {
    int prev = 0;  // root
    for (auto& t : params[i]) {
      if (t == Rat(1)) continue;
      int rep = rep_of(i, t);
      auto key = std::make_pair(rep, t.str());
      auto it = index.find(key);
      int id;
      if (it != index.end()) {
        id = it->second;
      } else {
        FiniteTree::Node n;
        n.val = truncate_at_skewness(rails[rep], t);
        n.alpha = ExtRat(t);
        n.parent = prev;
        n.seg_mult = profs[rep].mult_at(t);
        n.path = rep;
        id = tree.add_node(std::move(n));
        index.emplace(key, id);
      }
      prev = id;
    }
    // the branch end at infinite skewness
    FiniteTree::Node end;
    end.val = rails[i];
    end.alpha = ExtRat::infinity();
    end.parent = prev;
    end.seg_mult = branches[i].mult();
    end.path = i;
    tree.add_node(std::move(end));
  }

  tree.rebuild_children();
  return tree;
}

FiniteTree span_tree(const std::vector<DeclaredBranch>& branches,
                     const std::vector<std::pair<int, Rat>>& kinks) {
  return SpanBuilder::build(branches, kinks, nullptr);
}

// ------------------------------ tree transforms ------------------------------

namespace {

struct GenData {
  std::vector<ExtRat> value;  // per node; infinite at some ends
  std::vector<Rat> slope;     // slope on the incoming segment of each node
};

// value of a generator at a node: sum of e_f m_f min(alpha, W*) with
// W*[path][f] infinite when f is the node's own path.
GenData generator_data(const FiniteTree& tree, const IdealSpec& ideal,
                       const IdealSpec::Generator& gen,
                       const std::vector<std::vector<ExtRat>>& W) {
  GenData out;
  size_t nn = tree.nodes().size();
  out.value.assign(nn, ExtRat(Rat(0)));
  out.slope.assign(nn, Rat(0));
  for (size_t v = 0; v < nn; ++v) {
    const auto& node = tree.nodes()[v];
    ExtRat acc(Rat(0));
    Rat slope(0);
    for (auto& f : gen) {
      Rat weight = Rat(f.exp) * Rat(ideal.branches[f.branch].mult());
      ExtRat cap = (node.path == f.branch) ? ExtRat::infinity() : W[node.path][f.branch];
      ExtRat contrib = min(node.alpha, cap);
      if (contrib.is_infinite()) {
        acc = ExtRat::infinity();
        slope += weight;
      } else {
        acc = acc + ExtRat(contrib.finite() * weight);
        if (node.alpha <= cap) slope += weight;  // still rising at this node
      }
    }
    out.value[v] = acc;
    out.slope[v] = slope;
  }
  return out;
}

}  // namespace

TreePotential generator_potential(const IdealSpec& ideal, const IdealSpec::Generator& gen) {
  std::vector<std::vector<ExtRat>> W;
  FiniteTree tree = SpanBuilder::build(ideal.branches, {}, &W);
  GenData gd = generator_data(tree, ideal, gen, W);
  TreePotential out;
  out.tree = std::move(tree);
  out.value = std::move(gd.value);
  out.end_slope.assign(out.value.size(), Rat(0));
  for (size_t v = 0; v < out.value.size(); ++v)
    if (out.tree.nodes()[v].alpha.is_infinite()) out.end_slope[v] = gd.slope[v];
  return out;
}

TreePotential tree_transform(const IdealSpec& ideal) {
  ideal.validate();
  std::vector<std::vector<ExtRat>> W;
  FiniteTree base = SpanBuilder::build(ideal.branches, {}, &W);

  // locate crossings of generator pieces inside edges and add them as kinks
  std::vector<GenData> gens;
  for (auto& g : ideal.generators) gens.push_back(generator_data(base, ideal, g, W));
  std::vector<std::pair<int, Rat>> kinks;
  for (size_t v = 1; v < base.nodes().size(); ++v) {
    const auto& node = base.nodes()[v];
    const auto& parent = base.nodes()[node.parent];
    Rat a_lo = parent.alpha.finite();
    for (size_t g1 = 0; g1 < gens.size(); ++g1)
      for (size_t g2 = g1 + 1; g2 < gens.size(); ++g2) {
        const Rat& s1 = gens[g1].slope[v];
        const Rat& s2 = gens[g2].slope[v];
        if (s1 == s2) continue;
        Rat v1 = gens[g1].value[node.parent].finite();
        Rat v2 = gens[g2].value[node.parent].finite();
        if (v1 == v2) continue;
        Rat cross = a_lo + (v2 - v1) / (s1 - s2);
        bool inside = cross > a_lo && (node.alpha.is_infinite() || cross < node.alpha.finite());
        if (inside) kinks.emplace_back(node.path, cross);
      }
  }

  FiniteTree tree = SpanBuilder::build(ideal.branches, kinks, &W);
  gens.clear();
  for (auto& g : ideal.generators) gens.push_back(generator_data(tree, ideal, g, W));

  TreePotential out;
  size_t nn = tree.nodes().size();
  out.value.assign(nn, ExtRat(Rat(0)));
  out.end_slope.assign(nn, Rat(0));
  for (size_t v = 0; v < nn; ++v) {
    bool is_end = tree.nodes()[v].alpha.is_infinite();
    std::optional<ExtRat> best;
    std::optional<Rat> best_slope;
    for (auto& gd : gens) {
      if (!is_end) {
        if (!best || gd.value[v] < *best) best = gd.value[v];
      } else {
        // near infinity the smaller slope wins; ties by the value at the parent
        Rat s = gd.slope[v];
        Rat at_parent = gd.value[tree.nodes()[v].parent].finite();
        if (!best_slope || s < *best_slope ||
            (s == *best_slope && ExtRat(at_parent) < *best)) {
          best_slope = s;
          best = ExtRat(at_parent);
        }
      }
    }
    if (!is_end) {
      out.value[v] = *best;
    } else {
      out.end_slope[v] = *best_slope;
      const auto& pv = out.value[tree.nodes()[v].parent];
      out.value[v] = best_slope->is_zero() ? pv : ExtRat::infinity();
    }
  }
  out.tree = std::move(tree);
  return out;
}

Rat TreePotential::slope_into(int node) const {
  const auto& n = tree.nodes()[node];
  if (n.parent < 0) throw domain_error("invalid_input", "root has no incoming segment");
  if (n.alpha.is_infinite()) return end_slope[node];
  Rat da = n.alpha.finite() - tree.nodes()[n.parent].alpha.finite();
  return (value[node].finite() - value[n.parent].finite()) / da;
}

TreePotential::PositivityReport TreePotential::check_positive() const {
  const auto& nodes = tree.nodes();
  for (size_t v = 0; v < nodes.size(); ++v) {
    if (value[v].is_finite() && value[v].finite() < Rat(0))
      return {false, "negative value at a node"};
    if (nodes[v].parent >= 0) {
      Rat s = slope_into(static_cast<int>(v));
      if (s < Rat(0)) return {false, "decreasing along a segment"};
      if (nodes[nodes[v].parent].parent >= 0) {
        Rat sp = slope_into(nodes[v].parent);
        if (s > sp) return {false, "convex corner inside a path"};
      }
    }
  }
  // atom positivity covers the two Laplacian-sum conditions
  const auto& ch = tree.children();
  for (size_t v = 0; v < nodes.size(); ++v) {
    Rat out_slopes(0);
    for (int c : ch[v]) out_slopes += slope_into(c);
    if (nodes[v].parent < 0) {
      if (ExtRat(out_slopes) > value[v]) return {false, "root condition fails"};
    } else if (!nodes[v].alpha.is_infinite()) {
      if (out_slopes > slope_into(static_cast<int>(v)))
        return {false, "negative atom at an interior node"};
    }
  }
  return {true, ""};
}

// -------------------------------- Laplacian ----------------------------------

AtomicMeasure laplacian(const TreePotential& g) {
  const auto& nodes = g.tree.nodes();
  const auto& ch = g.tree.children();
  std::vector<Atom> atoms;
  for (size_t v = 0; v < nodes.size(); ++v) {
    Rat out_slopes(0);
    for (int c : ch[v]) out_slopes += g.slope_into(c);
    Rat mass;
    if (nodes[v].parent < 0)
      mass = g.value[v].finite() - out_slopes;
    else
      mass = g.slope_into(static_cast<int>(v)) - out_slopes;
    if (!mass.is_zero())
      atoms.push_back({nodes[v].val, ComplexRat(mass), nodes[v].alpha.is_infinite()});
  }
  return AtomicMeasure(std::move(atoms));
}

// --------------------------- potential of a measure ---------------------------

namespace {

ExtRat atom_wedge_alpha(const Atom& a, const Atom& b) {
  if (a.curve && b.curve && a.node == b.node) return ExtRat::infinity();
  return invariants(wedge(a.node, b.node)).alpha;
}

}  // namespace

TreePotential potential_of_measure(const AtomicMeasure& rho) {
  if (!rho.is_real())
    throw domain_error("unsupported", "potentials are taken for real measures");
  // span of the atom valuations: atoms, pairwise wedges, and the root
  std::vector<Skp> vals{Skp::multiplicity_valuation()};
  std::vector<bool> curve_flag{false};
  auto add = [&](const Skp& s, bool curve) {
    for (size_t i = 0; i < vals.size(); ++i)
      if (vals[i] == s && curve_flag[i] == curve) return;
    vals.push_back(s);
    curve_flag.push_back(curve);
  };
  for (auto& a : rho.atoms()) add(a.node, a.curve);
  size_t base = vals.size();
  for (size_t i = 1; i < base; ++i)
    for (size_t j = i + 1; j < base; ++j) add(wedge(vals[i], vals[j]), false);

  // order by skewness and pick parents as the maximal strictly-smaller node
  std::vector<ExtRat> alphas;
  for (size_t i = 0; i < vals.size(); ++i) {
    ExtRat al = invariants(vals[i]).alpha;
    if (curve_flag[i]) al = ExtRat::infinity();
    alphas.push_back(al);
  }
  std::vector<int> order(vals.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (alphas[a] != alphas[b]) return alphas[a] < alphas[b];
    return Skp::less(vals[a], vals[b]);
  });

  FiniteTree tree;
  for (int idx : order) {
    FiniteTree::Node n;
    n.val = vals[idx];
    n.alpha = alphas[idx];
    n.parent = -1;
    n.path = -1;
    if (!tree.nodes().empty()) {
      // parent: the deepest existing node lying below this one
      int best = 0;
      for (size_t t = 0; t < tree.nodes().size(); ++t) {
        const Skp& cand = tree.nodes()[t].val;
        Order o = compare(cand, vals[idx]);
        bool below = (o == Order::Less);
        // a curve end whose stand-in SKP equals an interior node sits above it
        if (o == Order::Equal && curve_flag[idx] && tree.nodes()[t].alpha.is_finite())
          below = true;
        if (below && tree.nodes()[t].alpha >= tree.nodes()[best].alpha) best = static_cast<int>(t);
      }
      n.parent = best;
    }
    n.seg_mult = invariants(vals[idx]).mult;
    tree.add_node(std::move(n));
  }
  tree.rebuild_children();

  TreePotential out;
  out.tree = tree;
  size_t nn = tree.nodes().size();
  out.value.assign(nn, ExtRat(Rat(0)));
  out.end_slope.assign(nn, Rat(0));
  for (size_t v = 0; v < nn; ++v) {
    const auto& node = tree.nodes()[v];
    Atom here{node.val, ComplexRat(Rat(0)), node.alpha.is_infinite()};
    if (node.alpha.is_infinite()) {
      // slope into the end: total mass sitting at the end itself
      Rat s(0);
      ExtRat val(Rat(0));
      bool inf = false;
      for (auto& a : rho.atoms()) {
        ExtRat w = atom_wedge_alpha(a, here);
        if (w.is_infinite()) {
          s += a.mass.re;
          inf = true;
        } else {
          val = val + ExtRat(w.finite() * a.mass.re);
        }
      }
      out.end_slope[v] = s;
      out.value[v] = inf && !s.is_zero() ? ExtRat::infinity() : val;
    } else {
      ExtRat acc(Rat(0));
      for (auto& a : rho.atoms()) {
        ExtRat w = atom_wedge_alpha(a, here);
        acc = acc + ExtRat(min(w, node.alpha).finite() * a.mass.re);
      }
      out.value[v] = acc;
    }
  }
  return out;
}

// ----------------------------- Zariski factoring ------------------------------

ZariskiFactorization zariski_factor(const IdealSpec& ideal) {
  TreePotential g = tree_transform(ideal);
  AtomicMeasure rho = laplacian(g);
  ZariskiFactorization out;
  out.measure = rho;
  for (auto& a : rho.atoms()) {
    InvariantReport rep = invariants(a.node);
    ZariskiFactor f;
    f.valuation = a.node;
    f.divisorial = !a.curve;
    f.unit_mass = a.curve ? rep.mult : rep.generic_mult.value();
    if (!a.mass.is_real() || !a.mass.re.is_integer())
      throw domain_error("non_integral", "atom mass is not an integer");
    Rat q = a.mass.re / Rat(f.unit_mass);
    if (!q.is_integer() || q.sign() <= 0)
      throw domain_error("non_integral",
                         "atom mass is not a positive multiple of the unit mass");
    f.exponent = static_cast<long>(q.num());
    out.factors.push_back(std::move(f));
  }
  return out;
}

// ------------------------------ integral closure ------------------------------

bool integral_closure_member(const IdealSpec::Generator& phi, const IdealSpec& ideal) {
  TreePotential gI = tree_transform(ideal);
  std::vector<std::vector<ExtRat>> W;
  FiniteTree tree = SpanBuilder::build(ideal.branches, {}, &W);
  (void)tree;

  // evaluate g_phi on the same tree as g_I
  auto phi_value = [&](const FiniteTree::Node& node) -> ExtRat {
    ExtRat acc(Rat(0));
    for (auto& f : phi) {
      Rat weight = Rat(f.exp) * Rat(ideal.branches[f.branch].mult());
      ExtRat cap = (node.path == f.branch) ? ExtRat::infinity() : W[node.path][f.branch];
      ExtRat contrib = min(node.alpha, cap);
      if (contrib.is_infinite()) return ExtRat::infinity();
      acc = acc + ExtRat(contrib.finite() * weight);
    }
    return acc;
  };
  auto phi_end_slope = [&](const FiniteTree::Node& node) -> Rat {
    Rat s(0);
    for (auto& f : phi)
      if (node.path == f.branch) s += Rat(f.exp) * Rat(ideal.branches[f.branch].mult());
    return s;
  };

  const auto& nodes = gI.tree.nodes();
  for (size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].alpha.is_infinite()) {
      if (phi_end_slope(nodes[v]) < gI.end_slope[v]) return false;
      // equal slopes: compare the finite offsets at the parent
      if (phi_end_slope(nodes[v]) == gI.end_slope[v]) {
        ExtRat pv = phi_value(nodes[nodes[v].parent]);
        if (pv < gI.value[nodes[v].parent]) return false;
      }
    } else {
      if (phi_value(nodes[v]) < gI.value[v]) return false;
    }
  }
  return true;
}

// -------------------------------- inner product -------------------------------

InnerProduct inner_product(const AtomicMeasure& x, const AtomicMeasure& y) {
  InnerProduct out{ExtRat(Rat(0)), Rat(0)};
  bool infinite = false;
  for (auto& a : x.atoms())
    for (auto& b : y.atoms()) {
      ExtRat w = atom_wedge_alpha(a, b);
      ComplexRat prod = a.mass * b.mass.conj();
      if (w.is_infinite()) {
        if (prod.is_zero()) continue;
        if (!prod.is_real() || prod.re.sign() < 0)
          throw domain_error("indeterminate",
                             "infinite inner product with a non-positive coefficient");
        infinite = true;
        continue;
      }
      out.re = out.re + ExtRat(w.finite() * prod.re);
      out.im += w.finite() * prod.im;
    }
  if (infinite) {
    if (!out.im.is_zero())
      throw domain_error("indeterminate", "infinite inner product with an imaginary part");
    out.re = ExtRat::infinity();
  }
  return out;
}

Rat mixed_multiplicity(const IdealSpec& i, const IdealSpec& j) {
  ZariskiFactorization zi = zariski_factor(i);
  ZariskiFactorization zj = zariski_factor(j);
  for (auto& f : zi.factors)
    if (!f.divisorial)
      throw domain_error("not_primary", "mixed multiplicities need primary ideals");
  for (auto& f : zj.factors)
    if (!f.divisorial)
      throw domain_error("not_primary", "mixed multiplicities need primary ideals");
  InnerProduct p = inner_product(zi.measure, zj.measure);
  return p.re.finite();
}

// ------------------------- cohomology of the blowup limit ---------------------

CohomClass CohomClass::operator+(const CohomClass& o) const {
  CohomClass out = *this;
  for (auto& [k, c] : o.coords) {
    auto it = out.coords.find(k);
    if (it == out.coords.end())
      out.coords[k] = c;
    else {
      it->second = it->second + c;
      if (it->second.is_zero()) out.coords.erase(it);
    }
  }
  return out;
}

ComplexRat CohomClass::pair(const CohomClass& o) const {
  ComplexRat acc;
  for (auto& [k, c] : coords) {
    auto it = o.coords.find(k);
    if (it != o.coords.end()) acc = acc + c * it->second.conj();
  }
  return ComplexRat(Rat(0)) - acc;  // each basis class has self-intersection -1
}

CohomClass class_of_vertex(const DualGraph& g, int v) {
  if (v < 0 || v >= static_cast<int>(g.vertex_count()))
    throw domain_error("invalid_input", "no such vertex");
  CohomClass c;
  c.coords[v] = ComplexRat(Rat(1));
  return c;
}

AtomicMeasure class_measure(const DualGraph& g, int v) {
  const auto& vert = g.verts()[v];
  std::vector<Atom> atoms;
  auto add = [&](int vid, const Rat& coeff) {
    Skp s = vertex_to_skp(g, vid);
    atoms.push_back({s, ComplexRat(coeff * Rat(g.verts()[vid].w.b)), false});
  };
  switch (vert.kind) {
    case PointKind::Origin:
      add(v, Rat(1));  // b = 1: the measure is the multiplicity valuation
      break;
    case PointKind::Free:
      add(v, Rat(1));
      add(vert.parent1, Rat(-1));
      break;
    case PointKind::Satellite:
      add(v, Rat(1));
      add(vert.parent1, Rat(-1));
      add(vert.parent2, Rat(-1));
      break;
  }
  return AtomicMeasure(std::move(atoms));
}

CohomClass class_of_divisorial(const Skp& s, const DualGraph& g) {
  int found = -1;
  for (size_t v = 0; v < g.vertex_count(); ++v)
    if (vertex_to_skp(g, static_cast<int>(v)) == s) {
      found = static_cast<int>(v);
      break;
    }
  if (found < 0)
    throw domain_error("invalid_input", "valuation is not realized as a vertex of the graph");
  std::function<CohomClass(int)> build = [&](int v) -> CohomClass {
    const auto& vert = g.verts()[v];
    CohomClass c = class_of_vertex(g, v);
    if (vert.kind == PointKind::Free) c = c + build(vert.parent1);
    if (vert.kind == PointKind::Satellite) c = c + build(vert.parent1) + build(vert.parent2);
    return c;
  };
  return build(found);
}

}  // namespace valtree
