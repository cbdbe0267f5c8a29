#ifndef VALTREE_TREEMEASURE_HPP
#define VALTREE_TREEMEASURE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valtree/dualgraph.hpp"
#include "valtree/skp.hpp"

namespace valtree {

struct ComplexRat {
  Rat re, im;
  ComplexRat() = default;
  ComplexRat(Rat r) : re(std::move(r)) {}
  ComplexRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  ComplexRat conj() const { return {re, -im}; }
  ComplexRat operator+(const ComplexRat& o) const { return {re + o.re, im + o.im}; }
  ComplexRat operator-(const ComplexRat& o) const { return {re - o.re, im - o.im}; }
  ComplexRat operator*(const ComplexRat& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  bool operator==(const ComplexRat& o) const { return re == o.re && im == o.im; }
  std::string str() const;
};

// Finite rooted tree of valuations spanned by declared branch paths: the root
// is the multiplicity valuation, nodes sit at prescribed skewness values along
// branch paths, edges carry the segment multiplicity.
class FiniteTree {
 public:
  struct Node {
    Skp val;
    ExtRat alpha;
    int parent = -1;
    long seg_mult = 1;          // multiplicity on (parent, this]
    int path = -1;              // declared-branch path the node lies on
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::vector<int>>& children() const { return children_; }
  int root() const { return 0; }

  // Index of the node for a given valuation, if present.
  std::optional<int> find(const Skp& s) const;

  int add_node(Node n);       // returns the new index
  void rebuild_children();    // recompute child lists from parents

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> children_;
};

// A declared branch: a named parameterized curve or a coordinate axis.
struct DeclaredBranch {
  std::string name;
  bool is_axis = false;
  bool axis_is_x = false;  // {x = 0} if true, {y = 0} handled as a parameterization
  std::optional<BranchParam> param;

  long mult() const;
  Skp curve_skp() const;                 // curve valuation (may be a deep truncation)
  SkewnessProfile path_profile() const;  // multiplicity profile along [v_m, curve]
};

DeclaredBranch make_branch(const std::string& name, const BranchParam& p);
DeclaredBranch axis_branch(bool x_axis);  // names "x" / "y"

// Ideal given by generators that are formal products of declared branches.
struct IdealSpec {
  struct Factor {
    int branch;  // index into branches
    long exp;
  };
  using Generator = std::vector<Factor>;

  std::vector<DeclaredBranch> branches;
  std::vector<Generator> generators;

  void validate() const;
  long min_multiplicity() const;  // m(I) = min over generators of m(gen)
  IdealSpec product(const IdealSpec& other) const;  // same branch list required
  IdealSpec power(long k) const;

  static IdealSpec monomial(long a_exp_x, long b_exp_y);  // <x^a, y^b> etc. helpers
};

// Piecewise-affine function on a finite tree: values at nodes, affine in the
// skewness parameterization on edges; ends at infinite skewness carry the
// incoming slope instead of a value.
struct TreePotential {
  FiniteTree tree;
  std::vector<ExtRat> value;  // per node; infinite exactly at curve ends with positive slope
  std::vector<Rat> end_slope;  // per node: slope of the final segment into an infinite end

  Rat slope_into(int node) const;  // slope on (parent(node), node]
  struct PositivityReport {
    bool ok;
    std::string violation;
  };
  PositivityReport check_positive() const;  // the three positive-potential conditions
};

struct Atom {
  Skp node;
  ComplexRat mass;
  // Marks a mass at the end of a branch (curve valuation); for raw-pair
  // branches the stored SKP is a deep truncated stand-in for that end.
  bool curve = false;
};

// Finitely supported measure; atoms kept sorted by the canonical SKP order.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool operator==(const AtomicMeasure& o) const;
  AtomicMeasure operator+(const AtomicMeasure& o) const;
  AtomicMeasure operator-(const AtomicMeasure& o) const;
  AtomicMeasure scaled(const ComplexRat& c) const;
  ComplexRat mass() const;
  bool is_real() const;
  std::string str() const;

 private:
  void normalize();
  std::vector<Atom> atoms_;
};

// Span tree of the declared branches with optional extra kinks (branch index,
// skewness) marked as nodes.
FiniteTree span_tree(const std::vector<DeclaredBranch>& branches,
                     const std::vector<std::pair<int, Rat>>& kinks = {});

// Tree transform g_I(v) = min over generators of v(gen) on the span tree of
// the declared branches, with kink nodes wherever the minimum switches.
TreePotential tree_transform(const IdealSpec& ideal);

// Potential of a single generator (no minimum): v -> v(gen).
TreePotential generator_potential(const IdealSpec& ideal, const IdealSpec::Generator& gen);

// Atomic Laplacian of a piecewise-affine potential.
AtomicMeasure laplacian(const TreePotential& g);

// g_rho(tau) = sum of mass(sigma) * alpha(sigma ^ tau), on the span of the atoms.
TreePotential potential_of_measure(const AtomicMeasure& rho);

struct ZariskiFactor {
  Skp valuation;
  bool divisorial;  // else a curve atom
  long unit_mass;   // b (generic multiplicity) or m (curve multiplicity)
  long exponent;    // n_i
};

struct ZariskiFactorization {
  AtomicMeasure measure;
  std::vector<ZariskiFactor> factors;
};

ZariskiFactorization zariski_factor(const IdealSpec& ideal);

// phi given as a product of declared branches.
bool integral_closure_member(const IdealSpec::Generator& phi, const IdealSpec& ideal);

struct InnerProduct {
  ExtRat re;
  Rat im;
  bool is_real() const { return im.is_zero(); }
};

InnerProduct inner_product(const AtomicMeasure& a, const AtomicMeasure& b);

// Mixed multiplicity e(I, J) of primary ideals; rejects curve atoms.
Rat mixed_multiplicity(const IdealSpec& i, const IdealSpec& j);

// Cohomology class over the orthogonal basis indexed by creation order, with
// self-pairing -1.
struct CohomClass {
  std::map<int, ComplexRat> coords;
  CohomClass operator+(const CohomClass& o) const;
  ComplexRat pair(const CohomClass& o) const;  // omega . omega' = -sum c conj(c')
};

CohomClass class_of_vertex(const DualGraph& g, int v);
AtomicMeasure class_measure(const DualGraph& g, int v);

// Class omega with measure b(v) * v for a divisorial valuation realized at a
// vertex of g, via the creation recursion.
CohomClass class_of_divisorial(const Skp& s, const DualGraph& g);

}  // namespace valtree

#endif
