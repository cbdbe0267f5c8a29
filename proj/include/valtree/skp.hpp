#ifndef VALTREE_SKP_HPP
#define VALTREE_SKP_HPP

#include <optional>
#include <string>
#include <vector>

#include "valtree/branch.hpp"
#include "valtree/poly.hpp"

namespace valtree {

// Finite sequence of key polynomials [(U_0,...,U_k); (b_0,...,b_k)] in the
// working coordinates (keys[0] = x, keys[1] = y). `swapped` records that the
// input coordinates were exchanged so that b_1 >= b_0 = 1 holds. Only the
// final value may be infinite (curve valuations).
class Skp {
 public:
  Skp() = default;
  Skp(std::vector<BiPoly> keys, std::vector<ExtRat> values, bool swapped = false);

  static Skp multiplicity_valuation();           // [(x,y);(1,1)]
  static Skp monomial(const ExtRat& beta1, bool swapped = false);
  static Skp axis_curve(bool x_axis);            // curve valuation of {x=0} or {y=0}

  const std::vector<BiPoly>& keys() const { return keys_; }
  const std::vector<ExtRat>& values() const { return values_; }
  bool swapped() const { return swapped_; }
  int length() const { return static_cast<int>(keys_.size()) - 1; }

  bool inf_sing_truncated = false;  // finite stand-in for an infinite SKP

  // Derived structure, available after finalize()/validation:
  long d(int j) const;                      // deg_y of key j (d(0) = 0 by convention)
  const Int& n(int j) const;                // minimal multiplier at level j
  const std::vector<Int>& m_row(int j) const;
  const Rat& theta(int j) const;            // defined for 1 <= j < length
  bool has_final_n() const { return final_n_.has_value(); }

  bool is_curve_type() const { return values_.back().is_infinite(); }
  bool is_multiplicity_valuation() const;

  bool operator==(const Skp& o) const;
  static bool less(const Skp& a, const Skp& b);  // deterministic total order

  std::string str() const;

 private:
  friend struct SkpBuilder;
  void finalize();  // computes n, m, theta, d; throws domain_error on violation

  std::vector<BiPoly> keys_;
  std::vector<ExtRat> values_;
  bool swapped_ = false;

  std::vector<long> deg_;                  // deg_[j] = d_j
  std::vector<Int> n_;                     // n_[j] for 1 <= j < len, n_[0] unused
  std::vector<std::vector<Int>> m_;        // m_[j][l]
  std::vector<Rat> theta_;                 // theta_[j] for 1 <= j < length
  std::optional<Int> final_n_;             // n_k when the final value is rational
};

struct Violation {
  bool ok;
  std::string message;  // names the first violated property when !ok
};

// Report-style validation of all representation invariants.
Violation validate(const std::vector<BiPoly>& keys, const std::vector<ExtRat>& values,
                   bool swapped = false);

// Value of the associated valuation on phi (given in the original coordinates).
ExtRat eval(const Skp& s, const BiPoly& phi);

enum class Order { Equal, Less, Greater, Incomparable };
Order compare(const Skp& a, const Skp& b);
Skp wedge(const Skp& a, const Skp& b);

struct BranchSkp {
  Skp skp;
  bool reached_curve;  // final value is infinite (exact curve SKP)
};

// The unique SKP of the curve valuation of a branch, normalized by v(x) = 1.
// Stops at the final (infinite) key, at stop_alpha, or at max_depth; raw-pair
// branches whose normal form is an infinite series yield a truncation.
BranchSkp skp_of_branch(const BranchParam& c, int max_depth = 32,
                        std::optional<Rat> stop_alpha = std::nullopt);

// Contact-order evaluation of an irreducible curve through its SKP; must agree
// with eval(s, final key of phi_skp).
ExtRat eval_irreducible(const Skp& s, const Skp& phi_skp);

struct ApproxEntry {
  int index;     // key index with n_index >= 2
  long mult;     // multiplicity of the approximating valuation
  Rat alpha;     // its skewness
  Rat thinness;  // its thinness
};

struct InvariantReport {
  std::string kind;  // divisorial | curve | infinitely-singular-truncated
  bool monomial = false;
  int rk = 1, rat_rk = 1, tr_deg = 1;
  ExtRat alpha;      // skewness
  ExtRat thinness;
  long mult = 1;
  std::optional<long> generic_mult;  // present iff divisorial
  std::vector<ApproxEntry> approx;
  std::vector<ExtRat> semigroup;  // generators of v(R), ascending
};

InvariantReport invariants(const Skp& s);

struct RelativeInvariants {
  ExtRat alpha_x, thinness_x;
  ExtRat mult_x;
};

RelativeInvariants relative_invariants(const Skp& s);

// Ultrametric distance m(C)m(C')/(C.C') between distinct branches; 0 for equal
// branches. Equals 1/alpha(wedge of the curve valuations).
ExtRat ball_distance(const BranchParam& a, const BranchParam& b);

// Intersection number routed through SKP wedges when both parameterizations
// are non-standard; otherwise the direct elimination.
ExtRat intersection_number_general(const BranchParam& a, const BranchParam& b);

// Canonical truncation of s at a target skewness 1 <= t <= alpha(s).
Skp truncate_at_skewness(const Skp& s, const Rat& alpha_target);

// Arithmetic data of the final level: the minimal multiplier n_k and the
// bounded decomposition n_k b_k = sum m_l b_l (used to extend SKPs).
struct FinalLevel {
  Int n;
  std::vector<Int> m;
};

FinalLevel final_level_decomposition(const Skp& s);

// Piecewise data of the segment [v_m, s]: level ends and multiplicities.
struct SkewnessProfile {
  struct Level {
    ExtRat alpha_end;  // alpha at the full level (infinite for the curve end)
    long mult;         // multiplicity on the half-open segment below it
  };
  std::vector<Level> levels;

  ExtRat thinness_at(const ExtRat& alpha) const;
  Rat skewness_at_thinness(const Rat& a) const;  // inverse of the above
  long mult_at(const Rat& alpha) const;
};

SkewnessProfile profile(const Skp& s);

}  // namespace valtree

#endif
