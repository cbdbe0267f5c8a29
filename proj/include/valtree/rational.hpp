#ifndef VALTREE_RATIONAL_HPP
#define VALTREE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace valtree {

using Int = boost::multiprecision::cpp_int;

// Domain errors carry a short machine-readable kind plus a human message.
class domain_error : public std::runtime_error {
 public:
  domain_error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline Int int_gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }
inline Int int_lcm(const Int& a, const Int& b) { return boost::multiprecision::lcm(a, b); }

// Exact rational number, always normalized: den > 0, gcd(num, den) = 1.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}
  Rat(const Int& n) : num_(n), den_(1) {}
  Rat(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

  static Rat parse(const std::string& s);

  const Int& num() const { return num_; }
  const Int& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }

  Rat operator-() const { return Rat(-num_, den_, raw_tag{}); }
  Rat operator+(const Rat& o) const { return Rat(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
  Rat operator-(const Rat& o) const { return Rat(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
  Rat operator*(const Rat& o) const { return Rat(num_ * o.num_, den_ * o.den_); }
  Rat operator/(const Rat& o) const {
    if (o.num_ == 0) throw domain_error("division_by_zero", "rational division by zero");
    return Rat(num_ * o.den_, den_ * o.num_);
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const { return num_ * o.den_ < o.num_ * den_; }
  bool operator<=(const Rat& o) const { return num_ * o.den_ <= o.num_ * den_; }
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return o <= *this; }

  // Largest integer <= value.
  Int floor() const {
    Int q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
  }

  std::string str() const {
    std::string s = num_.str();
    if (den_ != 1) s += "/" + den_.str();
    return s;
  }

 private:
  struct raw_tag {};
  Rat(Int n, Int d, raw_tag) : num_(std::move(n)), den_(std::move(d)) {}
  void normalize() {
    if (den_ == 0) throw domain_error("division_by_zero", "rational with zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    Int g = int_gcd(num_ < 0 ? Int(-num_) : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (num_ == 0) den_ = 1;
  }
  Int num_, den_;
};

inline Rat Rat::parse(const std::string& s) {
  auto bad = [&] { throw domain_error("parse", "malformed rational '" + s + "'"); };
  if (s.empty()) bad();
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::exception&) {
    bad();
  }
  return Rat();
}

// Value domain of rank-1 valuations: an exact rational or +infinity.
// 0 * inf and inf - inf are rejected, never silently defined.
class ExtRat {
 public:
  ExtRat() : inf_(false), val_() {}
  ExtRat(const Rat& r) : inf_(false), val_(r) {}
  ExtRat(long long n) : inf_(false), val_(n) {}
  static ExtRat infinity() {
    ExtRat e;
    e.inf_ = true;
    return e;
  }

  bool is_infinite() const { return inf_; }
  bool is_finite() const { return !inf_; }
  const Rat& finite() const {
    if (inf_) throw domain_error("infinite_value", "expected a finite value");
    return val_;
  }

  ExtRat operator+(const ExtRat& o) const {
    if (inf_ || o.inf_) return infinity();
    return ExtRat(val_ + o.val_);
  }
  ExtRat operator-(const ExtRat& o) const {
    if (o.inf_) throw domain_error("indeterminate", "cannot subtract infinity");
    if (inf_) return infinity();
    return ExtRat(val_ - o.val_);
  }
  ExtRat operator*(const Rat& c) const {
    if (inf_) {
      if (c.is_zero()) throw domain_error("indeterminate", "0 * infinity rejected");
      if (c.sign() < 0) throw domain_error("indeterminate", "negative multiple of infinity");
      return infinity();
    }
    return ExtRat(val_ * c);
  }

  bool operator==(const ExtRat& o) const {
    if (inf_ != o.inf_) return false;
    return inf_ || val_ == o.val_;
  }
  bool operator!=(const ExtRat& o) const { return !(*this == o); }
  bool operator<(const ExtRat& o) const {
    if (inf_) return false;
    if (o.inf_) return true;
    return val_ < o.val_;
  }
  bool operator<=(const ExtRat& o) const { return *this < o || *this == o; }
  bool operator>(const ExtRat& o) const { return o < *this; }
  bool operator>=(const ExtRat& o) const { return o <= *this; }

  std::string str() const { return inf_ ? "inf" : val_.str(); }

  static ExtRat parse(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "oo") return infinity();
    return ExtRat(Rat::parse(s));
  }

 private:
  bool inf_;
  Rat val_;
};

inline const ExtRat& min(const ExtRat& a, const ExtRat& b) { return b < a ? b : a; }
inline const ExtRat& max(const ExtRat& a, const ExtRat& b) { return a < b ? b : a; }

}  // namespace valtree

#endif
