#pragma once

#include <map>
#include <string>
#include <vector>

#include "qde/poly.hpp"

namespace qde {

// Rational function in canonical form num / prod(f_k^{e_k}) where every f_k is
// a monic linear polynomial not dividing num. Every denominator arising in
// this project is a product of linear forms, which keeps reduction down to
// exact trial division; constructors reject anything else.
class RatFun {
 public:
  RatFun() = default;
  RatFun(Poly p) : num_(std::move(p)) {}
  explicit RatFun(const Rat& c) : num_(c) {}
  explicit RatFun(long c) : num_(c) {}

  static RatFun quotient(Poly num, const std::vector<Poly>& linear_dens);
  // batched addition: one common denominator and one reduction pass
  static RatFun sum(const std::vector<RatFun>& fs);

  const Poly& numerator() const { return num_; }
  Poly denominator() const;  // expanded product
  const std::map<Poly, int, PolyKeyLess>& den_factors() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }
  const Poly& as_poly() const;  // requires is_polynomial

  RatFun operator-() const;
  RatFun& operator+=(const RatFun& o);
  RatFun& operator-=(const RatFun& o);
  friend RatFun operator+(RatFun a, const RatFun& b) { return a += b; }
  friend RatFun operator-(RatFun a, const RatFun& b) { return a -= b; }
  friend RatFun operator*(const RatFun& a, const RatFun& b);
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
  RatFun& operator*=(const Rat& c);

  // divide by a linear polynomial
  RatFun over(const Poly& linear) const;
  // multiply by a power (possibly negative) of a linear polynomial
  RatFun times_pow(const Poly& linear, int e) const;

  bool operator==(const RatFun& o) const;

  RatFun relabel(const std::map<VarId, VarId>& ren) const;  // ren must be injective
  RatFun substitute(const std::map<VarId, Poly>& sub) const;

  Cplx eval(const std::map<VarId, Cplx>& point) const;

  std::string str() const;

 private:
  Poly num_;
  std::map<Poly, int, PolyKeyLess> den_;
  void reduce();
  void push_factor(const Poly& linear, int mult);  // normalizes, adjusts num_
};

RatFun symmetrize(const RatFun& f, const std::vector<std::vector<VarId>>& groups);
// the orbit of f as separate terms, for callers that combine sums lazily
std::vector<RatFun> symmetrize_terms(const RatFun& f, const std::vector<std::vector<VarId>>& groups);

// sum(lhs) == sum(rhs), decided by clearing all denominators; avoids any
// polynomial division
bool sum_equal(const std::vector<RatFun>& lhs, const std::vector<RatFun>& rhs);

}  // namespace qde
