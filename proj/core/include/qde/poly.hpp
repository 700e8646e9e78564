#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qde/rational.hpp"
#include "qde/varid.hpp"

namespace qde {

// Monomial: variable/exponent pairs, sorted by VarId, exponents > 0.
struct Mono {
  std::vector<std::pair<VarId, int>> pw;

  int degree() const;
  int exponent_of(VarId v) const;
  friend bool operator==(const Mono&, const Mono&) = default;
};

Mono mono_mul(const Mono& a, const Mono& b);

// Graded order: lower total degree first; ties broken so that among equal
// degrees the monomial whose earliest differing variable carries the larger
// exponent is the larger one. Term storage below runs leading term first.
bool mono_less(const Mono& a, const Mono& b);

class Poly {
 public:
  using Term = std::pair<Mono, Rat>;
  using TermList = std::vector<Term>;

  Poly() = default;
  explicit Poly(const Rat& c);
  explicit Poly(long c);

  static Poly var(VarId v, int exp = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant_value() const;  // requires is_constant
  int degree() const;
  int degree_in(VarId v) const;
  std::size_t term_count() const { return terms_.size(); }
  const TermList& terms() const { return terms_; }

  const Mono& leading_mono() const;
  const Rat& leading_coeff() const;

  Rat coeff(const Mono& m) const;
  // coefficient of v^k, as a polynomial in the remaining variables
  Poly coeff_of(VarId v, int k) const;

  std::set<VarId> vars() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly& operator*=(const Rat& c);
  friend Poly operator*(Poly a, const Rat& c) { return a *= c; }
  friend bool operator==(const Poly&, const Poly&) = default;

  Poly pow(int e) const;

  // balanced-merge addition of many polynomials
  static Poly sum(std::vector<Poly> parts);

  // canonicalize an arbitrary term list
  static Poly from_terms(TermList terms);

  // simultaneous substitution; variables absent from the map are kept
  Poly substitute(const std::map<VarId, Poly>& sub) const;
  // simultaneous renaming (cheap path of substitute)
  Poly relabel(const std::map<VarId, VarId>& ren) const;
  Poly derivative(VarId v) const;

  // every variable of the polynomial must be bound
  Cplx eval(const std::map<VarId, Cplx>& point) const;
  Rat eval_rat(const std::map<VarId, Rat>& point) const;

  // exact division; nullopt if the divisor does not divide exactly
  std::optional<Poly> divexact(const Poly& divisor) const;

  // total order for use as container key (not the monomial order)
  static int compare(const Poly& a, const Poly& b);

  std::string str() const;

 private:
  TermList terms_;  // invariant: strictly descending monomials, no zero coefficients
  static Poly from_term(Mono m, Rat c);
  // scaled copy: this * (m, c), order preserved
  Poly scaled(const Mono& m, const Rat& c) const;
  void normalize();  // sort descending, combine equal monomials, drop zeros
};

struct PolyKeyLess {
  bool operator()(const Poly& a, const Poly& b) const { return Poly::compare(a, b) < 0; }
};

// orbit sum over the product of symmetric groups, one per variable group
Poly symmetrize(const Poly& f, const std::vector<std::vector<VarId>>& groups);

}  // namespace qde
