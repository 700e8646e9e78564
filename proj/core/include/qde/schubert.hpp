#pragma once

#include <map>
#include <vector>

#include "qde/poly.hpp"
#include "qde/ratfun.hpp"
#include "qde/shapes.hpp"

namespace qde {

// f with x_i and x_{i+1} swapped, minus f, over x_{i+1} - x_i; exact
Poly divided_difference(const Poly& f, int i);

// composition along a reduced word of sigma; independent of the word chosen
Poly divided_difference(const Poly& f, const Perm& sigma);

// f(x_{sigma(1)}, ..., x_{sigma(n)})
Poly permute_x(const Poly& f, const Perm& sigma);

class SchubertBasis {
 public:
  explicit SchubertBasis(int n);

  int n() const { return n_; }
  const Poly& at(const Perm& sigma) const;

 private:
  int n_;
  std::map<std::vector<int>, Poly> table_;
};

// full orthogonality table for S_n
bool orthogonality_check(int n);

// the Cauchy expansion against the explicit product
bool cauchy_check(int n);

// basis coefficients of f over symmetric functions, keyed by one-line word
std::map<std::vector<int>, Poly> schubert_expand(const SchubertBasis& basis, const Poly& f);

// re-sum an expansion and compare with f
bool expand_roundtrip(const SchubertBasis& basis, const Poly& f);

// block-restricted statements for a shape: invariance of A_{sigma^I},
// orthogonality, Cauchy, and the free-module expansion over invariants
bool lambda_invariance_check(const Shape& s);
bool lambda_orthogonality_check(const Shape& s);
bool lambda_cauchy_check(const Shape& s);
bool lambda_expand_check(const Shape& s, const Poly& f);

// both sides of the localization formula for the top divided difference;
// throws on disagreement
RatFun lambda_localization_sum(const Shape& s, const Poly& f);

struct DeterminantReport {
  Poly determinant;          // det(A_{sigma^I}(x_{sigma^J}))
  Poly predicted;            // Vandermonde power with the stated exponent
  int stated_exponent;
  int observed_exponent;     // -1 when the determinant is not a pure power
  Rat observed_constant;     // leading coefficient of the determinant
  bool matches_stated;
};

// evaluation determinant, both sides computed independently; never asserts
DeterminantReport evaluation_determinant(const Shape& s);

}  // namespace qde
