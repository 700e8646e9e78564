#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qde/ratfun.hpp"
#include "qde/shapes.hpp"

namespace qde {

// Deformed multiplication on the fixed-point algebra, its determinant
// presentation, and the numeric Bethe-root machinery feeding it. Within this
// header the q symbols denote the multiplicative parameters of the deformed
// product; the lattice-side configs below carry their reciprocals.

// spectral variable of the determinant presentations
VarId u_var();

// det( q_i^{j-1} prod_k (u - gamma_{i,k} - h (i-j)) ), i,j = 1..m, expanded
// exactly. m = N presents the whole algebra; smaller m cuts out the level-m
// alphabet.
Poly wronskian_det(const Shape& s, int m);

// prod_{i<j<=m} (q_j - q_i)
Poly q_vandermonde(int m);

// defining relations: coefficients of u^{n-1}, ..., u^0 in
// wronskian_det(N)/q_vandermonde(N) - prod_a (u - z_a)
std::vector<RatFun> algebra_relations(const Shape& s);

// elementary symmetric functions e_0..e_{cum(m)} of the level-m alphabet,
// read off the truncated determinant
std::vector<RatFun> theta_elementary(const Shape& s, int m);
// closed form of e_1:
// sum_{i<=m,k} gamma_{i,k} - h sum_{i<j<=m} (l_i - l_j) q_i/(q_i - q_j)
RatFun theta_first_sum(const Shape& s, int m);

// exact degeneration q_i/q_{i+1} -> 0: the determinant collapses onto its
// diagonal, so the relations must turn into the coefficientwise matching of
// prod_{i,k} (u - gamma_{i,k}) with prod_a (u - z_a)
bool staircase_limit_check(const Shape& s);

// weight function with the level alphabets renamed t -> theta
Poly w_theta(const Shape& s, const IndexSet& I);

// multiplication rule for the first Chern class of the i-th step against the
// weight-function classes, reduced exactly modulo the defining relations
// after eliminating the second row; N = n = 2 only
bool pieri_symbolic_check(const IndexSet& I, int i);

// classical specialization of the same rule, checked exactly in the
// fixed-point model (every gamma row restricted to its z-block)
bool classical_limit_check(const Shape& s, const IndexSet& I, int i);

struct RelationViolated : std::runtime_error {
  explicit RelationViolated(const std::string& m) : std::runtime_error(m) {}
};
struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& m) : std::runtime_error(m) {}
};
struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& m) : std::runtime_error(m) {}
};

// numeric point of the deformed algebra
struct AlgebraPoint {
  std::vector<std::vector<Cplx>> gamma;  // gamma[i-1] lists row i, lam_i entries
  std::vector<Cplx> z;
  std::vector<Cplx> q;  // pairwise distinct
  Cplx h{0.0, 0.0};
};

// max relative residual of the defining relations at the point
double relation_residual(const Shape& s, const AlgebraPoint& p);

// level alphabets at the point: roots of the truncated determinants,
// levels 1..N-1, each sorted by real then imaginary part
std::vector<std::vector<Cplx>> theta_levels(const Shape& s, const AlgebraPoint& p);

// |LHS - RHS| of the multiplication rule for (I, i) at the point; throws
// RelationViolated when the point fails the defining relations beyond rel_tol
double pieri_residual(const Shape& s, const IndexSet& I, int i, const AlgebraPoint& p,
                      double rel_tol = 1e-6);

struct BetheConfig {
  std::vector<Cplx> z;  // pairwise distinct
  std::vector<Cplx> q;  // one per row, pairwise distinct, nonzero
  Cplx h{1.0, 0.0};
  double tol = 1e-10;
};

struct BetheRoot {
  std::vector<std::vector<Cplx>> t;  // t[i-1] is level i, cum(i) entries
  double residual = 0.0;
};

// max deviation of the critical-point equations at t (infinity at a pole)
double bae_residual(const Shape& s, const BetheConfig& c,
                    const std::vector<std::vector<Cplx>>& t);

// all roots found, canonicalized (levels sorted) and deduplicated, sorted by
// the flattened (re, im) word; one root per basis element for generic
// parameters. Closed form for a single variable, elimination for a level-1
// pair, otherwise damped Newton continued in q from the anchor
// configurations.
std::vector<BetheRoot> bethe_solve(const Shape& s, const BetheConfig& c);

// row polynomials prod_k (u - gamma_{i,k}) solved level by level from the
// triangular determinant system at a root; point.q holds the reciprocals of
// c.q, matching the convention of the relations above
struct GammaSolution {
  AlgebraPoint point;
  double residual = 0.0;  // determinant system residual over sample points
};
GammaSolution gamma_from_bethe(const Shape& s, const BetheConfig& c, const BetheRoot& root);

// numeric value of the q-weighted discrete differential combination at the
// root; vanishes on Bethe roots
double d_combination_residual(const Shape& s, const IndexSet& I, int i, const BetheConfig& c,
                              const BetheRoot& root);

}  // namespace qde
