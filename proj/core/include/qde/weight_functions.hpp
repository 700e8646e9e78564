#pragma once

#include <map>
#include <vector>

#include "qde/ratfun.hpp"
#include "qde/shapes.hpp"

namespace qde {

// Level variable: t[j][a] for j < N, z[a] at level N.
Poly level_var(const Shape& s, int j, int a);
// one group per level j = 1..N-1: the symmetrization alphabet
std::vector<std::vector<VarId>> level_groups(const Shape& s);

// Unsymmetrized kernels. The two variants differ in which side of the nested
// index comparison picks up the -h factor and in the orientation of the
// same-level ratio.
RatFun u_kernel(const Shape& s, const IndexSet& I);         // U_I
RatFun script_u_kernel(const Shape& s, const IndexSet& I);  // curly U_I

// W_I = Sym U_I; curly W_I = (-h)^{level_sum} Sym curly-U_I. Both polynomial.
Poly w_function(const Shape& s, const IndexSet& I);
Poly script_w(const Shape& s, const IndexSet& I);
// curly W_{sigma,I}(T;z) = curly W_{sigma^{-1}(I)}(T; z_{sigma(1)},...,z_{sigma(n)})
Poly script_w_twisted(const Shape& s, const Perm& sigma, const IndexSet& I);

// S_{i,i+1} f = ((z_i - z_{i+1} - h) f^{z_i <-> z_{i+1}} + h f) / (z_i - z_{i+1})
RatFun s_operator(int i, const Poly& f);
RatFun s_operator(int i, const RatFun& f);

// substitution maps
std::map<VarId, Poly> cycle_substitution(const Shape& s, const IndexSet& J);   // t -> z anchors
std::map<VarId, Poly> theta_substitution(const Shape& s, const IndexSet& J);   // theta -> z anchors
std::map<VarId, Poly> gamma_substitution(const Shape& s, const IndexSet& K);   // gamma -> block values

// evaluation at the cycle point; rejects input that is not symmetric per level
Poly evaluate_at_cycle(const Poly& f, const Shape& s, const IndexSet& J);

// tautological classes
Poly class_q(const Shape& s);                           // prod (gamma_i - gamma_j - h)
Poly class_r(const Shape& s);                           // prod (gamma_i - gamma_j)
Poly class_c(const Shape& s);                           // prod over levels incl. diagonal
std::vector<Poly> class_c_factors(const Shape& s);      // linear factor list of class_c
Poly class_r_i(const Shape& s, const IndexSet& I);      // mixed gamma/z product
// class_c factors evaluated at the cycle of J (for denominator use)
std::vector<Poly> class_c_factors_at(const Shape& s, const IndexSet& J);

// K-theoretic style kernel classes
Poly w_hat(const Shape& s);       // symmetrized, gamma alphabet at the deepest level
Poly w_hat_flag(const Shape& s);  // flag limit form

// fixed-point matrix of the stable envelope: rows K, cols I,
// entry = curly W_{id,I}(cycle K) / class_c(cycle K)
std::vector<std::vector<RatFun>> stable_envelope(const Shape& s);

// checks used by tests and the verification tool
bool shuffle_check(const Shape& s, int n1, const IndexSet& I);
bool factorization_check(const Shape& s);  // shape (n,0,...,0)
bool useful_identity_check(int k);         // both vanishing statements, levels 0..k+1

}  // namespace qde
