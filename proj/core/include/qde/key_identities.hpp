#pragma once

#include "qde/shapes.hpp"
#include "qde/weight_functions.hpp"

namespace qde {

// Difference brackets for the block pair {alpha, beta}, alpha < beta, written
// in the variables of the ambient shape s; the last variable of each level in
// the window [alpha, beta) is the distinguished one. Standalone factors whose
// level is empty are omitted.
RatFun bracket_a(const Shape& s, int alpha, int beta);  // -h on the descending chain
RatFun bracket_b(const Shape& s, int alpha, int beta);  // -h on the ascending chain

// g (A - B), g B and g (q_beta A - q_alpha B)/(q_alpha - q_beta), each
// followed by the orbit sum over the level alphabets of s
RatFun d_tilde(const Shape& s, int alpha, int beta, const RatFun& g);
RatFun d_hat(const Shape& s, int alpha, int beta, const RatFun& g);
RatFun d_full(const Shape& s, int alpha, int beta, const RatFun& g);

// D_{I,i} = sum_{j<i} sum_{a<=l_j} d_{{j,i}} U_{(I)^a_{j->i}}
//         - sum_{j>i} sum_{a<=l_i} d_{{i,j}} U_{(I)^a_{i->j}}
RatFun d_combination(const Shape& s, const IndexSet& I, int i);

// d_tilde on the kernel of J (one transfer beta->alpha below s) expands into
// -h times the sum of W over the index sets restoring shape s
bool check_first_key(const Shape& s, const IndexSet& J, int alpha, int beta);
// the recursion for (sum t^{(i)} - sum t^{(i-1)} - sum_{a in I_i} z_a) W_I
bool check_second_key(const Shape& s, const IndexSet& I, int i);
// its form summed over the first l rows
bool check_second_key_summed(const Shape& s, const IndexSet& I, int l);
// the q-weighted combination equal to D_{I,i}.  check_dic rewrites the
// d-parts of D through the first and second key identities, which the suite
// verifies separately for every instance, leaving a W-level identity; the
// _direct form evaluates every d-functional outright and is meant for small
// shapes
bool check_dic(const Shape& s, const IndexSet& I, int i);
bool check_dic_direct(const Shape& s, const IndexSet& I, int i);
// d = q_beta/(q_alpha - q_beta) d_tilde - d_hat at the bracket level; the
// summed forms follow by linearity of the orbit sum
bool check_bracket_decomposition(const Shape& s, int alpha, int beta);
// d_hat U_J = c d_hat W_J with c fixed by alphabet-size bookkeeping
bool check_duw(const Shape& s, const IndexSet& J, int alpha, int beta);
// d_hat U commutes with the z-exchange operator S_{i,i+1}
bool check_u3t(const Shape& s, const IndexSet& J, int alpha, int beta, int i);
// coefficientwise identity driving the difference equation:
// (sum t^{(i)} - sum t^{(i-1)} + omega_i) W_I - (X_i W)_I = D_{I,i}
// with D reduced as in check_dic; the _direct form computes D outright
bool check_master(const Shape& s, int i);
bool check_master_direct(const Shape& s, int i);

// drop memoized weight functions and d-functional values
void clear_identity_caches();

}  // namespace qde
