#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qde/matrix.hpp"
#include "qde/ratfun.hpp"
#include "qde/shapes.hpp"

namespace qde {

// Weight subspace of (C^N)^{tensor n} spanned by v_I, I running over the
// ordered set partitions of shape s. Matrices below act by columns:
// (M v)_I = sum_K M[I,K] v_K coefficients.
struct WeightModule {
  Shape s;
  std::vector<IndexSet> basis;

  explicit WeightModule(const Shape& shape);

  int dim() const { return static_cast<int>(basis.size()); }
  int idx(const std::vector<int>& word) const;

 private:
  std::map<std::vector<int>, int> pos_;
};

// the step of the difference operators enters as the symbol aux[0]
Poly kappa_sym();

Mat<RatFun> x_hamiltonian(const WeightModule& m, int i);
// X_i minus h sum_{j<i} q_i min(l_i,l_j)/(q_i-q_j) minus
// h sum_{j>i} q_j min(l_i,l_j)/(q_i-q_j); the quantum-connection form
Mat<RatFun> x_hamiltonian_modified(const WeightModule& m, int i);

// R^{(a,b)}(u) = (u - h P^{(a,b)}) / (u - h), u a linear argument
Mat<RatFun> r_check(const WeightModule& m, int a, int b, const Poly& u);

// K_a = R^{(a,a-1)}(z_a-z_{a-1}+kappa) ... R^{(a,1)}(z_a-z_1+kappa)
//       * diag(q at letter a) * R^{(a,n)}(z_a-z_n) ... R^{(a,a+1)}(z_a-z_{a+1})
Mat<RatFun> qkz_operator(const WeightModule& m, int a);
// factors of K_a; q_i d/dq_i K_a = shifted * projected diag * plain
Mat<RatFun> qkz_shifted_part(const WeightModule& m, int a);
Mat<RatFun> qkz_plain_part(const WeightModule& m, int a);
Mat<RatFun> q_diagonal(const WeightModule& m, int a);
Mat<RatFun> q_diagonal_projected(const WeightModule& m, int a, int i);

Mat<Cplx> eval_matrix(const Mat<RatFun>& m, const std::map<VarId, Cplx>& point);

bool check_x_commuting(const WeightModule& m);
bool check_r_unitarity(const WeightModule& m);
// K_i(z_j+kappa) K_j(z) = K_j(z_i+kappa) K_i(z), exact
bool check_qkz_flatness(const WeightModule& m);
// max-norm residual over random points of
// X_i(z+kappa e_a) K_a - K_a X_i(z) - kappa q_i d/dq_i K_a
double mixed_compatibility_residual(const WeightModule& m, std::uint64_t seed, int points);

}  // namespace qde
