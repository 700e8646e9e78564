#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qde/rational.hpp"
#include "qde/shapes.hpp"

namespace qde {

struct DomainViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SlowConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleCrossing : std::logic_error {
  using std::logic_error::logic_error;
};
struct SymmetryViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// dynamical: kappa-step residue series in (z, q), weight-space coordinates
// quantum:   inverted-q series for the quantum connection, step is -kappa
// flag:      h-free limit series in the p variables
enum class SeriesModel { dynamical, quantum, flag };

struct SolverConfig {
  Shape shape;
  std::vector<Cplx> z;
  Cplx h;
  Cplx kappa;              // the lattice step (tilde step for quantum/flag)
  std::vector<Cplx> q;     // q, q-tilde, or p depending on model
  std::vector<int> branch; // extra 2 pi windings of log q_i
  int trunc;
  double tol;
  SeriesModel model;

  // validates the pole-avoidance and convergence conditions, throws DomainViolation
  SolverConfig(Shape s, std::vector<Cplx> zv, Cplx hv, Cplx kv, std::vector<Cplx> qv,
               SeriesModel m = SeriesModel::dynamical, int trunc_cap = 60,
               double tolerance = 1e-12, std::vector<int> br = {});

  Cplx log_q(int i) const;  // chosen branch, i = 1..N
};

// Integer offsets over the residue lattice anchored at the cycle of `base`.
// Offsets are stored level-major, nonnegative, one kappa-step each; the
// engine moves by -kappa per unit for the dynamical model and +kappa for
// quantum/flag.
struct LatticePoint {
  IndexSet base;
  std::vector<int> offsets;
};

// (e^{i pi phase} q_i)^{exponent}
struct QPower {
  int phase = 0;
  Cplx exponent{};
};

struct SeriesValue {
  std::vector<QPower> q_powers;                // structured leading q-dependence
  std::vector<std::pair<Cplx, int>> gamma_args;  // (argument, power) of Gamma factors
  Cplx log_prefactor{};                        // includes q-powers, Gamma values, scalars
  Cplx sum{};                                  // normalized series, first term = weight at base
  long terms = 0;
  double tail = 0.0;

  Cplx value() const;  // exp(log_prefactor) * sum
};

struct SolutionVector {
  std::vector<IndexSet> labels;
  std::vector<SeriesValue> entries;
};

struct BaseResidue {
  std::vector<QPower> q_powers;
  std::vector<std::pair<Cplx, int>> gamma_args;
  int kappa_power = 0;
  Cplx rational_factor{1.0, 0.0};
  Cplx log_value{};
  Cplx value{};
  bool factored_form_consistent = true;  // gamma_args x q_powers reproduce value
};

struct ComparisonReport {
  Cplx computed{};
  Cplx expected{};
  double relative_deviation = 0.0;
};

struct DetComparisonReport {
  Cplx determinant{};
  Cplx formula{};
  Cplx ratio{};                 // determinant / formula
  double q_independence = 0.0;  // spread of det/(q-prefactor) across probed ratios
  std::vector<Cplx> normalized; // det/(q-prefactor) per probed ratio
};

// Ratio of consecutive regularized residue terms, Phi(T + step)/Phi(T) in the
// residue normalization. Throws PoleCrossing when either endpoint leaves the
// nonzero-residue octant.
Cplx master_ratio(const SolverConfig& c, const LatticePoint& T, const std::vector<int>& step);

// Regularized iterated residue at the base lattice point. For the quantum
// model the value is reported in the normalization of the leading asymptotics
// (weight factor at the base folded in); for the dynamical model it is the
// bare residue of the master factor.
BaseResidue base_residue(const SolverConfig& c, const IndexSet& I);

// Jackson-type residue series, coordinates in the weight basis v_I.
SolutionVector psi_J(const SolverConfig& c, const IndexSet& J);

// Quantum-connection series for one fixed point label I. `stable` selects the
// coordinate model: fixed-point restrictions (false) or the coordinates in
// the stable basis (true), which is where the modified Hamiltonians act.
SolutionVector psi_hat(const SolverConfig& c, const IndexSet& I, bool stable = false);

// h-free limit series, fixed-point restrictions.
SolutionVector flag_limit_solution(const SolverConfig& c, const IndexSet& I);

// max_i |kappa q_i d/dq_i Psi - X_i Psi| / |Psi| over the whole family.
// Dynamical model: X_i; quantum model: modified X_i at inverted q.
double check_dynamical_residual(const SolverConfig& c);

// max_a |Psi(z + kappa e_a) - K_a(z) Psi(z)| / |Psi|, dynamical model.
double check_qkz_residual(const SolverConfig& c);

// Deviation of the computed leading coefficient at the diagonal fixed point
// from the Gamma-class product; requires kappa = 1. Works for the quantum
// model (paired Gamma factors with h) and the flag model (single factors).
ComparisonReport gamma_leading(const SolverConfig& c, const IndexSet& I);

// Relative gap between the rescaled quantum solution at finite h and the
// h-free limit solution with matching p; the gap should shrink as -h grows.
double stirling_gap(const SolverConfig& flag_config, const IndexSet& I, Cplx h);

// Laurent-polynomial coefficient function P(t-exponentials, z-exponentials, y).
using LaurentClass =
    std::function<Cplx(const std::vector<std::vector<Cplx>>&, const std::vector<Cplx>&, Cplx)>;

struct CombinedSolution {
  std::vector<IndexSet> fixed_points;
  std::vector<Cplx> values;
};

// Sum of P at the exponentiated cycle of K times the K-th quantum solution;
// rejects P that is not symmetric within each exponentiated level group.
CombinedSolution ktheory_solution(const SolverConfig& c, const LaurentClass& P);

// Determinant of the coefficient matrix of the Schubert-class-indexed
// solutions in the Schubert basis, against the closed product formula; the
// normalized values probe q-independence at scaled q configurations.
DetComparisonReport schubert_expansion_determinant(const SolverConfig& c);

// |sum over the lattice of (shifted - plain) residue terms| relative to the
// series magnitude, for a polynomial test weight; telescopes to the tail.
double formal_integral_residual(const SolverConfig& c, const IndexSet& J);

// fi-axiom linearity of the truncated sum: |M(a f + b g) - a M(f) - b M(g)|.
double formal_integral_linearity(const SolverConfig& c, const IndexSet& J);

// standard Gauss series, the oracle for the smallest quantum family
Cplx hyper2f1(Cplx a, Cplx b, Cplx c, Cplx x);

}  // namespace qde
