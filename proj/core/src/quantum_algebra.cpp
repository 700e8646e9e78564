#include "qde/quantum_algebra.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <utility>

#include "qde/key_identities.hpp"
#include "qde/weight_functions.hpp"

namespace qde {

namespace {

// entry (i, j) of the m x m determinant, exponent convention q_i^{j-1}
Poly det_entry(const Shape& s, int i, int j) {
  const Poly u = Poly::var(u_var());
  const Poly h = Poly::var(h_var());
  Poly e = (j > 1) ? Poly::var(q_var(i), j - 1) : Poly(Rat(1));
  Poly base = u - h * Rat(i - j);
  for (int k = 1; k <= s.part(i); ++k) e *= base - Poly::var(gamma_var(i, k));
  return e;
}

// column-subset determinant, rows consumed in order
Poly det_poly(const std::vector<std::vector<Poly>>& m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return Poly(Rat(1));
  std::vector<Poly> dp(std::size_t(1) << n);
  dp[0] = Poly(Rat(1));
  for (unsigned mask = 1; mask < dp.size(); ++mask) {
    const int r = std::popcount(mask) - 1;
    Poly acc;
    for (int c = 0; c < n; ++c) {
      if (!(mask & (1u << c))) continue;
      Poly term = dp[mask ^ (1u << c)] * m[std::size_t(r)][std::size_t(c)];
      if (std::popcount(mask >> (c + 1)) % 2 == 1)
        acc -= term;
      else
        acc += term;
    }
    dp[mask] = std::move(acc);
  }
  return dp.back();
}

std::vector<Poly> vandermonde_factors(int m) {
  std::vector<Poly> out;
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j)
      out.push_back(Poly::var(q_var(j)) - Poly::var(q_var(i)));
  return out;
}

}  // namespace

VarId u_var() { return aux_var(1); }

Poly wronskian_det(const Shape& s, int m) {
  std::vector<std::vector<Poly>> M(static_cast<std::size_t>(m),
                                   std::vector<Poly>(static_cast<std::size_t>(m)));
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      M[std::size_t(i - 1)][std::size_t(j - 1)] = det_entry(s, i, j);
  return det_poly(M);
}

Poly q_vandermonde(int m) {
  Poly out(Rat(1));
  for (const Poly& f : vandermonde_factors(m)) out *= f;
  return out;
}

std::vector<RatFun> algebra_relations(const Shape& s) {
  const int n = s.n();
  const Poly det = wronskian_det(s, s.N());
  const std::vector<Poly> dens = vandermonde_factors(s.N());
  Poly target(Rat(1));
  const Poly u = Poly::var(u_var());
  for (int a = 1; a <= n; ++a) target *= u - Poly::var(z_var(a));
  std::vector<RatFun> out;
  for (int k = n - 1; k >= 0; --k)
    out.push_back(RatFun::quotient(det.coeff_of(u_var(), k), dens) -
                  RatFun(target.coeff_of(u_var(), k)));
  return out;
}

std::vector<RatFun> theta_elementary(const Shape& s, int m) {
  const int L = s.cum(m);
  const Poly det = wronskian_det(s, m);
  const std::vector<Poly> dens = vandermonde_factors(m);
  std::vector<RatFun> out;
  for (int r = 0; r <= L; ++r) {
    RatFun er = RatFun::quotient(det.coeff_of(u_var(), L - r), dens);
    if (r % 2 == 1) er *= Rat(-1);
    out.push_back(er);
  }
  return out;
}

RatFun theta_first_sum(const Shape& s, int m) {
  Poly sum;
  for (int i = 1; i <= m; ++i)
    for (int k = 1; k <= s.part(i); ++k) sum += Poly::var(gamma_var(i, k));
  RatFun out{sum};
  const Poly h = Poly::var(h_var());
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) {
      const long diff = s.part(i) - s.part(j);
      if (diff == 0) continue;
      out -= RatFun::quotient(h * Poly::var(q_var(i)) * Rat(diff),
                              {Poly::var(q_var(i)) - Poly::var(q_var(j))});
    }
  return out;
}

bool staircase_limit_check(const Shape& s) {
  const int N = s.N();
  const VarId eps = aux_var(2);
  std::map<VarId, Poly> sub;
  for (int i = 1; i < N; ++i) sub[q_var(i)] = Poly::var(eps, N - i);
  sub[q_var(N)] = Poly(Rat(1));
  const Poly det = wronskian_det(s, N).substitute(sub);
  // shared valuation of the determinant and the Vandermonde
  int d = 0;
  for (int i = 1; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) d += N - j;
  for (int r = 0; r < d; ++r)
    if (!det.coeff_of(eps, r).is_zero()) return false;
  Poly diag(Rat(1));
  const Poly u = Poly::var(u_var());
  for (int i = 1; i <= N; ++i)
    for (int k = 1; k <= s.part(i); ++k) diag *= u - Poly::var(gamma_var(i, k));
  return det.coeff_of(eps, d) == diag;
}

Poly w_theta(const Shape& s, const IndexSet& I) {
  std::map<VarId, VarId> ren;
  for (int j = 1; j < s.N(); ++j)
    for (int a = 1; a <= s.cum(j); ++a) ren[t_var(j, a)] = theta_var(j, a);
  return w_function(s, I).relabel(ren);
}

bool pieri_symbolic_check(const IndexSet& I, int i) {
  const Shape s({1, 1});
  if (!(I.shape() == s)) throw std::logic_error("pieri_symbolic_check: level-1 pair only");
  const Poly g = Poly::var(gamma_var(1, 1));
  const Poly g2 = Poly::var(gamma_var(2, 1));
  const Poly z1 = Poly::var(z_var(1)), z2 = Poly::var(z_var(2));
  const Poly h = Poly::var(h_var());
  const Poly q1 = Poly::var(q_var(1)), q2 = Poly::var(q_var(2));

  auto cls = [&](const IndexSet& K) {
    return RatFun(w_theta(s, K).relabel({{theta_var(1, 1), gamma_var(1, 1)}}));
  };

  const std::map<VarId, Poly> elim{{gamma_var(2, 1), z1 + z2 - g}};
  // constant relation cleared by the Vandermonde, second row eliminated
  const Poly Q = ((g * g2 - z1 * z2) * (q2 - q1) - h * q1 * (g - g2 - h)).substitute(elim);

  const RatFun wI = cls(I);
  Poly gsum = (i == 1) ? g : g2;
  Poly zsum;
  for (int a : I.blocks[std::size_t(i - 1)]) zsum += Poly::var(z_var(a));
  RatFun lhs = RatFun(gsum - zsum) * wI;

  RatFun rhs;
  for (int j = 1; j <= 2; ++j) {
    if (j == i) continue;
    const Poly qi = Poly::var(q_var(i)), qj = Poly::var(q_var(j));
    rhs += RatFun::quotient(h * (j < i ? qj : qi), {qi - qj}) * wI;
    for (int m2 = 1; m2 <= 1; ++m2) {
      const RatFun wsw = cls(swap_pair(I, i, j, 1, m2));
      if (I.element(i, 1) < I.element(j, m2)) rhs -= RatFun(h) * wsw;
      rhs += RatFun::quotient(h * qi, {qi - qj}) * wsw;
    }
  }

  Poly num = (lhs - rhs).substitute(elim).numerator();
  const VarId gv = gamma_var(1, 1);
  const Poly a2 = Q.coeff_of(gv, 2);
  while (num.degree_in(gv) >= 2) {
    const int dg = num.degree_in(gv);
    num = num * a2 - Q * num.coeff_of(gv, dg) * Poly::var(gv, dg - 2);
  }
  return num.is_zero();
}

bool classical_limit_check(const Shape& s, const IndexSet& I, int i) {
  const Poly h = Poly::var(h_var());
  const int N = s.N();
  for (const IndexSet& J : enumerate_index_sets(s)) {
    Poly zdiff;
    for (int a : J.blocks[std::size_t(i - 1)]) zdiff += Poly::var(z_var(a));
    for (int a : I.blocks[std::size_t(i - 1)]) zdiff -= Poly::var(z_var(a));
    const Poly lhs = zdiff * evaluate_at_cycle(w_function(s, I), s, J);
    Poly rhs;
    for (int j = 1; j <= N; ++j) {
      if (j == i) continue;
      for (int m1 = 1; m1 <= s.part(i); ++m1)
        for (int m2 = 1; m2 <= s.part(j); ++m2) {
          const bool greater = I.element(i, m1) > I.element(j, m2);
          if (j < i && greater)
            rhs += h * evaluate_at_cycle(w_function(s, swap_pair(I, i, j, m1, m2)), s, J);
          if (j > i && !greater)
            rhs -= h * evaluate_at_cycle(w_function(s, swap_pair(I, i, j, m1, m2)), s, J);
        }
    }
    if (!(lhs == rhs)) return false;
  }
  return true;
}

namespace {

using CPoly = std::vector<Cplx>;  // ascending coefficients

CPoly cp_mul(const CPoly& a, const CPoly& b) {
  CPoly out(a.size() + b.size() - 1, Cplx(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Cplx cp_eval(const CPoly& a, Cplx u) {
  Cplx r(0);
  for (std::size_t k = a.size(); k-- > 0;) r = r * u + a[k];
  return r;
}

Cplx cpow_int(Cplx b, int e) {
  Cplx r(1);
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

bool cplx_less(Cplx a, Cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<Cplx> poly_roots(CPoly c) {
  double mx = 0;
  for (Cplx v : c) mx = std::max(mx, std::abs(v));
  if (mx == 0) return {};
  while (c.size() > 1 && std::abs(c.back()) <= 1e-12 * mx) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<Cplx> roots;
  if (d <= 0) return roots;
  if (d == 1) {
    roots = {-c[0] / c[1]};
  } else if (d == 2) {
    Cplx disc = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
    if (std::real(std::conj(c[1]) * disc) < 0) disc = -disc;
    const Cplx qq = -0.5 * (c[1] + disc);
    if (std::abs(qq) > 0)
      roots = {qq / c[2], c[0] / qq};
    else
      roots = {Cplx(0), Cplx(0)};
  } else {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) A(k + 1, k) = 1.0;
    for (int k = 0; k < d; ++k) A(k, d - 1) = -c[std::size_t(k)] / c[std::size_t(d)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
    for (int k = 0; k < d; ++k) roots.push_back(es.eigenvalues()[k]);
  }
  std::sort(roots.begin(), roots.end(), cplx_less);
  return roots;
}

// numeric determinant entries at a fixed u, rows 1..m
Eigen::MatrixXcd det_matrix(const std::vector<std::vector<Cplx>>& gamma,
                            const std::vector<Cplx>& q, Cplx h, int m, Cplx u) {
  Eigen::MatrixXcd a(m, m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      Cplx e = cpow_int(q[std::size_t(i - 1)], j - 1);
      const Cplx base = u - h * double(i - j);
      for (Cplx g : gamma[std::size_t(i - 1)]) e *= base - g;
      a(i - 1, j - 1) = e;
    }
  return a;
}

CPoly det_cpoly(const Shape& s, const std::vector<std::vector<Cplx>>& gamma,
                const std::vector<Cplx>& q, Cplx h, int m) {
  // coefficients recovered from point evaluations of the scalar determinant
  const int deg = s.cum(m);
  const int S = deg + 1;
  Eigen::MatrixXcd V(S, S);
  Eigen::VectorXcd b(S);
  for (int k = 0; k < S; ++k) {
    const Cplx u = 1.5 * std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.29) / S);
    Cplx p(1);
    for (int r = 0; r < S; ++r) {
      V(k, r) = p;
      p *= u;
    }
    b(k) = det_matrix(gamma, q, h, m, u).determinant();
  }
  const Eigen::VectorXcd x = V.colPivHouseholderQr().solve(b);
  CPoly out(static_cast<std::size_t>(S));
  for (int r = 0; r < S; ++r) out[std::size_t(r)] = x(r);
  return out;
}

double point_scale(const std::vector<Cplx>& z, Cplx h) {
  double s = 1.0 + std::abs(h);
  for (Cplx v : z) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

double relation_residual(const Shape& s, const AlgebraPoint& p) {
  const int N = s.N(), n = s.n();
  Cplx vand(1);
  for (int i = 1; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) vand *= p.q[std::size_t(j - 1)] - p.q[std::size_t(i - 1)];
  if (std::abs(vand) == 0) return std::numeric_limits<double>::infinity();
  CPoly det = det_cpoly(s, p.gamma, p.q, p.h, N);
  CPoly target{Cplx(1)};
  for (int a = 1; a <= n; ++a) target = cp_mul(target, CPoly{-p.z[std::size_t(a - 1)], Cplx(1)});
  double worst = 0;
  for (int k = 0; k <= n; ++k) {
    const Cplx lhs = det[std::size_t(k)] / vand;
    const Cplx tgt = target[std::size_t(k)];
    worst = std::max(worst, std::abs(lhs - tgt) / std::max(1.0, std::abs(tgt)));
  }
  return worst;
}

std::vector<std::vector<Cplx>> theta_levels(const Shape& s, const AlgebraPoint& p) {
  const int N = s.N();
  std::vector<std::vector<Cplx>> out;
  for (int m = 1; m < N; ++m) {
    Cplx vand(1);
    for (int i = 1; i <= m; ++i)
      for (int j = i + 1; j <= m; ++j) vand *= p.q[std::size_t(j - 1)] - p.q[std::size_t(i - 1)];
    CPoly det = det_cpoly(s, p.gamma, p.q, p.h, m);
    for (Cplx& v : det) v /= vand;
    std::vector<Cplx> roots = poly_roots(det);
    if (static_cast<int>(roots.size()) != s.cum(m))
      throw SingularSystem("level alphabet degenerated at m=" + std::to_string(m));
    out.push_back(std::move(roots));
  }
  return out;
}

double pieri_residual(const Shape& s, const IndexSet& I, int i, const AlgebraPoint& p,
                      double rel_tol) {
  if (relation_residual(s, p) > rel_tol)
    throw RelationViolated("evaluation point fails the defining relations");
  const int N = s.N(), n = s.n();
  const auto th = theta_levels(s, p);
  std::map<VarId, Cplx> pt;
  for (int lvl = 1; lvl < N; ++lvl)
    for (int a = 1; a <= s.cum(lvl); ++a)
      pt[t_var(lvl, a)] = th[std::size_t(lvl - 1)][std::size_t(a - 1)];
  for (int a = 1; a <= n; ++a) pt[z_var(a)] = p.z[std::size_t(a - 1)];
  pt[h_var()] = p.h;
  auto cls = [&](const IndexSet& K) { return w_function(s, K).eval(pt); };

  const Cplx wI = cls(I);
  Cplx gsum(0);
  for (Cplx g : p.gamma[std::size_t(i - 1)]) gsum += g;
  Cplx zsum(0);
  for (int a : I.blocks[std::size_t(i - 1)]) zsum += p.z[std::size_t(a - 1)];
  const Cplx lhs = (gsum - zsum) * wI;

  Cplx pref(0);
  for (int j = 1; j <= N; ++j) {
    if (j == i) continue;
    pref += (j < i ? p.q[std::size_t(j - 1)] : p.q[std::size_t(i - 1)]) /
            (p.q[std::size_t(i - 1)] - p.q[std::size_t(j - 1)]);
  }
  Cplx rhs = p.h * double(s.part(i)) * pref * wI;
  for (int j = 1; j <= N; ++j) {
    if (j == i) continue;
    const Cplx qfac =
        p.q[std::size_t(i - 1)] / (p.q[std::size_t(i - 1)] - p.q[std::size_t(j - 1)]);
    for (int m1 = 1; m1 <= s.part(i); ++m1)
      for (int m2 = 1; m2 <= s.part(j); ++m2) {
        const Cplx wsw = cls(swap_pair(I, i, j, m1, m2));
        if (I.element(i, m1) < I.element(j, m2)) rhs -= p.h * wsw;
        rhs += p.h * qfac * wsw;
      }
  }
  return std::abs(lhs - rhs);
}

double bae_residual(const Shape& s, const BetheConfig& c,
                    const std::vector<std::vector<Cplx>>& t) {
  const int N = s.N();
  const double tiny = 1e-12 * point_scale(c.z, c.h);
  double worst = 0;
  for (int i = 1; i < N; ++i) {
    const auto& cur = t[std::size_t(i - 1)];
    const std::vector<Cplx>& up = (i + 1 == N) ? c.z : t[std::size_t(i)];
    for (std::size_t j = 0; j < cur.size(); ++j) {
      Cplx lhs(1);
      auto factor = [&](Cplx num, Cplx den) {
        if (std::abs(den) < tiny) {
          lhs = Cplx(std::numeric_limits<double>::infinity(), 0);
          return;
        }
        lhs *= num / den;
      };
      if (i >= 2)
        for (Cplx v : t[std::size_t(i - 2)]) factor(v - cur[j] - c.h, v - cur[j]);
      for (Cplx v : up) factor(cur[j] - v, cur[j] - v - c.h);
      for (std::size_t k = 0; k < cur.size(); ++k)
        if (k != j) factor(cur[j] - cur[k] - c.h, cur[j] - cur[k] + c.h);
      if (std::isinf(lhs.real())) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(lhs - c.q[std::size_t(i)] / c.q[std::size_t(i - 1)]));
    }
  }
  return worst;
}

namespace {

// denominator-cleared equations: q_i A - q_{i+1} B per level variable
std::vector<Cplx> bae_cleared(const Shape& s, const std::vector<Cplx>& q,
                              const std::vector<Cplx>& z, Cplx h,
                              const std::vector<std::vector<Cplx>>& t) {
  const int N = s.N();
  std::vector<Cplx> F;
  for (int i = 1; i < N; ++i) {
    const auto& cur = t[std::size_t(i - 1)];
    const std::vector<Cplx>& up = (i + 1 == N) ? z : t[std::size_t(i)];
    for (std::size_t j = 0; j < cur.size(); ++j) {
      Cplx A(1), B(1);
      if (i >= 2)
        for (Cplx v : t[std::size_t(i - 2)]) {
          A *= v - cur[j] - h;
          B *= v - cur[j];
        }
      for (Cplx v : up) {
        A *= cur[j] - v;
        B *= cur[j] - v - h;
      }
      for (std::size_t k = 0; k < cur.size(); ++k)
        if (k != j) {
          A *= cur[j] - cur[k] - h;
          B *= cur[j] - cur[k] + h;
        }
      F.push_back(q[std::size_t(i - 1)] * A - q[std::size_t(i)] * B);
    }
  }
  return F;
}

void newton_refine(const Shape& s, const std::vector<Cplx>& q, const std::vector<Cplx>& z, Cplx h,
                   std::vector<std::vector<Cplx>>& t) {
  const int N = s.N();
  int dim = 0;
  for (int i = 1; i < N; ++i) dim += s.cum(i);
  if (dim == 0) return;
  auto unpack = [&](const Eigen::VectorXcd& x) {
    std::vector<std::vector<Cplx>> tt(std::size_t(N - 1));
    int p = 0;
    for (int i = 1; i < N; ++i) {
      tt[std::size_t(i - 1)].resize(std::size_t(s.cum(i)));
      for (Cplx& v : tt[std::size_t(i - 1)]) v = x(p++);
    }
    return tt;
  };
  auto fvec = [&](const Eigen::VectorXcd& x) {
    const auto F = bae_cleared(s, q, z, h, unpack(x));
    Eigen::VectorXcd f(dim);
    for (int k = 0; k < dim; ++k) f(k) = F[std::size_t(k)];
    return f;
  };
  Eigen::VectorXcd x(dim);
  {
    int p = 0;
    for (const auto& lvl : t)
      for (Cplx v : lvl) x(p++) = v;
  }
  for (int it = 0; it < 80; ++it) {
    const Eigen::VectorXcd f = fvec(x);
    const double fn = f.norm();
    if (fn == 0) break;
    Eigen::MatrixXcd J(dim, dim);
    for (int v = 0; v < dim; ++v) {
      const double dv = 1e-7 * (1.0 + std::abs(x(v)));
      Eigen::VectorXcd xp = x, xm = x;
      xp(v) += dv;
      xm(v) -= dv;
      J.col(v) = (fvec(xp) - fvec(xm)) / (2.0 * dv);
    }
    const Eigen::VectorXcd dx = J.colPivHouseholderQr().solve(-f);
    bool improved = false;
    double alpha = 1.0;
    Eigen::VectorXcd xn = x;
    for (int ls = 0; ls < 12; ++ls, alpha *= 0.5) {
      xn = x + alpha * dx;
      if (fvec(xn).norm() < fn) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    const double step = (xn - x).norm();
    x = xn;
    if (step < 1e-14 * (1.0 + x.norm())) break;
  }
  t = unpack(x);
}

bool root_less(const std::vector<std::vector<Cplx>>& a, const std::vector<std::vector<Cplx>>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (a[i][j].real() != b[i][j].real()) return a[i][j].real() < b[i][j].real();
      if (a[i][j].imag() != b[i][j].imag()) return a[i][j].imag() < b[i][j].imag();
    }
  return false;
}

// per-level greedy matching, insensitive to the order within a level
double root_distance(const std::vector<std::vector<Cplx>>& a,
                     const std::vector<std::vector<Cplx>>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<bool> used(b[i].size(), false);
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t at = 0;
      for (std::size_t k = 0; k < b[i].size(); ++k) {
        if (used[k]) continue;
        const double d = std::abs(a[i][j] - b[i][k]);
        if (d < best) {
          best = d;
          at = k;
        }
      }
      if (!b[i].empty()) used[at] = true;
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace

std::vector<BetheRoot> bethe_solve(const Shape& s, const BetheConfig& c) {
  const int N = s.N(), n = s.n();
  if (static_cast<int>(c.z.size()) != n || static_cast<int>(c.q.size()) != N)
    throw std::invalid_argument("bethe_solve: parameter count mismatch");
  const double scale = point_scale(c.z, c.h);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::abs(c.z[std::size_t(a)] - c.z[std::size_t(b)]) < 1e-8 * scale)
        throw std::invalid_argument("bethe_solve: coincident z values");
  if (std::abs(c.h) < 1e-8 * scale) throw std::invalid_argument("bethe_solve: h too close to 0");
  for (int i = 0; i < N; ++i) {
    if (std::abs(c.q[std::size_t(i)]) == 0)
      throw std::invalid_argument("bethe_solve: zero q value");
    for (int j = i + 1; j < N; ++j)
      if (std::abs(c.q[std::size_t(i)] - c.q[std::size_t(j)]) <
          1e-10 * (std::abs(c.q[std::size_t(i)]) + std::abs(c.q[std::size_t(j)])))
        throw std::invalid_argument("bethe_solve: coincident q values");
  }

  std::vector<std::vector<std::vector<Cplx>>> cands;
  if (N == 1) return {BetheRoot{{}, 0.0}};

  if (N == 2 && s.part(1) == 1) {
    // single variable: prod (t - z_a) - (q_2/q_1) prod (t - z_a - h) = 0
    const Cplx rho = c.q[1] / c.q[0];
    CPoly g{Cplx(1)}, gh{Cplx(1)};
    for (int a = 1; a <= n; ++a) {
      g = cp_mul(g, CPoly{-c.z[std::size_t(a - 1)], Cplx(1)});
      gh = cp_mul(gh, CPoly{-c.z[std::size_t(a - 1)] - c.h, Cplx(1)});
    }
    for (std::size_t k = 0; k < g.size(); ++k) g[k] -= rho * gh[k];
    for (Cplx r : poly_roots(g)) cands.push_back({{r}});
  } else if (N == 2 && s.part(1) == 2) {
    // level-1 pair: the first equation is linear in the partner variable
    const Cplx q1 = c.q[0], q2 = c.q[1];
    CPoly P{Cplx(1)}, Ph{Cplx(1)};
    for (int a = 1; a <= n; ++a) {
      P = cp_mul(P, CPoly{-c.z[std::size_t(a - 1)], Cplx(1)});
      Ph = cp_mul(Ph, CPoly{-c.z[std::size_t(a - 1)] - c.h, Cplx(1)});
    }
    CPoly C(P.size(), Cplx(0)), D;
    for (std::size_t k = 0; k < P.size(); ++k) C[k] = -(q1 * P[k] - q2 * Ph[k]);
    D = cp_mul(P, CPoly{-c.h, Cplx(1)});
    for (Cplx& v : D) v *= q1;
    CPoly D2 = cp_mul(Ph, CPoly{c.h, Cplx(1)});
    D.resize(std::max(D.size(), D2.size()), Cplx(0));
    for (std::size_t k = 0; k < D2.size(); ++k) D[k] -= q2 * D2[k];
    // substitute t_2 = -D/C into the second equation, cleared by C^{n+1}
    auto lin = [&](Cplx w) {  // D + C w
      CPoly out = D;
      out.resize(std::max(out.size(), C.size()), Cplx(0));
      for (std::size_t k = 0; k < C.size(); ++k) out[k] += C[k] * w;
      return out;
    };
    auto lin_shift = [&](Cplx off) {  // D + C (t_1 + off)
      CPoly out = cp_mul(C, CPoly{off, Cplx(1)});
      out.resize(std::max(out.size(), D.size()), Cplx(0));
      for (std::size_t k = 0; k < D.size(); ++k) out[k] += D[k];
      return out;
    };
    CPoly t1{Cplx(1)}, t2{Cplx(1)};
    for (int a = 1; a <= n; ++a) {
      t1 = cp_mul(t1, lin(c.z[std::size_t(a - 1)]));
      t2 = cp_mul(t2, lin(c.z[std::size_t(a - 1)] + c.h));
    }
    t1 = cp_mul(t1, lin_shift(c.h));
    t2 = cp_mul(t2, lin_shift(-c.h));
    CPoly R(std::max(t1.size(), t2.size()), Cplx(0));
    for (std::size_t k = 0; k < t1.size(); ++k) R[k] += q1 * t1[k];
    for (std::size_t k = 0; k < t2.size(); ++k) R[k] -= q2 * t2[k];
    for (Cplx r1 : poly_roots(R)) {
      const Cplx cv = cp_eval(C, r1);
      if (std::abs(cv) < 1e-10 * scale) continue;
      cands.push_back({{r1, -cp_eval(D, r1) / cv}});
    }
  }

  // anchor continuation: seed each chain at its small-ratio limit, where the
  // level alphabets collapse onto nested z subsets, then walk q back in log space
  int tried = 0;
  const auto basis = enumerate_index_sets(s);
  auto run_homotopy = [&](double delta, int steps) {
    for (const IndexSet& J : basis) {
      std::vector<std::vector<Cplx>> t(std::size_t(N - 1));
      for (int lvl = 1; lvl < N; ++lvl) {
        const auto pre = J.union_prefix(lvl);
        for (std::size_t a = 0; a < pre.size(); ++a)
          t[std::size_t(lvl - 1)].push_back(
              c.z[std::size_t(pre[a] - 1)] +
              1e-4 * scale * std::polar(1.0, 2.2 * double(a + 1) + 0.7 * lvl));
      }
      ++tried;
      const double ld = std::log(delta);
      for (int step = 0; step <= steps; ++step) {
        const double f = double(step) / steps;
        std::vector<Cplx> qs(static_cast<std::size_t>(N));
        for (int i = 1; i <= N; ++i)
          qs[std::size_t(i - 1)] =
              std::exp(f * std::log(c.q[std::size_t(i - 1)]) + (1.0 - f) * double(i - 1) * ld);
        newton_refine(s, qs, c.z, c.h, t);
      }
      cands.push_back(std::move(t));
    }
  };

  auto harvest = [&]() {
    std::vector<BetheRoot> out;
    for (auto t : cands) {
      newton_refine(s, c.q, c.z, c.h, t);
      for (auto& lvl : t) std::sort(lvl.begin(), lvl.end(), cplx_less);
      const double r = bae_residual(s, c, t);
      if (!(r < c.tol)) continue;
      bool bad = false;
      for (const auto& lvl : t)
        for (std::size_t a = 0; a < lvl.size(); ++a)
          for (std::size_t b = a + 1; b < lvl.size(); ++b)
            if (std::abs(lvl[a] - lvl[b]) < 1e-7 * scale) bad = true;
      if (bad) continue;
      bool dup = false;
      for (const BetheRoot& o : out)
        if (root_distance(t, o.t) < 1e-6 * scale) dup = true;
      if (!dup) out.push_back(BetheRoot{std::move(t), r});
    }
    std::sort(out.begin(), out.end(),
              [](const BetheRoot& a, const BetheRoot& b) { return root_less(a.t, b.t); });
    return out;
  };

  std::vector<BetheRoot> out = harvest();
  if (static_cast<long>(out.size()) < s.basis_size()) {
    run_homotopy(1e-2, 12);
    out = harvest();
  }
  if (static_cast<long>(out.size()) < s.basis_size()) {
    run_homotopy(1e-3, 24);
    out = harvest();
  }
  if (static_cast<long>(out.size()) < s.basis_size()) {
    // deterministic random restarts pick up basins the continuation merged
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> box(-1.6, 1.6);
    for (int attempt = 0; attempt < 240; ++attempt) {
      std::vector<std::vector<Cplx>> t(std::size_t(N - 1));
      for (int lvl = 1; lvl < N; ++lvl)
        for (int a = 0; a < s.cum(lvl); ++a)
          t[std::size_t(lvl - 1)].push_back(scale * Cplx(box(rng), 0.4 * box(rng)));
      newton_refine(s, c.q, c.z, c.h, t);
      cands.push_back(std::move(t));
    }
    out = harvest();
  }
  if (out.empty())
    throw NoConvergence("bethe_solve: no root met the tolerance after " + std::to_string(tried) +
                        " continuation seeds");
  return out;
}

GammaSolution gamma_from_bethe(const Shape& s, const BetheConfig& c, const BetheRoot& root) {
  const int N = s.N(), n = s.n();
  double scale = point_scale(c.z, c.h);
  for (const auto& lvl : root.t)
    for (Cplx v : lvl) scale = std::max(scale, std::abs(v));

  // exponent convention q_i^{m-j} with the Vandermonde prod_{i<j} (q_i - q_j)
  std::vector<CPoly> P(std::size_t(N + 1));
  auto entry = [&](int i, int j, int m, Cplx u) {
    return cpow_int(c.q[std::size_t(i - 1)], m - j) *
           cp_eval(P[std::size_t(i)], u - c.h * double(i - j));
  };
  auto rhs_poly = [&](int m) {
    Cplx vand(1);
    for (int i = 1; i <= m; ++i)
      for (int j = i + 1; j <= m; ++j) vand *= c.q[std::size_t(i - 1)] - c.q[std::size_t(j - 1)];
    CPoly out{vand};
    const std::vector<Cplx>& w = (m < N) ? root.t[std::size_t(m - 1)] : c.z;
    for (Cplx v : w) out = cp_mul(out, CPoly{-v, Cplx(1)});
    return out;
  };

  for (int m = 1; m <= N; ++m) {
    const int lm = s.part(m);
    if (lm == 0) {
      P[std::size_t(m)] = CPoly{Cplx(1)};
      continue;
    }
    const CPoly rhs = rhs_poly(m);
    const int S = s.cum(m) + 2;
    const double R = 2.0 * scale + 1.0;
    auto minor_det = [&](int j, Cplx u) -> Cplx {
      if (m == 1) return Cplx(1);
      Eigen::MatrixXcd a(m - 1, m - 1);
      for (int r = 1; r < m; ++r) {
        int cc = 0;
        for (int col = 1; col <= m; ++col) {
          if (col == j) continue;
          a(r - 1, cc++) = entry(r, col, m, u);
        }
      }
      return a.determinant();
    };
    Eigen::MatrixXcd A(S, lm);
    Eigen::VectorXcd b(S);
    for (int k = 0; k < S; ++k) {
      const Cplx u = R * std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.37) / S);
      Cplx known(0);
      std::vector<Cplx> col(std::size_t(lm), Cplx(0));
      for (int j = 1; j <= m; ++j) {
        const double sgn = ((m + j) % 2 == 0) ? 1.0 : -1.0;
        const Cplx base = sgn * cpow_int(c.q[std::size_t(m - 1)], m - j) * minor_det(j, u);
        const Cplx v = u - c.h * double(m - j);
        known += base * cpow_int(v, lm);
        Cplx p(1);
        for (int r = 0; r < lm; ++r) {
          col[std::size_t(r)] += base * p;
          p *= v;
        }
      }
      for (int r = 0; r < lm; ++r) A(k, r) = col[std::size_t(r)];
      b(k) = cp_eval(rhs, u) - known;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    if (qr.rank() < lm)
      throw SingularSystem("gamma_from_bethe: rank-deficient solve at level " + std::to_string(m));
    const Eigen::VectorXcd x = qr.solve(b);
    CPoly pm(std::size_t(lm + 1));
    for (int r = 0; r < lm; ++r) pm[std::size_t(r)] = x(r);
    pm[std::size_t(lm)] = Cplx(1);
    P[std::size_t(m)] = std::move(pm);
  }

  double resid = 0;
  for (int m = 1; m <= N; ++m) {
    const CPoly rhs = rhs_poly(m);
    const int S = s.cum(m) + 3;
    for (int k = 0; k < S; ++k) {
      const Cplx u =
          (2.0 * scale + 1.7) * std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.11) / S);
      Eigen::MatrixXcd a(m, m);
      for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) a(i - 1, j - 1) = entry(i, j, m, u);
      const Cplx rv = cp_eval(rhs, u);
      resid = std::max(resid, std::abs(a.determinant() - rv) / std::max(1.0, std::abs(rv)));
    }
  }

  GammaSolution out;
  out.residual = resid;
  out.point.z = c.z;
  out.point.h = c.h;
  out.point.q.resize(std::size_t(N));
  for (int i = 1; i <= N; ++i) out.point.q[std::size_t(i - 1)] = Cplx(1) / c.q[std::size_t(i - 1)];
  out.point.gamma.resize(std::size_t(N));
  for (int i = 1; i <= N; ++i) {
    out.point.gamma[std::size_t(i - 1)] = poly_roots(P[std::size_t(i)]);
    if (static_cast<int>(out.point.gamma[std::size_t(i - 1)].size()) != s.part(i))
      throw SingularSystem("gamma_from_bethe: degenerate row polynomial at level " +
                           std::to_string(i));
  }
  return out;
}

double d_combination_residual(const Shape& s, const IndexSet& I, int i, const BetheConfig& c,
                              const BetheRoot& root) {
  const RatFun D = d_combination(s, I, i);
  std::map<VarId, Cplx> pt;
  for (int lvl = 1; lvl < s.N(); ++lvl)
    for (int a = 1; a <= s.cum(lvl); ++a)
      pt[t_var(lvl, a)] = root.t[std::size_t(lvl - 1)][std::size_t(a - 1)];
  for (int a = 1; a <= s.n(); ++a) pt[z_var(a)] = c.z[std::size_t(a - 1)];
  pt[h_var()] = c.h;
  for (int k = 1; k <= s.N(); ++k) pt[q_var(k)] = c.q[std::size_t(k - 1)];
  return std::abs(D.eval(pt));
}

}  // namespace qde
