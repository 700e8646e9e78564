#include "qde/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qde {

namespace {

Poly hh() { return Poly::var(h_var()); }
Poly qq(int i) { return Poly::var(q_var(i)); }
Poly zz(int a) { return Poly::var(z_var(a)); }

}  // namespace

WeightModule::WeightModule(const Shape& shape) : s(shape), basis(enumerate_index_sets(shape)) {
  for (int k = 0; k < static_cast<int>(basis.size()); ++k)
    pos_[basis[static_cast<std::size_t>(k)].word()] = k;
}

int WeightModule::idx(const std::vector<int>& word) const {
  auto it = pos_.find(word);
  if (it == pos_.end()) throw std::out_of_range("WeightModule::idx");
  return it->second;
}

Poly kappa_sym() { return Poly::var(aux_var(0)); }

Mat<RatFun> x_hamiltonian(const WeightModule& m, int i) {
  const int d = m.dim();
  const int n = m.s.n();
  Mat<RatFun> M(d, d);
  for (int c = 0; c < d; ++c) {
    const std::vector<int> w = m.basis[static_cast<std::size_t>(c)].word();
    Poly diag;
    for (int a = 1; a <= n; ++a)
      if (w[static_cast<std::size_t>(a - 1)] == i) diag += zz(a);
    const long li = m.s.part(i);
    diag -= hh() * Rat(li * (1 - li), 2);
    M.at(c, c) += RatFun(diag);
    // sum_{a<b} sum_k e^{(a)}_{ik} e^{(b)}_{ki}
    for (int b = 2; b <= n; ++b) {
      if (w[static_cast<std::size_t>(b - 1)] != i) continue;
      for (int a = 1; a < b; ++a) {
        std::vector<int> w2 = w;
        w2[static_cast<std::size_t>(a - 1)] = i;
        w2[static_cast<std::size_t>(b - 1)] = w[static_cast<std::size_t>(a - 1)];
        M.at(m.idx(w2), c) -= RatFun(hh());
      }
    }
    // sum_{j!=i} q_j/(q_i-q_j) (eta_ij eta_ji - eta_ii); the diagonal of
    // eta_ij eta_ji cancels eta_ii exactly, leaving genuine letter exchanges
    for (int j = 1; j <= m.s.N(); ++j) {
      if (j == i) continue;
      const RatFun coef = RatFun::quotient(hh() * qq(j), {qq(i) - qq(j)});
      for (int b = 1; b <= n; ++b) {
        if (w[static_cast<std::size_t>(b - 1)] != i) continue;
        for (int a = 1; a <= n; ++a) {
          if (a == b || w[static_cast<std::size_t>(a - 1)] != j) continue;
          std::vector<int> w2 = w;
          w2[static_cast<std::size_t>(b - 1)] = j;
          w2[static_cast<std::size_t>(a - 1)] = i;
          M.at(m.idx(w2), c) -= coef;
        }
      }
    }
  }
  return M;
}

Mat<RatFun> x_hamiltonian_modified(const WeightModule& m, int i) {
  Mat<RatFun> M = x_hamiltonian(m, i);
  RatFun shift;
  for (int j = 1; j <= m.s.N(); ++j) {
    if (j == i) continue;
    const long mn = std::min(m.s.part(i), m.s.part(j));
    const Poly top = j < i ? qq(i) : qq(j);
    shift += RatFun::quotient(hh() * top * Rat(mn), {qq(i) - qq(j)});
  }
  for (int c = 0; c < m.dim(); ++c) M.at(c, c) -= shift;
  return M;
}

Mat<RatFun> r_check(const WeightModule& m, int a, int b, const Poly& u) {
  const int d = m.dim();
  const Poly den = u - hh();
  Mat<RatFun> M(d, d);
  for (int c = 0; c < d; ++c) {
    std::vector<int> w = m.basis[static_cast<std::size_t>(c)].word();
    M.at(c, c) += RatFun::quotient(u, {den});
    std::swap(w[static_cast<std::size_t>(a - 1)], w[static_cast<std::size_t>(b - 1)]);
    M.at(m.idx(w), c) -= RatFun::quotient(hh(), {den});
  }
  return M;
}

Mat<RatFun> qkz_shifted_part(const WeightModule& m, int a) {
  Mat<RatFun> M = Mat<RatFun>::identity(m.dim(), RatFun(1L));
  for (int b = a - 1; b >= 1; --b) M = M * r_check(m, a, b, zz(a) - zz(b) + kappa_sym());
  return M;
}

Mat<RatFun> qkz_plain_part(const WeightModule& m, int a) {
  Mat<RatFun> M = Mat<RatFun>::identity(m.dim(), RatFun(1L));
  for (int b = m.s.n(); b >= a + 1; --b) M = M * r_check(m, a, b, zz(a) - zz(b));
  return M;
}

Mat<RatFun> q_diagonal(const WeightModule& m, int a) {
  Mat<RatFun> M(m.dim(), m.dim());
  for (int c = 0; c < m.dim(); ++c) {
    int letter = m.basis[static_cast<std::size_t>(c)].block_of(a);
    M.at(c, c) = RatFun(qq(letter));
  }
  return M;
}

Mat<RatFun> q_diagonal_projected(const WeightModule& m, int a, int i) {
  Mat<RatFun> M(m.dim(), m.dim());
  for (int c = 0; c < m.dim(); ++c)
    if (m.basis[static_cast<std::size_t>(c)].block_of(a) == i) M.at(c, c) = RatFun(qq(i));
  return M;
}

Mat<RatFun> qkz_operator(const WeightModule& m, int a) {
  return qkz_shifted_part(m, a) * q_diagonal(m, a) * qkz_plain_part(m, a);
}

Mat<Cplx> eval_matrix(const Mat<RatFun>& m, const std::map<VarId, Cplx>& point) {
  return m.map([&point](const RatFun& f) { return f.eval(point); });
}

bool check_x_commuting(const WeightModule& m) {
  std::vector<Mat<RatFun>> xs;
  for (int i = 1; i <= m.s.N(); ++i) xs.push_back(x_hamiltonian(m, i));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (!(xs[i] * xs[j] == xs[j] * xs[i])) return false;
  return true;
}

bool check_r_unitarity(const WeightModule& m) {
  if (m.s.n() < 2) return true;
  const Mat<RatFun> id = Mat<RatFun>::identity(m.dim(), RatFun(1L));
  const Poly u = Poly::var(aux_var(1));
  for (int a = 1; a <= m.s.n(); ++a)
    for (int b = a + 1; b <= m.s.n(); ++b)
      if (!(r_check(m, a, b, u) * r_check(m, a, b, -u) == id)) return false;
  return true;
}

bool check_qkz_flatness(const WeightModule& m) {
  const int n = m.s.n();
  std::vector<Mat<RatFun>> ks;
  for (int a = 1; a <= n; ++a) ks.push_back(qkz_operator(m, a));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      std::map<VarId, Poly> shift_j{{z_var(j), zz(j) + kappa_sym()}};
      std::map<VarId, Poly> shift_i{{z_var(i), zz(i) + kappa_sym()}};
      auto lhs = ks[static_cast<std::size_t>(i - 1)].map(
                     [&](const RatFun& f) { return f.substitute(shift_j); }) *
                 ks[static_cast<std::size_t>(j - 1)];
      auto rhs = ks[static_cast<std::size_t>(j - 1)].map(
                     [&](const RatFun& f) { return f.substitute(shift_i); }) *
                 ks[static_cast<std::size_t>(i - 1)];
      if (!(lhs == rhs)) return false;
    }
  return true;
}

double mixed_compatibility_residual(const WeightModule& m, std::uint64_t seed, int points) {
  const int n = m.s.n();
  const int N = m.s.N();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto draw = [&] { return Cplx(U(rng), U(rng)); };

  std::vector<Mat<RatFun>> xs, lefts, rights, qdiags;
  std::vector<std::vector<Mat<RatFun>>> proj(static_cast<std::size_t>(n));
  for (int i = 1; i <= N; ++i) xs.push_back(x_hamiltonian(m, i));
  for (int a = 1; a <= n; ++a) {
    lefts.push_back(qkz_shifted_part(m, a));
    rights.push_back(qkz_plain_part(m, a));
    qdiags.push_back(q_diagonal(m, a));
    for (int i = 1; i <= N; ++i)
      proj[static_cast<std::size_t>(a - 1)].push_back(q_diagonal_projected(m, a, i));
  }

  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    std::map<VarId, Cplx> pt;
    // keep every linear denominator bounded away from zero
    while (true) {
      pt.clear();
      pt[h_var()] = 2.0 * draw();
      pt[aux_var(0)] = 2.0 * draw();
      for (int a = 1; a <= n; ++a) pt[z_var(a)] = 2.0 * draw();
      for (int i = 1; i <= N; ++i) pt[q_var(i)] = draw();
      bool ok = true;
      for (int i = 1; i <= N && ok; ++i)
        for (int j = i + 1; j <= N && ok; ++j)
          ok = std::abs(pt[q_var(i)] - pt[q_var(j)]) > 0.2;
      for (int a = 1; a <= n && ok; ++a)
        for (int b = 1; b <= n && ok; ++b) {
          if (a == b) continue;
          Cplx diff = pt[z_var(a)] - pt[z_var(b)];
          ok = std::abs(diff - pt[h_var()]) > 0.2 &&
               std::abs(diff + pt[aux_var(0)] - pt[h_var()]) > 0.2;
        }
      if (ok) break;
    }

    for (int a = 1; a <= n; ++a) {
      std::map<VarId, Cplx> shifted = pt;
      shifted[z_var(a)] += pt[aux_var(0)];
      Mat<Cplx> L = eval_matrix(lefts[static_cast<std::size_t>(a - 1)], pt);
      Mat<Cplx> R = eval_matrix(rights[static_cast<std::size_t>(a - 1)], pt);
      Mat<Cplx> Q = eval_matrix(qdiags[static_cast<std::size_t>(a - 1)], pt);
      Mat<Cplx> K = L * Q * R;
      for (int i = 1; i <= N; ++i) {
        Mat<Cplx> Xs = eval_matrix(xs[static_cast<std::size_t>(i - 1)], shifted);
        Mat<Cplx> X0 = eval_matrix(xs[static_cast<std::size_t>(i - 1)], pt);
        Mat<Cplx> P =
            eval_matrix(proj[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(i - 1)], pt);
        Mat<Cplx> res = Xs * K - K * X0 - (L * P * R).map([&](const Cplx& v) {
                          return v * pt[aux_var(0)];
                        });
        for (int r = 0; r < m.dim(); ++r)
          for (int c = 0; c < m.dim(); ++c) worst = std::max(worst, std::abs(res.at(r, c)));
      }
    }
  }
  return worst;
}

}  // namespace qde
