#include "qde/weight_functions.hpp"

#include <stdexcept>

namespace qde {

namespace {

Poly tv(const Shape& s, int j, int a) {
  return j == s.N() ? Poly::var(z_var(a)) : Poly::var(t_var(j, a));
}

Poly hh() { return Poly::var(h_var()); }

// flattened gamma alphabet: position a -> gamma[block][slot]
VarId flat_gamma(const Shape& s, int a) {
  int rest = a;
  for (int i = 1; i <= s.N(); ++i) {
    if (rest <= s.part(i)) return gamma_var(i, rest);
    rest -= s.part(i);
  }
  throw std::out_of_range("flat_gamma");
}

enum class KernelKind { plain, script };

// Shared nested-product kernel. `script` puts -h on pairs where the lower
// level element is smaller and orients same-level ratios as (t_a - t_b);
// `plain` is the mirror convention.
RatFun kernel(const Shape& s, const IndexSet& I, KernelKind kind) {
  if (s.level_sum() > 8) throw std::invalid_argument("kernel: level variable budget exceeded");
  RatFun out{Poly(1L)};
  for (int j = 1; j < s.N(); ++j) {
    auto up = I.union_prefix(j);
    auto dn = I.union_prefix(j + 1);
    for (int a = 1; a <= static_cast<int>(up.size()); ++a) {
      int e = up[static_cast<std::size_t>(a - 1)];
      Poly ta = tv(s, j, a);
      for (int c = 1; c <= static_cast<int>(dn.size()); ++c) {
        int d = dn[static_cast<std::size_t>(c - 1)];
        if (d == e) continue;
        Poly f = ta - tv(s, j + 1, c);
        bool with_h = (kind == KernelKind::script) ? (d < e) : (d > e);
        if (with_h) f -= hh();
        out *= RatFun(f);
      }
      for (int b = a + 1; b <= static_cast<int>(up.size()); ++b) {
        Poly tb = tv(s, j, b);
        if (kind == KernelKind::script) {
          out *= RatFun(ta - tb - hh());
          out = out.over(ta - tb);
        } else {
          out *= RatFun(tb - ta - hh());
          out = out.over(tb - ta);
        }
      }
    }
  }
  return out;
}

}  // namespace

Poly level_var(const Shape& s, int j, int a) { return tv(s, j, a); }

std::vector<std::vector<VarId>> level_groups(const Shape& s) {
  std::vector<std::vector<VarId>> groups;
  for (int j = 1; j < s.N(); ++j) {
    std::vector<VarId> g;
    for (int a = 1; a <= s.cum(j); ++a) g.push_back(t_var(j, a));
    groups.push_back(g);
  }
  return groups;
}

RatFun u_kernel(const Shape& s, const IndexSet& I) { return kernel(s, I, KernelKind::plain); }

RatFun script_u_kernel(const Shape& s, const IndexSet& I) {
  return kernel(s, I, KernelKind::script);
}

Poly w_function(const Shape& s, const IndexSet& I) {
  return symmetrize(u_kernel(s, I), level_groups(s)).as_poly();
}

Poly script_w(const Shape& s, const IndexSet& I) {
  RatFun sym = symmetrize(script_u_kernel(s, I), level_groups(s));
  Poly pre = (-hh()).pow(s.level_sum());
  return (RatFun(pre) * sym).as_poly();
}

Poly script_w_twisted(const Shape& s, const Perm& sigma, const IndexSet& I) {
  Poly base = script_w(s, apply_perm(sigma.inverse(), I));
  std::map<VarId, VarId> ren;
  for (int a = 1; a <= s.n(); ++a) ren[z_var(a)] = z_var(sigma(a));
  return base.relabel(ren);
}

RatFun s_operator(int i, const Poly& f) {
  std::map<VarId, VarId> swap_z{{z_var(i), z_var(i + 1)}, {z_var(i + 1), z_var(i)}};
  Poly zi = Poly::var(z_var(i)), zj = Poly::var(z_var(i + 1));
  Poly num = (zi - zj - hh()) * f.relabel(swap_z) + hh() * f;
  return RatFun::quotient(num, {zi - zj});
}

RatFun s_operator(int i, const RatFun& f) {
  std::map<VarId, VarId> swap_z{{z_var(i), z_var(i + 1)}, {z_var(i + 1), z_var(i)}};
  Poly zi = Poly::var(z_var(i)), zj = Poly::var(z_var(i + 1));
  RatFun out = RatFun(zi - zj - hh()) * f.relabel(swap_z) + RatFun(hh()) * f;
  return out.over(zi - zj);
}

std::map<VarId, Poly> cycle_substitution(const Shape& s, const IndexSet& J) {
  std::map<VarId, Poly> sub;
  for (int j = 1; j < s.N(); ++j) {
    auto up = J.union_prefix(j);
    for (int a = 1; a <= static_cast<int>(up.size()); ++a)
      sub[t_var(j, a)] = Poly::var(z_var(up[static_cast<std::size_t>(a - 1)]));
  }
  return sub;
}

std::map<VarId, Poly> theta_substitution(const Shape& s, const IndexSet& J) {
  std::map<VarId, Poly> sub;
  for (int j = 1; j < s.N(); ++j) {
    auto up = J.union_prefix(j);
    for (int a = 1; a <= static_cast<int>(up.size()); ++a)
      sub[theta_var(j, a)] = Poly::var(z_var(up[static_cast<std::size_t>(a - 1)]));
  }
  return sub;
}

std::map<VarId, Poly> gamma_substitution(const Shape& s, const IndexSet& K) {
  std::map<VarId, Poly> sub;
  for (int i = 1; i <= s.N(); ++i) {
    const auto& b = K.blocks.at(static_cast<std::size_t>(i - 1));
    for (int a = 1; a <= static_cast<int>(b.size()); ++a)
      sub[gamma_var(i, a)] = Poly::var(z_var(b[static_cast<std::size_t>(a - 1)]));
  }
  return sub;
}

Poly evaluate_at_cycle(const Poly& f, const Shape& s, const IndexSet& J) {
  for (int j = 1; j < s.N(); ++j) {
    for (int a = 1; a < s.cum(j); ++a) {
      std::map<VarId, VarId> swp{{t_var(j, a), t_var(j, a + 1)}, {t_var(j, a + 1), t_var(j, a)}};
      if (!(f.relabel(swp) == f))
        throw std::invalid_argument("evaluate_at_cycle: input not symmetric per level");
    }
  }
  return f.substitute(cycle_substitution(s, J));
}

Poly class_q(const Shape& s) {
  Poly out(1L);
  for (int i = 1; i <= s.N(); ++i)
    for (int j = i + 1; j <= s.N(); ++j)
      for (int a = 1; a <= s.part(i); ++a)
        for (int b = 1; b <= s.part(j); ++b)
          out *= Poly::var(gamma_var(i, a)) - Poly::var(gamma_var(j, b)) - hh();
  return out;
}

Poly class_r(const Shape& s) {
  Poly out(1L);
  for (int i = 1; i <= s.N(); ++i)
    for (int j = i + 1; j <= s.N(); ++j)
      for (int a = 1; a <= s.part(i); ++a)
        for (int b = 1; b <= s.part(j); ++b)
          out *= Poly::var(gamma_var(i, a)) - Poly::var(gamma_var(j, b));
  return out;
}

Poly class_c(const Shape& s) {
  Poly out(1L);
  for (const Poly& f : class_c_factors(s)) out *= f;
  return out;
}

std::vector<Poly> class_c_factors(const Shape& s) {
  std::vector<Poly> fs;
  for (int i = 1; i < s.N(); ++i)
    for (int a = 1; a <= s.cum(i); ++a)
      for (int b = 1; b <= s.cum(i); ++b)
        fs.push_back(Poly::var(theta_var(i, a)) - Poly::var(theta_var(i, b)) - hh());
  return fs;
}

std::vector<Poly> class_c_factors_at(const Shape& s, const IndexSet& J) {
  auto sub = theta_substitution(s, J);
  std::vector<Poly> fs;
  for (const Poly& f : class_c_factors(s)) fs.push_back(f.substitute(sub));
  return fs;
}

Poly class_r_i(const Shape& s, const IndexSet& I) {
  Poly out(1L);
  for (int i = 1; i <= s.N(); ++i)
    for (int j = i + 1; j <= s.N(); ++j)
      for (int a = 1; a <= s.part(i); ++a)
        for (int b : I.blocks.at(static_cast<std::size_t>(j - 1)))
          out *= Poly::var(gamma_var(i, a)) - Poly::var(z_var(b));
  return out;
}

Poly w_hat(const Shape& s) {
  // script kernel of Imin with the deepest alphabet renamed to flattened gamma
  RatFun k = script_u_kernel(s, imin(s));
  std::map<VarId, VarId> ren;
  for (int a = 1; a <= s.n(); ++a) ren[z_var(a)] = flat_gamma(s, a);
  RatFun sym = symmetrize(k.relabel(ren), level_groups(s));
  return sym.as_poly();
}

Poly w_hat_flag(const Shape& s) {
  Poly out(1L);
  for (int i = 1; i < s.N(); ++i)
    for (int a = 1; a <= s.cum(i); ++a)
      for (int b = s.cum(i) + 1; b <= s.cum(i + 1); ++b)
        out *= Poly::var(t_var(i, a)) - Poly::var(flat_gamma(s, b));
  return out;
}

std::vector<std::vector<RatFun>> stable_envelope(const Shape& s) {
  auto sets = enumerate_index_sets(s);
  std::vector<std::vector<RatFun>> mat;
  for (const IndexSet& K : sets) {
    auto cfac = class_c_factors_at(s, K);
    std::vector<RatFun> row;
    for (const IndexSet& I : sets) {
      Poly num = evaluate_at_cycle(script_w(s, I), s, K);
      row.push_back(RatFun::quotient(num, cfac));
    }
    mat.push_back(std::move(row));
  }
  return mat;
}

bool shuffle_check(const Shape& s, int n1, const IndexSet& I) {
  int n = s.n();
  int n2 = n - n1;
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("shuffle_check: need proper split");
  // split I into its restriction to {1..n1} and the shifted restriction to {n1+1..n}
  IndexSet I1, I2;
  std::vector<int> lam1, lam2;
  for (int i = 1; i <= s.N(); ++i) {
    std::vector<int> b1, b2;
    for (int e : I.blocks.at(static_cast<std::size_t>(i - 1))) {
      if (e <= n1)
        b1.push_back(e);
      else
        b2.push_back(e - n1);
    }
    I1.blocks.push_back(b1);
    I2.blocks.push_back(b2);
    lam1.push_back(static_cast<int>(b1.size()));
    lam2.push_back(static_cast<int>(b2.size()));
  }
  Shape s1(lam1), s2(lam2);

  // coupling factor
  RatFun C{Poly(1L)};
  for (int j = 1; j < s.N(); ++j) {
    int k1j = s1.cum(j), k1j1 = s1.cum(j + 1);
    for (int a = 1; a <= k1j; ++a) {
      for (int b = k1j + 1; b <= s.cum(j); ++b) {
        C *= RatFun(tv(s, j, b) - tv(s, j, a) - hh());
        C = C.over(tv(s, j, b) - tv(s, j, a));
      }
      for (int c = k1j1 + 1; c <= s.cum(j + 1); ++c)
        C *= RatFun(tv(s, j, a) - tv(s, j + 1, c) - hh());
    }
    for (int a = k1j + 1; a <= s.cum(j); ++a)
      for (int c = 1; c <= k1j1; ++c) C *= RatFun(tv(s, j, a) - tv(s, j + 1, c));
  }

  // first factor in the leading variables, second relabeled into the tail
  Poly w1 = w_function(s1, I1);
  Poly w2 = w_function(s2, I2);
  std::map<VarId, VarId> ren;
  for (int j = 1; j < s.N(); ++j)
    for (int a = 1; a <= s2.cum(j); ++a) ren[t_var(j, a)] = t_var(j, s1.cum(j) + a);
  for (int a = 1; a <= n2; ++a) ren[z_var(a)] = z_var(n1 + a);
  w2 = w2.relabel(ren);

  RatFun inner = C * RatFun(w1) * RatFun(w2);
  RatFun sym = symmetrize(inner, level_groups(s));
  Rat norm(1);
  for (int j = 1; j < s.N(); ++j) {
    for (int k = 2; k <= s1.cum(j); ++k) norm *= k;
    for (int k = 2; k <= s2.cum(j); ++k) norm *= k;
  }
  sym *= Rat(1) / norm;
  return sym == RatFun(w_function(s, I));
}

bool factorization_check(const Shape& s) {
  for (int i = 2; i <= s.N(); ++i)
    if (s.part(i) != 0) throw std::invalid_argument("factorization_check: shape must be (n,0,..)");
  int n = s.n();
  IndexSet I = imin(s);
  Poly lhs = w_function(s, I);

  Shape gl2({n, 0});
  Poly factor = w_function(gl2, imin(gl2));
  Poly rhs(1L);
  for (int j = 1; j < s.N(); ++j) {
    std::map<VarId, VarId> ren;
    for (int a = 1; a <= n; ++a) {
      ren[t_var(1, a)] = t_var(j, a);
      VarId dst = (j + 1 == s.N()) ? z_var(a) : t_var(j + 1, a);
      ren[z_var(a)] = dst;
    }
    rhs *= factor.relabel(ren);
  }
  return lhs == rhs;
}

bool useful_identity_check(int k) {
  auto T = [](int i, int a) { return Poly::var(t_var(i, a)); };
  Poly h = hh();
  Poly F = (T(0, 1) - T(1, 1)) * (T(k, 1) - T(k + 1, 1) - h) -
           (T(0, 1) - T(1, 2) - h) * (T(k, 2) - T(k + 1, 1));
  Poly G = (T(0, 1) - T(1, 2) - h) * (T(k, 1) - T(k + 1, 1) - h) -
           (T(0, 1) - T(1, 1)) * (T(k, 2) - T(k + 1, 1));
  RatFun H{Poly(1L)};
  for (int i = 1; i < k; ++i)
    H *= RatFun((T(i, 1) - T(i + 1, 2) - h) * (T(i, 2) - T(i + 1, 1)));
  for (int i = 1; i <= k; ++i) {
    H *= RatFun(T(i, 2) - T(i, 1) - h);
    H = H.over(T(i, 2) - T(i, 1));
  }
  std::vector<std::vector<VarId>> groups;
  for (int i = 1; i <= k; ++i) groups.push_back({t_var(i, 1), t_var(i, 2)});
  RatFun sf = symmetrize(RatFun(F) * H, groups);
  RatFun sg = symmetrize(RatFun(G) * H, groups);
  return sf.is_zero() && sg.is_zero();
}

}  // namespace qde
