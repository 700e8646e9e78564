#include "qde/schubert.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qde {

namespace {

Poly xx(int i) { return Poly::var(x_var(i)); }

Poly staircase(int n) {
  Poly f{Rat(1)};
  for (int i = 1; i < n; ++i) f *= xx(i).pow(n - i);
  return f;
}

std::map<VarId, Poly> swap_map(int i) {
  return {{x_var(i), xx(i + 1)}, {x_var(i + 1), xx(i)}};
}

std::map<VarId, VarId> x_to_y(int n) {
  std::map<VarId, VarId> m;
  for (int i = 1; i <= n; ++i) m.emplace(x_var(i), y_var(i));
  return m;
}

// adjacent positions lying in one block of I^min
std::vector<int> lambda_inner_positions(const Shape& s) {
  std::vector<int> ks;
  for (int b = 1; b <= s.N(); ++b)
    for (int k = s.cum(b - 1) + 1; k + 1 <= s.cum(b); ++k) ks.push_back(k);
  return ks;
}

Poly laplace_det(const std::vector<std::vector<Poly>>& m) {
  const std::size_t n = m.size();
  if (n > 10) throw std::invalid_argument("laplace_det: matrix too large");
  // minors over row prefixes, keyed by the used column subset
  std::map<unsigned, Poly> prev{{0u, Poly(Rat(1))}};
  for (std::size_t r = 0; r < n; ++r) {
    std::map<unsigned, Poly> next;
    for (const auto& [cols, minor] : prev) {
      for (unsigned c = 0; c < n; ++c) {
        if (cols & (1u << c)) continue;
        Poly contrib = minor * m[r][c];
        // inversions added: used columns above c
        if (std::popcount(cols >> (c + 1)) % 2 == 1) contrib *= Rat(-1);
        auto [it, fresh] = next.emplace(cols | (1u << c), contrib);
        if (!fresh) it->second += contrib;
      }
    }
    prev = std::move(next);
  }
  return prev.at((1u << n) - 1u);
}

}  // namespace

Poly permute_x(const Poly& f, const Perm& sigma) {
  std::map<VarId, VarId> m;
  for (int i = 1; i <= sigma.n(); ++i)
    if (sigma(i) != i) m.emplace(x_var(i), x_var(sigma(i)));
  return m.empty() ? f : f.relabel(m);
}

Poly divided_difference(const Poly& f, int i) {
  const Poly diff = f - f.substitute(swap_map(i));
  if (diff.is_zero()) return diff;
  auto q = diff.divexact(xx(i) - xx(i + 1));
  if (!q) throw std::logic_error("divided_difference: inexact");
  return *q;
}

Poly divided_difference(const Poly& f, const Perm& sigma) {
  const std::vector<int> word = sigma.reduced_word();
  Poly g = f;
  for (auto it = word.rbegin(); it != word.rend(); ++it) g = divided_difference(g, *it);
  return g;
}

SchubertBasis::SchubertBasis(int n) : n_(n) {
  const Perm longest = Perm::longest(n);
  const Poly top = staircase(n);
  for (const Perm& sigma : all_perms(n))
    table_.emplace(sigma.img, divided_difference(top, sigma.inverse().compose(longest)));
}

const Poly& SchubertBasis::at(const Perm& sigma) const { return table_.at(sigma.img); }

bool orthogonality_check(int n) {
  const SchubertBasis basis(n);
  const Perm longest = Perm::longest(n);
  for (const Perm& sigma : all_perms(n)) {
    const Poly& a = basis.at(sigma);
    for (const Perm& tau : all_perms(n)) {
      const Poly b = permute_x(basis.at(tau.compose(longest)), longest);
      const Poly got = divided_difference(a * b, longest);
      Poly want;
      if (sigma == tau) want = Poly(Rat(sigma.compose(longest).sign()));
      if (!(got == want)) return false;
    }
  }
  return true;
}

bool cauchy_check(int n) {
  const SchubertBasis basis(n);
  const Perm longest = Perm::longest(n);
  const auto to_y = x_to_y(n);
  std::vector<Poly> parts;
  for (const Perm& sigma : all_perms(n)) {
    Poly term = basis.at(sigma) * basis.at(sigma.compose(longest)).relabel(to_y);
    if (sigma.sign() < 0) term *= Rat(-1);
    parts.push_back(std::move(term));
  }
  Poly rhs = Poly(Rat(1));
  for (int i = 1; i <= n - 1; ++i)
    for (int j = 1; j <= n - i; ++j) rhs *= Poly::var(y_var(i)) - xx(j);
  return Poly::sum(std::move(parts)) == rhs;
}

std::map<std::vector<int>, Poly> schubert_expand(const SchubertBasis& basis, const Poly& f) {
  const int n = basis.n();
  const Perm longest = Perm::longest(n);
  std::map<std::vector<int>, Poly> out;
  for (const Perm& sigma : all_perms(n)) {
    const Poly b = permute_x(basis.at(sigma.compose(longest)), longest);
    Poly c = divided_difference(f * b, longest);
    if (c.is_zero()) continue;
    if (sigma.compose(longest).sign() < 0) c *= Rat(-1);
    out.emplace(sigma.img, std::move(c));
  }
  return out;
}

bool expand_roundtrip(const SchubertBasis& basis, const Poly& f) {
  std::vector<Poly> parts;
  for (const auto& [word, c] : schubert_expand(basis, f)) parts.push_back(c * basis.at(Perm(word)));
  return Poly::sum(std::move(parts)) == f;
}

bool lambda_invariance_check(const Shape& s) {
  const SchubertBasis basis(s.n());
  const auto inner = lambda_inner_positions(s);
  for (const IndexSet& I : enumerate_index_sets(s)) {
    const Poly& a = basis.at(sigma_up(I));
    for (int k : inner)
      if (!(a.substitute(swap_map(k)) == a)) return false;
  }
  return true;
}

bool lambda_orthogonality_check(const Shape& s) {
  const SchubertBasis basis(s.n());
  const Perm longest = Perm::longest(s.n());
  const Perm top = sigma_up(imax(s));
  const auto sets = enumerate_index_sets(s);
  for (const IndexSet& I : sets) {
    const Poly& a = basis.at(sigma_up(I));
    for (const IndexSet& J : sets) {
      const Poly b = permute_x(basis.at(sigma_lo(J)), longest);
      const Poly got = divided_difference(a * b, top);
      Poly want;
      if (I.blocks == J.blocks) want = Poly(Rat(sigma_lo(I).sign()));
      if (!(got == want)) return false;
    }
  }
  return true;
}

bool lambda_cauchy_check(const Shape& s) {
  const SchubertBasis basis(s.n());
  const Perm longest = Perm::longest(s.n());
  const auto to_y = x_to_y(s.n());
  const IndexSet lo = imin(s);
  std::vector<Poly> parts;
  for (const IndexSet& I : enumerate_index_sets(s)) {
    Poly term =
        basis.at(sigma_up(I)) * permute_x(basis.at(sigma_lo(I)), longest).relabel(to_y);
    if (sigma_up(I).sign() < 0) term *= Rat(-1);
    parts.push_back(std::move(term));
  }
  Poly rhs = Poly(Rat(1));
  for (std::size_t a = 0; a + 1 < lo.blocks.size(); ++a)
    for (std::size_t b = a + 1; b < lo.blocks.size(); ++b)
      for (int i : lo.blocks[a])
        for (int j : lo.blocks[b]) rhs *= Poly::var(y_var(j)) - xx(i);
  return Poly::sum(std::move(parts)) == rhs;
}

bool lambda_expand_check(const Shape& s, const Poly& f) {
  const SchubertBasis basis(s.n());
  const Perm longest = Perm::longest(s.n());
  const Perm top = sigma_up(imax(s));
  const auto sets = enumerate_index_sets(s);
  auto general = schubert_expand(basis, f);

  std::vector<Poly> parts;
  for (const IndexSet& I : sets) {
    const Perm up = sigma_up(I);
    Poly c = divided_difference(f * permute_x(basis.at(sigma_lo(I)), longest), top);
    if (sigma_lo(I).sign() < 0) c *= Rat(-1);
    auto it = general.find(up.img);
    const Poly& from_general = it == general.end() ? Poly() : it->second;
    if (!(c == from_general)) return false;
    if (it != general.end()) general.erase(it);
    parts.push_back(c * basis.at(up));
  }
  if (!general.empty()) return false;  // a coefficient survived off the lambda set
  return Poly::sum(std::move(parts)) == f;
}

RatFun lambda_localization_sum(const Shape& s, const Poly& f) {
  const Perm top = sigma_up(imax(s));
  const IndexSet lo = imin(s);
  const Poly lhs = divided_difference(f, top);

  std::vector<RatFun> parts;
  for (const IndexSet& I : enumerate_index_sets(s)) {
    const Perm up = sigma_up(I);
    std::vector<Poly> dens;
    for (std::size_t a = 0; a + 1 < lo.blocks.size(); ++a)
      for (std::size_t b = a + 1; b < lo.blocks.size(); ++b)
        for (int i : lo.blocks[a])
          for (int j : lo.blocks[b]) dens.push_back(xx(up(i)) - xx(up(j)));
    parts.push_back(RatFun::quotient(permute_x(f, up), dens));
  }
  const RatFun rhs = RatFun::sum(parts);
  if (!(rhs == RatFun(lhs))) throw std::runtime_error("lambda_localization_sum: sides disagree");
  return rhs;
}

DeterminantReport evaluation_determinant(const Shape& s) {
  const SchubertBasis basis(s.n());
  const auto sets = enumerate_index_sets(s);
  std::vector<std::vector<Poly>> m;
  for (const IndexSet& I : sets) {
    std::vector<Poly> row;
    for (const IndexSet& J : sets) row.push_back(permute_x(basis.at(sigma_up(I)), sigma_up(J)));
    m.push_back(std::move(row));
  }

  DeterminantReport rep;
  rep.determinant = laplace_det(m);
  rep.stated_exponent = static_cast<int>(s.det_exponent());
  rep.predicted = Poly(Rat(1));
  std::vector<Poly> vfac;
  for (int i = 1; i <= s.n(); ++i)
    for (int j = i + 1; j <= s.n(); ++j) vfac.push_back(xx(j) - xx(i));
  for (int r = 0; r < rep.stated_exponent; ++r)
    for (const Poly& v : vfac) rep.predicted *= v;

  Poly rest = rep.determinant;
  int k = 0;
  while (!rest.is_zero()) {
    Poly round = rest;
    bool all = true;
    for (const Poly& v : vfac) {
      auto q = round.divexact(v);
      if (!q) {
        all = false;
        break;
      }
      round = std::move(*q);
    }
    if (!all) break;
    rest = std::move(round);
    ++k;
  }
  rep.observed_exponent = rest.is_constant() && !rest.is_zero() ? k : -1;
  rep.observed_constant = rest.is_constant() && !rest.is_zero() ? rest.constant_value()
                                                                : rep.determinant.leading_coeff();
  rep.matches_stated = rep.determinant == rep.predicted;
  return rep;
}

}  // namespace qde
