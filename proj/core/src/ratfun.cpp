#include "qde/ratfun.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <set>
#include <stdexcept>

namespace qde {

void RatFun::push_factor(const Poly& linear, int mult) {
  if (mult == 0 || num_.is_zero()) return;
  if (linear.degree() != 1) throw std::logic_error("RatFun: denominator factor not linear");
  Poly monic = linear;
  Rat lc = linear.leading_coeff();
  if (lc != 1) {
    monic *= Rat(1) / lc;
    num_ *= rat_pow(Rat(1) / lc, mult);
  }
  auto [it, fresh] = den_.emplace(monic, mult);
  if (!fresh) {
    it->second += mult;
    if (it->second == 0) den_.erase(it);
  }
}

void RatFun::reduce() {
  if (num_.is_zero()) {
    den_.clear();
    return;
  }
  for (auto it = den_.begin(); it != den_.end();) {
    while (it->second > 0) {
      auto q = num_.divexact(it->first);
      if (!q) break;
      num_ = std::move(*q);
      --it->second;
    }
    it = (it->second == 0) ? den_.erase(it) : std::next(it);
  }
}

RatFun RatFun::quotient(Poly num, const std::vector<Poly>& linear_dens) {
  RatFun r(std::move(num));
  for (const Poly& d : linear_dens) r.push_factor(d, 1);
  r.reduce();
  return r;
}

RatFun RatFun::sum(const std::vector<RatFun>& fs) {
  RatFun out;
  std::map<Poly, int, PolyKeyLess> united;
  for (const RatFun& f : fs) {
    if (f.num_.is_zero()) continue;
    for (const auto& [p, e] : f.den_) {
      auto [it, fresh] = united.emplace(p, e);
      if (!fresh) it->second = std::max(it->second, e);
    }
  }
  std::vector<Poly> parts;
  parts.reserve(fs.size());
  for (const RatFun& f : fs) {
    if (f.num_.is_zero()) continue;
    Poly term = f.num_;
    for (const auto& [p, e] : united) {
      auto it = f.den_.find(p);
      const int have = (it == f.den_.end()) ? 0 : it->second;
      if (e > have) term *= p.pow(e - have);
    }
    parts.push_back(std::move(term));
  }
  out.num_ = Poly::sum(std::move(parts));
  out.den_ = std::move(united);
  out.reduce();
  return out;
}

Poly RatFun::denominator() const {
  Poly out(1L);
  for (const auto& [f, e] : den_) out *= f.pow(e);
  return out;
}

const Poly& RatFun::as_poly() const {
  if (!den_.empty()) throw std::logic_error("RatFun::as_poly with nontrivial denominator");
  return num_;
}

RatFun RatFun::operator-() const {
  RatFun out = *this;
  out.num_ = -out.num_;
  return out;
}

RatFun& RatFun::operator+=(const RatFun& o) {
  // common denominator: max multiplicity per factor
  std::map<Poly, int, PolyKeyLess> united = den_;
  for (const auto& [f, e] : o.den_) {
    auto [it, fresh] = united.emplace(f, e);
    if (!fresh) it->second = std::max(it->second, e);
  }
  Poly a = num_, b = o.num_;
  for (const auto& [f, e] : united) {
    auto ita = den_.find(f);
    int ea = (ita == den_.end()) ? 0 : ita->second;
    auto itb = o.den_.find(f);
    int eb = (itb == o.den_.end()) ? 0 : itb->second;
    if (e > ea) a *= f.pow(e - ea);
    if (e > eb) b *= f.pow(e - eb);
  }
  num_ = a + b;
  den_ = std::move(united);
  reduce();
  return *this;
}

RatFun& RatFun::operator-=(const RatFun& o) { return *this += -o; }

RatFun operator*(const RatFun& a, const RatFun& b) {
  RatFun out;
  out.num_ = a.num_ * b.num_;
  out.den_ = a.den_;
  for (const auto& [f, e] : b.den_) {
    auto [it, fresh] = out.den_.emplace(f, e);
    if (!fresh) it->second += e;
  }
  out.reduce();
  return out;
}

RatFun& RatFun::operator*=(const Rat& c) {
  num_ *= c;
  if (num_.is_zero()) den_.clear();
  return *this;
}

RatFun RatFun::over(const Poly& linear) const {
  RatFun out = *this;
  out.push_factor(linear, 1);
  out.reduce();
  return out;
}

RatFun RatFun::times_pow(const Poly& linear, int e) const {
  if (e >= 0) {
    RatFun out = *this;
    out.num_ *= linear.pow(e);
    out.reduce();
    return out;
  }
  RatFun out = *this;
  out.push_factor(linear, -e);
  out.reduce();
  return out;
}

bool RatFun::operator==(const RatFun& o) const {
  // canonical form is unique: linear factors are irreducible and monic
  return num_ == o.num_ && den_ == o.den_;
}

RatFun RatFun::relabel(const std::map<VarId, VarId>& ren) const {
  // renaming is a ring automorphism, so a canonical form stays canonical
  RatFun out(num_.relabel(ren));
  for (const auto& [f, e] : den_) out.push_factor(f.relabel(ren), e);
  return out;
}

RatFun RatFun::substitute(const std::map<VarId, Poly>& sub) const {
  RatFun out(num_.substitute(sub));
  for (const auto& [f, e] : den_) {
    Poly fs = f.substitute(sub);
    if (fs.is_constant()) {
      Rat c = fs.constant_value();
      if (c == 0) throw std::domain_error("RatFun::substitute hits a pole");
      out.num_ *= rat_pow(Rat(1) / c, e);
    } else {
      out.push_factor(fs, e);
    }
  }
  out.reduce();
  return out;
}

Cplx RatFun::eval(const std::map<VarId, Cplx>& point) const {
  Cplx out = num_.eval(point);
  for (const auto& [f, e] : den_) {
    Cplx fv = f.eval(point);
    for (int k = 0; k < e; ++k) out /= fv;
  }
  return out;
}

std::string RatFun::str() const {
  if (den_.empty()) return num_.str();
  std::string out = "(" + num_.str() + ") / (";
  bool first = true;
  for (const auto& [f, e] : den_) {
    if (!first) out += "*";
    first = false;
    out += "(" + f.str() + ")";
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out + ")";
}

std::vector<RatFun> symmetrize_terms(const RatFun& f,
                                     const std::vector<std::vector<VarId>>& groups) {
  std::vector<std::vector<int>> cur;
  for (const auto& g : groups) {
    std::vector<int> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = static_cast<int>(i);
    cur.push_back(v);
  }
  auto advance = [&]() -> bool {
    for (auto& c : cur)
      if (std::next_permutation(c.begin(), c.end())) return true;
    return false;
  };
  std::vector<RatFun> orbit;
  while (true) {
    std::map<VarId, VarId> ren;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t i = 0; i < groups[g].size(); ++i)
        ren[groups[g][i]] = groups[g][static_cast<std::size_t>(cur[g][i])];
    orbit.push_back(f.relabel(ren));
    if (!advance()) break;
  }
  return orbit;
}

namespace {

RatFun symmetrize_nested(const RatFun& f, const std::vector<std::vector<VarId>>& groups) {
  // nested coset sums: S_m = union of (j m) S_{m-1}; reducing after every
  // stage realizes cancellations before numerators can swell
  RatFun g = f;
  for (const auto& vars : groups) {
    const int k = static_cast<int>(vars.size());
    for (int m = 2; m <= k; ++m) {
      std::vector<RatFun> parts;
      parts.reserve(static_cast<std::size_t>(m));
      parts.push_back(g);
      for (int j = 1; j < m; ++j) {
        std::map<VarId, VarId> swp{{vars[static_cast<std::size_t>(j - 1)],
                                    vars[static_cast<std::size_t>(m - 1)]},
                                   {vars[static_cast<std::size_t>(m - 1)],
                                    vars[static_cast<std::size_t>(j - 1)]}};
        parts.push_back(g.relabel(swp));
      }
      g = RatFun::sum(parts);
    }
  }
  return g;
}

// is f exactly (v - w) for two variables of g, up to sign
bool pair_within(const Poly& f, const std::vector<VarId>& g) {
  if (f.term_count() != 2) return false;
  VarId vs[2];
  int k = 0;
  for (const auto& [m, c] : f.terms()) {
    if (m.pw.size() != 1 || m.pw.front().second != 1) return false;
    if (!(c == 1 || c == -1)) return false;
    vs[k++] = m.pw.front().first;
  }
  auto in = [&g](VarId v) { return std::find(g.begin(), g.end(), v) != g.end(); };
  return in(vs[0]) && in(vs[1]);
}

bool involves(const Poly& f, const std::set<VarId>& gv) {
  for (VarId v : f.vars())
    if (gv.count(v)) return true;
  return false;
}

// permutations of one group as renaming maps, with parities
struct GroupOrbit {
  std::vector<std::map<VarId, VarId>> maps;
  std::vector<int> signs;
};

GroupOrbit group_orbit(const std::vector<VarId>& vars) {
  GroupOrbit out;
  const int k = static_cast<int>(vars.size());
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  do {
    std::map<VarId, VarId> m;
    int inv = 0;
    for (int a = 0; a < k; ++a) {
      const int ia = idx[static_cast<std::size_t>(a)];
      if (ia != a) m[vars[static_cast<std::size_t>(a)]] = vars[static_cast<std::size_t>(ia)];
      for (int b = a + 1; b < k; ++b)
        if (ia > idx[static_cast<std::size_t>(b)]) ++inv;
    }
    out.maps.push_back(std::move(m));
    out.signs.push_back(inv % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

// Packed arithmetic for the orbit sum: exponent vectors live in fixed bit
// fields of one 128-bit key, so relabeling is field shuffling, addition is a
// merge of sorted key runs, and division by a linear factor is a synthetic
// recursion on one field. Coefficients stay exact.
using u128 = unsigned __int128;

struct PTerm {
  u128 key;
  Rat c;
};

struct Packer {
  std::vector<VarId> vars;  // slot order, ascending VarId
  int bits = 0;

  int slot(VarId v) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == v) return static_cast<int>(i);
    return -1;
  }
  u128 mask() const { return (u128{1} << bits) - 1; }
  int field(u128 key, int s) const {
    return static_cast<int>((key >> (s * bits)) & mask());
  }
};

void sort_run(std::vector<PTerm>& run) {
  std::sort(run.begin(), run.end(), [](const PTerm& a, const PTerm& b) { return a.key < b.key; });
}

std::vector<PTerm> merge_runs(std::vector<PTerm> a, std::vector<PTerm> b) {
  std::vector<PTerm> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].key < b[j].key) {
      out.push_back(std::move(a[i++]));
    } else if (b[j].key < a[i].key) {
      out.push_back(std::move(b[j++]));
    } else {
      a[i].c += b[j].c;
      if (a[i].c != 0) out.push_back(std::move(a[i]));
      ++i, ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(std::move(a[i]));
  for (; j < b.size(); ++j) out.push_back(std::move(b[j]));
  return out;
}

std::vector<PTerm> sum_runs(std::vector<std::vector<PTerm>> runs) {
  if (runs.empty()) return {};
  while (runs.size() > 1) {
    std::vector<std::vector<PTerm>> next;
    next.reserve(runs.size() / 2 + 1);
    for (std::size_t i = 0; i + 1 < runs.size(); i += 2)
      next.push_back(merge_runs(std::move(runs[i]), std::move(runs[i + 1])));
    if (runs.size() % 2 == 1) next.push_back(std::move(runs.back()));
    runs = std::move(next);
  }
  return std::move(runs.front());
}

// exact division by the monic linear factor at slot x minus s (a packed term
// list free of slot x); nullopt when the division is not exact
std::optional<std::vector<PTerm>> packed_divexact(const std::vector<PTerm>& p, int x,
                                                  const std::vector<PTerm>& s, const Packer& pk) {
  if (p.empty()) return std::vector<PTerm>{};
  int d = 0;
  for (const PTerm& t : p) d = std::max(d, pk.field(t.key, x));
  if (d == 0) return std::nullopt;
  // split by the x field; clearing a fixed field keeps each bucket sorted
  std::vector<std::vector<PTerm>> c(static_cast<std::size_t>(d) + 1);
  const u128 xmask = pk.mask() << (x * pk.bits);
  for (const PTerm& t : p)
    c[static_cast<std::size_t>(pk.field(t.key, x))].push_back(PTerm{t.key & ~xmask, t.c});
  auto times_s = [&](const std::vector<PTerm>& b) {
    std::vector<std::vector<PTerm>> prods;
    prods.reserve(s.size());
    for (const PTerm& st : s) {
      std::vector<PTerm> one;
      one.reserve(b.size());
      for (const PTerm& bt : b) one.push_back(PTerm{bt.key + st.key, bt.c * st.c});
      prods.push_back(std::move(one));  // adding a fixed key keeps the run sorted
    }
    return sum_runs(std::move(prods));
  };
  std::vector<std::vector<PTerm>> b(static_cast<std::size_t>(d));
  b[static_cast<std::size_t>(d - 1)] = std::move(c[static_cast<std::size_t>(d)]);
  for (int k = d - 1; k >= 1; --k)
    b[static_cast<std::size_t>(k - 1)] = merge_runs(std::move(c[static_cast<std::size_t>(k)]),
                                                    times_s(b[static_cast<std::size_t>(k)]));
  if (!merge_runs(std::move(c[0]), times_s(b[0])).empty()) return std::nullopt;
  std::vector<std::vector<PTerm>> blocks;
  blocks.reserve(b.size());
  for (int k = 0; k < d; ++k) {
    std::vector<PTerm>& blk = b[static_cast<std::size_t>(k)];
    if (k > 0) {
      const u128 xk = u128{static_cast<unsigned long long>(k)} << (x * pk.bits);
      for (PTerm& t : blk) t.key += xk;
    }
    blocks.push_back(std::move(blk));
  }
  return sum_runs(std::move(blocks));
}

}  // namespace

RatFun symmetrize(const RatFun& f, const std::vector<std::vector<VarId>>& groups) {
  // Orbit sum over a semi-invariant common denominator: denominator factors
  // that are pair differences within one group are completed to the full
  // product over that group's pairs, which every permutation maps to +-itself.
  // The orbit then collapses to signed relabelings of a single numerator and
  // one final division. Requires every factor to be such a pair or inert.
  std::set<VarId> gv;
  for (const auto& g : groups)
    for (VarId v : g) gv.insert(v);

  std::vector<int> mult(groups.size(), 0);
  std::vector<std::map<Poly, int, PolyKeyLess>> have(groups.size());
  std::vector<std::pair<Poly, int>> inert;
  for (const auto& [fac, e] : f.den_factors()) {
    bool matched = false;
    for (std::size_t gi = 0; gi < groups.size() && !matched; ++gi) {
      if (pair_within(fac, groups[gi])) {
        mult[gi] = std::max(mult[gi], e);
        have[gi].emplace(fac, e);
        matched = true;
      }
    }
    if (!matched) {
      if (involves(fac, gv)) return symmetrize_nested(f, groups);
      inert.emplace_back(fac, e);
    }
  }

  Poly num = f.numerator();
  std::vector<std::vector<Poly>> gfactors(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (mult[gi] == 0) continue;
    const auto& g = groups[gi];
    for (std::size_t a = 0; a + 1 < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        Poly diff = Poly::var(g[a]) - Poly::var(g[b]);
        int e0 = 0;
        auto it = have[gi].find(diff);
        if (it == have[gi].end()) {
          Poly neg = -diff;
          it = have[gi].find(neg);
          if (it != have[gi].end()) {
            diff = std::move(neg);
            e0 = it->second;
          }
        } else {
          e0 = it->second;
        }
        for (int r = e0; r < mult[gi]; ++r) num = num * diff;
        for (int r = 0; r < mult[gi]; ++r) gfactors[gi].push_back(diff);
      }
  }

  std::vector<GroupOrbit> orbits;
  orbits.reserve(groups.size());
  for (const auto& g : groups) orbits.push_back(group_orbit(g));

  Packer pk;
  {
    std::set<VarId> allv(gv.begin(), gv.end());
    for (VarId v : num.vars()) allv.insert(v);
    pk.vars.assign(allv.begin(), allv.end());
    const unsigned dmax = static_cast<unsigned>(std::max(1, num.degree()));
    pk.bits = static_cast<int>(std::bit_width(dmax));
  }

  if (static_cast<int>(pk.vars.size()) * pk.bits <= 128) {
    std::vector<PTerm> acc;
    acc.reserve(num.terms().size());
    for (const auto& [m, c] : num.terms()) {
      u128 key = 0;
      for (const auto& [v, e] : m.pw)
        key |= u128{static_cast<unsigned long long>(e)} << (pk.slot(v) * pk.bits);
      acc.push_back(PTerm{key, c});
    }
    sort_run(acc);

    // one group at a time: the group's own pair product is invariant under
    // the other groups, so dividing early keeps intermediates small
    std::vector<Poly> leftover;
    std::vector<int> perm(pk.vars.size());
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const GroupOrbit& o = orbits[gi];
      if (o.maps.size() <= 1) continue;
      std::vector<std::vector<PTerm>> runs;
      for (std::size_t w = 0; w < o.maps.size(); ++w) {
        const int sign = (mult[gi] % 2 == 1 && o.signs[w] < 0) ? -1 : 1;
        std::vector<PTerm> run;
        if (o.maps[w].empty() && sign > 0) {
          run = acc;
        } else {
          for (std::size_t s = 0; s < pk.vars.size(); ++s) perm[s] = static_cast<int>(s);
          for (const auto& [k, v] : o.maps[w])
            perm[static_cast<std::size_t>(pk.slot(k))] = pk.slot(v);
          run.reserve(acc.size());
          for (const PTerm& t : acc) {
            u128 key = 0;
            for (std::size_t s = 0; s < pk.vars.size(); ++s) {
              const int e = pk.field(t.key, static_cast<int>(s));
              if (e)
                key |= u128{static_cast<unsigned long long>(e)} << (perm[s] * pk.bits);
            }
            run.push_back(PTerm{key, sign < 0 ? Rat(-t.c) : t.c});
          }
          sort_run(run);
        }
        runs.push_back(std::move(run));
        // binary-counter merging keeps the stack geometric
        while (runs.size() >= 2 && runs[runs.size() - 2].size() <= runs.back().size()) {
          std::vector<PTerm> merged =
              merge_runs(std::move(runs[runs.size() - 2]), std::move(runs.back()));
          runs.pop_back();
          runs.back() = std::move(merged);
        }
      }
      acc = sum_runs(std::move(runs));
      for (const Poly& fac : gfactors[gi]) {
        VarId xv{}, yv{};
        for (const auto& [m, c] : fac.terms())
          (c == 1 ? xv : yv) = m.pw.front().first;
        const std::vector<PTerm> sub{PTerm{u128{1} << (pk.slot(yv) * pk.bits), Rat(1)}};
        auto quo = packed_divexact(acc, pk.slot(xv), sub, pk);
        if (quo)
          acc = std::move(*quo);
        else
          leftover.push_back(fac);
      }
    }

    Poly::TermList terms;
    terms.reserve(acc.size());
    for (PTerm& t : acc) {
      Mono m;
      for (std::size_t s = 0; s < pk.vars.size(); ++s) {
        const int e = pk.field(t.key, static_cast<int>(s));
        if (e) m.pw.emplace_back(pk.vars[s], e);
      }
      terms.emplace_back(std::move(m), std::move(t.c));
    }
    for (const auto& [fac, e] : inert)
      for (int r = 0; r < e; ++r) leftover.push_back(fac);
    return RatFun::quotient(Poly::from_terms(std::move(terms)), leftover);
  }

  std::vector<Poly> dens;
  for (const auto& gf : gfactors)
    for (const Poly& fac : gf) dens.push_back(fac);
  for (const auto& [fac, e] : inert)
    for (int r = 0; r < e; ++r) dens.push_back(fac);
  std::vector<Poly> parts;
  std::vector<std::size_t> which(groups.size(), 0);
  while (true) {
    std::map<VarId, VarId> ren;
    int sign = 1;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const GroupOrbit& o = orbits[gi];
      for (const auto& [k, v] : o.maps[which[gi]]) ren[k] = v;
      if (mult[gi] % 2 == 1 && o.signs[which[gi]] < 0) sign = -sign;
    }
    Poly term = ren.empty() ? num : num.relabel(ren);
    if (sign < 0) term *= Rat(-1);
    parts.push_back(std::move(term));
    std::size_t gi = 0;
    for (; gi < groups.size(); ++gi) {
      if (++which[gi] < orbits[gi].maps.size()) break;
      which[gi] = 0;
    }
    if (gi == groups.size()) break;
  }
  return RatFun::quotient(Poly::sum(std::move(parts)), dens);
}

bool sum_equal(const std::vector<RatFun>& lhs, const std::vector<RatFun>& rhs) {
  std::map<Poly, int, PolyKeyLess> united;
  auto absorb = [&united](const std::vector<RatFun>& v) {
    for (const RatFun& f : v) {
      if (f.numerator().is_zero()) continue;
      for (const auto& [p, e] : f.den_factors()) {
        auto [it, fresh] = united.emplace(p, e);
        if (!fresh) it->second = std::max(it->second, e);
      }
    }
  };
  absorb(lhs);
  absorb(rhs);
  std::vector<Poly> parts;
  auto accumulate = [&](const std::vector<RatFun>& v, bool negate) {
    for (const RatFun& f : v) {
      if (f.numerator().is_zero()) continue;
      Poly term = f.numerator();
      for (const auto& [p, e] : united) {
        auto it = f.den_factors().find(p);
        const int have = (it == f.den_factors().end()) ? 0 : it->second;
        if (e > have) term *= p.pow(e - have);
      }
      if (negate) term *= Rat(-1);
      parts.push_back(std::move(term));
    }
  };
  accumulate(lhs, false);
  accumulate(rhs, true);
  return Poly::sum(std::move(parts)).is_zero();
}

}  // namespace qde
