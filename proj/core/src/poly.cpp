#include "qde/poly.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace qde {

std::string var_string(VarId v) {
  char buf[48];
  switch (v.kind) {
    case VarKind::t:
      std::snprintf(buf, sizeof buf, "t[%d][%d]", v.i, v.j);
      break;
    case VarKind::z:
      std::snprintf(buf, sizeof buf, "z[%d]", v.i);
      break;
    case VarKind::h:
      return "h";
    case VarKind::q:
      std::snprintf(buf, sizeof buf, "q[%d]", v.i);
      break;
    case VarKind::x:
      std::snprintf(buf, sizeof buf, "x[%d]", v.i);
      break;
    case VarKind::y:
      std::snprintf(buf, sizeof buf, "y[%d]", v.i);
      break;
    case VarKind::theta:
      std::snprintf(buf, sizeof buf, "theta[%d][%d]", v.i, v.j);
      break;
    case VarKind::gamma:
      std::snprintf(buf, sizeof buf, "gamma[%d][%d]", v.i, v.j);
      break;
    case VarKind::aux:
      std::snprintf(buf, sizeof buf, "aux[%d]", v.i);
      break;
  }
  return buf;
}

int Mono::degree() const {
  int d = 0;
  for (const auto& [v, e] : pw) d += e;
  return d;
}

int Mono::exponent_of(VarId v) const {
  for (const auto& [w, e] : pw)
    if (w == v) return e;
  return 0;
}

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono out;
  out.pw.reserve(a.pw.size() + b.pw.size());
  std::size_t i = 0, j = 0;
  while (i < a.pw.size() && j < b.pw.size()) {
    if (a.pw[i].first < b.pw[j].first) {
      out.pw.push_back(a.pw[i++]);
    } else if (b.pw[j].first < a.pw[i].first) {
      out.pw.push_back(b.pw[j++]);
    } else {
      out.pw.emplace_back(a.pw[i].first, a.pw[i].second + b.pw[j].second);
      ++i, ++j;
    }
  }
  for (; i < a.pw.size(); ++i) out.pw.push_back(a.pw[i]);
  for (; j < b.pw.size(); ++j) out.pw.push_back(b.pw[j]);
  return out;
}

bool mono_less(const Mono& a, const Mono& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // equal degree: walk both sorted variable lists; at the first difference the
  // monomial with the earlier variable (or bigger exponent on it) is larger
  std::size_t i = 0, j = 0;
  while (i < a.pw.size() && j < b.pw.size()) {
    if (a.pw[i].first < b.pw[j].first) return false;  // a has earlier var: a larger
    if (b.pw[j].first < a.pw[i].first) return true;
    if (a.pw[i].second != b.pw[j].second) return a.pw[i].second < b.pw[j].second;
    ++i, ++j;
  }
  return i == a.pw.size() && j < b.pw.size();
}

namespace {

// descending monomial order for term storage
bool term_before(const Poly::Term& a, const Poly::Term& b) { return mono_less(b.first, a.first); }

// merge two descending term lists with an optional sign on the second
Poly::TermList merge_terms(const Poly::TermList& a, const Poly::TermList& b, bool negate_b) {
  Poly::TermList out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (mono_less(b[j].first, a[i].first)) {
      out.push_back(a[i++]);
    } else if (mono_less(a[i].first, b[j].first)) {
      out.emplace_back(b[j].first, negate_b ? Rat(-b[j].second) : b[j].second);
      ++j;
    } else {
      Rat c = negate_b ? Rat(a[i].second - b[j].second) : Rat(a[i].second + b[j].second);
      if (c != 0) out.emplace_back(a[i].first, std::move(c));
      ++i, ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.emplace_back(b[j].first, negate_b ? Rat(-b[j].second) : b[j].second);
  return out;
}

}  // namespace

Poly::Poly(const Rat& c) {
  if (c != 0) terms_.emplace_back(Mono{}, c);
}

Poly::Poly(long c) {
  if (c != 0) terms_.emplace_back(Mono{}, Rat(c));
}

Poly Poly::from_term(Mono m, Rat c) {
  Poly p;
  if (c != 0) p.terms_.emplace_back(std::move(m), std::move(c));
  return p;
}

Poly Poly::var(VarId v, int exp) {
  if (exp == 0) return Poly(1L);
  Mono m;
  m.pw.emplace_back(v, exp);
  return from_term(std::move(m), Rat(1));
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first.pw.empty());
}

Rat Poly::constant_value() const {
  if (terms_.empty()) return Rat(0);
  if (!is_constant()) throw std::logic_error("constant_value on non-constant");
  return terms_.front().second;
}

int Poly::degree() const {
  if (terms_.empty()) return -1;
  return terms_.front().first.degree();
}

int Poly::degree_in(VarId v) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exponent_of(v));
  return d;
}

const Mono& Poly::leading_mono() const {
  if (terms_.empty()) throw std::logic_error("leading_mono of zero");
  return terms_.front().first;
}

const Rat& Poly::leading_coeff() const {
  if (terms_.empty()) throw std::logic_error("leading_coeff of zero");
  return terms_.front().second;
}

Rat Poly::coeff(const Mono& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Mono& k) { return mono_less(k, t.first); });
  if (it == terms_.end() || !(it->first == m)) return Rat(0);
  return it->second;
}

Poly Poly::coeff_of(VarId v, int k) const {
  // stripping v^k preserves the relative order of the surviving terms
  Poly out;
  for (const auto& [m, c] : terms_) {
    if (m.exponent_of(v) != k) continue;
    Mono rest;
    rest.pw.reserve(m.pw.size());
    for (const auto& p : m.pw)
      if (p.first != v) rest.pw.push_back(p);
    out.terms_.emplace_back(std::move(rest), c);
  }
  return out;
}

std::set<VarId> Poly::vars() const {
  std::set<VarId> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m.pw) out.insert(v);
  return out;
}

void Poly::normalize() {
  std::sort(terms_.begin(), terms_.end(), term_before);
  std::size_t w = 0;
  for (std::size_t r = 0; r < terms_.size(); ++r) {
    if (w > 0 && terms_[w - 1].first == terms_[r].first) {
      terms_[w - 1].second += terms_[r].second;
      if (terms_[w - 1].second == 0) --w;
    } else {
      if (w != r) terms_[w] = std::move(terms_[r]);
      ++w;
    }
  }
  terms_.resize(w);
}

Poly Poly::from_terms(TermList terms) {
  Poly p;
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge_terms(terms_, o.terms_, true);
  return *this;
}

Poly Poly::scaled(const Mono& m, const Rat& c) const {
  Poly out;
  if (c == 0) return out;
  out.terms_.reserve(terms_.size());
  for (const auto& [mm, cc] : terms_) out.terms_.emplace_back(mono_mul(mm, m), cc * c);
  return out;
}

Poly Poly::sum(std::vector<Poly> parts) {
  if (parts.empty()) return Poly();
  while (parts.size() > 1) {
    std::vector<Poly> next;
    next.reserve(parts.size() / 2 + 1);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
      next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.terms_.empty() || b.terms_.empty()) return Poly();
  const Poly& small = a.terms_.size() <= b.terms_.size() ? a : b;
  const Poly& big = a.terms_.size() <= b.terms_.size() ? b : a;
  std::vector<Poly> parts;
  parts.reserve(small.terms_.size());
  for (const auto& [m, c] : small.terms_) parts.push_back(big.scaled(m, c));
  return Poly::sum(std::move(parts));
}

Poly& Poly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, cc] : terms_) cc *= c;
  return *this;
}

Poly Poly::pow(int e) const {
  if (e < 0) throw std::logic_error("Poly::pow negative exponent");
  Poly out(1L);
  Poly b = *this;
  for (int k = e; k > 0; k >>= 1) {
    if (k & 1) out *= b;
    if (k > 1) b *= b;
  }
  return out;
}

Poly Poly::substitute(const std::map<VarId, Poly>& sub) const {
  std::map<std::pair<VarId, int>, Poly> powers;
  auto power_of = [&](VarId v, int e) -> const Poly& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    return powers.emplace(key, sub.at(v).pow(e)).first->second;
  };
  std::vector<Poly> parts;
  parts.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    Poly term(c);
    Mono kept;
    for (const auto& [v, e] : m.pw) {
      if (sub.count(v)) {
        term *= power_of(v, e);
      } else {
        kept.pw.emplace_back(v, e);
      }
    }
    parts.push_back(term * from_term(std::move(kept), Rat(1)));
  }
  return sum(std::move(parts));
}

Poly Poly::relabel(const std::map<VarId, VarId>& ren) const {
  Poly out;
  out.terms_.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    Mono nm;
    nm.pw.reserve(m.pw.size());
    for (const auto& [v, e] : m.pw) {
      auto it = ren.find(v);
      nm.pw.emplace_back(it == ren.end() ? v : it->second, e);
    }
    std::sort(nm.pw.begin(), nm.pw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // merging is only needed if the renaming is not injective on this monomial
    Mono merged;
    for (const auto& p : nm.pw) {
      if (!merged.pw.empty() && merged.pw.back().first == p.first)
        merged.pw.back().second += p.second;
      else
        merged.pw.push_back(p);
    }
    out.terms_.emplace_back(std::move(merged), c);
  }
  out.normalize();
  return out;
}

Poly Poly::derivative(VarId v) const {
  // dividing out one power of v preserves term order
  Poly out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent_of(v);
    if (e == 0) continue;
    Mono dm;
    dm.pw.reserve(m.pw.size());
    for (const auto& p : m.pw) {
      if (p.first == v) {
        if (e > 1) dm.pw.emplace_back(v, e - 1);
      } else {
        dm.pw.push_back(p);
      }
    }
    out.terms_.emplace_back(std::move(dm), c * Rat(e));
  }
  return out;
}

Cplx Poly::eval(const std::map<VarId, Cplx>& point) const {
  Cplx out = 0;
  for (const auto& [m, c] : terms_) {
    Cplx term(rat_double(c), 0.0);
    for (const auto& [v, e] : m.pw) {
      auto it = point.find(v);
      if (it == point.end()) throw std::logic_error("Poly::eval unbound " + var_string(v));
      Cplx p = 1;
      for (int k = 0; k < e; ++k) p *= it->second;
      term *= p;
    }
    out += term;
  }
  return out;
}

Rat Poly::eval_rat(const std::map<VarId, Rat>& point) const {
  Rat out(0);
  for (const auto& [m, c] : terms_) {
    Rat term = c;
    for (const auto& [v, e] : m.pw) {
      auto it = point.find(v);
      if (it == point.end()) throw std::logic_error("Poly::eval_rat unbound " + var_string(v));
      term *= rat_pow(it->second, e);
    }
    out += term;
  }
  return out;
}

namespace {

// does d divide m, and the quotient monomial
std::optional<Mono> mono_div(const Mono& m, const Mono& d) {
  Mono out;
  std::size_t i = 0;
  for (const auto& [v, e] : d.pw) {
    while (i < m.pw.size() && m.pw[i].first < v) out.pw.push_back(m.pw[i++]);
    if (i == m.pw.size() || m.pw[i].first != v || m.pw[i].second < e) return std::nullopt;
    if (m.pw[i].second > e) out.pw.emplace_back(v, m.pw[i].second - e);
    ++i;
  }
  for (; i < m.pw.size(); ++i) out.pw.push_back(m.pw[i]);
  return out;
}

}  // namespace

std::optional<Poly> Poly::divexact(const Poly& divisor) const {
  if (divisor.is_zero()) return std::nullopt;
  if (divisor.is_constant()) {
    Poly out = *this;
    Rat inv = Rat(1) / divisor.constant_value();
    out *= inv;
    return out;
  }
  if (is_zero()) return Poly();

  const Mono& dlm = divisor.leading_mono();
  if (divisor.degree() == 1) {
    // synthetic division by lc*(x - s): split by powers of x, then
    // b_{k-1} = c_k + s*b_k downward; linear in the dividend size
    const VarId x = dlm.pw.front().first;
    const Rat& lc = divisor.leading_coeff();
    Poly s;
    for (std::size_t k = 1; k < divisor.terms_.size(); ++k)
      s.terms_.emplace_back(divisor.terms_[k].first, -(divisor.terms_[k].second / lc));
    const int d = degree_in(x);
    if (d == 0) return std::nullopt;
    std::vector<Poly> c(static_cast<std::size_t>(d) + 1);
    for (const auto& [m, cc] : terms_) {
      int e = m.exponent_of(x);
      Mono rest;
      rest.pw.reserve(m.pw.size());
      for (const auto& p : m.pw)
        if (p.first != x) rest.pw.push_back(p);
      c[static_cast<std::size_t>(e)].terms_.emplace_back(std::move(rest), cc);
    }
    std::vector<Poly> b(static_cast<std::size_t>(d));
    b[static_cast<std::size_t>(d - 1)] = c[static_cast<std::size_t>(d)];
    for (int k = d - 1; k >= 1; --k)
      b[static_cast<std::size_t>(k - 1)] =
          c[static_cast<std::size_t>(k)] + s * b[static_cast<std::size_t>(k)];
    if (!(c[0] + s * b[0]).is_zero()) return std::nullopt;
    std::vector<Poly> blocks;
    blocks.reserve(b.size());
    for (int k = 0; k < d; ++k) {
      Mono xk;
      if (k > 0) xk.pw.emplace_back(x, k);
      blocks.push_back(b[static_cast<std::size_t>(k)].scaled(xk, Rat(1) / lc));
    }
    return sum(std::move(blocks));
  }

  // general long division, quadratic; only hit by non-linear divisors
  Poly r = *this;
  Poly q;
  const Rat& dlc = divisor.leading_coeff();
  while (!r.is_zero()) {
    auto qm = mono_div(r.leading_mono(), dlm);
    if (!qm) return std::nullopt;
    Rat qc = r.leading_coeff() / dlc;
    Poly qt = from_term(*qm, qc);
    q += qt;
    r -= qt * divisor;
  }
  return q;
}

int Poly::compare(const Poly& a, const Poly& b) {
  auto ia = a.terms_.begin(), ib = b.terms_.begin();
  for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
    if (mono_less(ia->first, ib->first)) return -1;
    if (mono_less(ib->first, ia->first)) return 1;
    int c = cmp(ia->second, ib->second);
    if (c != 0) return c;
  }
  if (ia != a.terms_.end()) return 1;
  if (ib != b.terms_.end()) return -1;
  return 0;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat ac = abs(c);
    if (first) {
      if (c < 0) out += "-";
      first = false;
    } else {
      out += (c < 0) ? " - " : " + ";
    }
    bool coeff_shown = (ac != 1) || m.pw.empty();
    if (coeff_shown) out += ac.get_str();
    bool need_star = coeff_shown;
    for (const auto& [v, e] : m.pw) {
      if (need_star) out += "*";
      out += var_string(v);
      if (e > 1) out += "^" + std::to_string(e);
      need_star = true;
    }
  }
  return out;
}

Poly symmetrize(const Poly& f, const std::vector<std::vector<VarId>>& groups) {
  std::vector<std::vector<int>> cur;
  for (const auto& g : groups) {
    std::vector<int> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = static_cast<int>(i);
    cur.push_back(v);
  }
  auto advance = [&]() -> bool {
    for (std::size_t g = 0; g < cur.size(); ++g) {
      if (std::next_permutation(cur[g].begin(), cur[g].end())) return true;
      // wrapped around: reset and carry
    }
    return false;
  };
  std::vector<Poly> parts;
  while (true) {
    std::map<VarId, VarId> ren;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t i = 0; i < groups[g].size(); ++i)
        ren[groups[g][i]] = groups[g][static_cast<std::size_t>(cur[g][i])];
    parts.push_back(f.relabel(ren));
    if (!advance()) break;
  }
  return Poly::sum(std::move(parts));
}

}  // namespace qde
