#include "qde/shapes.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qde {

Shape::Shape(std::vector<int> parts) : lam(std::move(parts)) {
  for (int p : lam)
    if (p < 0) throw std::invalid_argument("Shape: negative part");
}

int Shape::n() const { return std::accumulate(lam.begin(), lam.end(), 0); }

int Shape::cum(int i) const {
  if (i < 0 || i > N()) throw std::out_of_range("Shape::cum");
  return std::accumulate(lam.begin(), lam.begin() + i, 0);
}

int Shape::level_sum() const {
  int s = 0;
  for (int i = 1; i < N(); ++i) s += cum(i);
  return s;
}

long Shape::level_sum_sq() const {
  long s = 0;
  for (int i = 1; i < N(); ++i) s += static_cast<long>(cum(i)) * cum(i);
  return s;
}

long Shape::pair_product() const {
  long s = 0;
  for (int i = 0; i < N(); ++i)
    for (int j = i + 1; j < N(); ++j) s += static_cast<long>(lam[i]) * lam[j];
  return s;
}

namespace {
long factorial(int k) {
  long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}
}  // namespace

long Shape::basis_size() const {
  long d = factorial(n());
  for (int p : lam) d /= factorial(p);
  return d;
}

long Shape::moved_basis_size(int i) const {
  if (n() == 0) return 0;
  long d = factorial(n() - 1);
  for (int p : lam) d /= factorial(p);
  return d * part(i);
}

long Shape::det_exponent() const {
  if (n() < 2) return 0;
  long d = 2 * factorial(n() - 2) * pair_product();
  for (int p : lam) d /= factorial(p);
  return d;
}

Shape Shape::transfer(int a, int b) const {
  Shape out = *this;
  out.lam.at(static_cast<std::size_t>(a - 1)) -= 1;
  out.lam.at(static_cast<std::size_t>(b - 1)) += 1;
  if (out.lam[static_cast<std::size_t>(a - 1)] < 0)
    throw std::invalid_argument("Shape::transfer from empty part");
  return out;
}

std::string Shape::str() const {
  std::string s = "(";
  for (int i = 0; i < N(); ++i) {
    if (i) s += ",";
    s += std::to_string(lam[static_cast<std::size_t>(i)]);
  }
  return s + ")";
}

int IndexSet::n() const {
  int c = 0;
  for (const auto& b : blocks) c += static_cast<int>(b.size());
  return c;
}

Shape IndexSet::shape() const {
  std::vector<int> parts;
  for (const auto& b : blocks) parts.push_back(static_cast<int>(b.size()));
  return Shape(parts);
}

int IndexSet::block_of(int a) const {
  for (int i = 0; i < N(); ++i)
    for (int e : blocks[static_cast<std::size_t>(i)])
      if (e == a) return i + 1;
  throw std::out_of_range("IndexSet::block_of");
}

std::vector<int> IndexSet::word() const {
  std::vector<int> w(static_cast<std::size_t>(n()), 0);
  for (int i = 0; i < N(); ++i)
    for (int e : blocks[static_cast<std::size_t>(i)]) w.at(static_cast<std::size_t>(e - 1)) = i + 1;
  return w;
}

std::vector<int> IndexSet::union_prefix(int i) const {
  std::vector<int> u;
  for (int k = 0; k < i; ++k)
    u.insert(u.end(), blocks[static_cast<std::size_t>(k)].begin(),
             blocks[static_cast<std::size_t>(k)].end());
  std::sort(u.begin(), u.end());
  return u;
}

int IndexSet::element(int i, int m) const {
  return blocks.at(static_cast<std::size_t>(i - 1)).at(static_cast<std::size_t>(m - 1));
}

std::string IndexSet::str() const {
  std::string s = "(";
  for (int i = 0; i < N(); ++i) {
    if (i) s += ",";
    s += "{";
    const auto& b = blocks[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(b[k]);
    }
    s += "}";
  }
  return s + ")";
}

IndexSet index_set_from_word(const std::vector<int>& word, int N) {
  IndexSet I;
  I.blocks.assign(static_cast<std::size_t>(N), {});
  for (std::size_t a = 0; a < word.size(); ++a)
    I.blocks.at(static_cast<std::size_t>(word[a] - 1)).push_back(static_cast<int>(a + 1));
  return I;
}

std::vector<IndexSet> enumerate_index_sets(const Shape& s) {
  std::vector<int> word;
  for (int i = 1; i <= s.N(); ++i)
    for (int k = 0; k < s.part(i); ++k) word.push_back(i);
  std::sort(word.begin(), word.end());
  std::vector<IndexSet> out;
  do {
    out.push_back(index_set_from_word(word, s.N()));
  } while (std::next_permutation(word.begin(), word.end()));
  return out;
}

IndexSet move_element(const IndexSet& I, int beta, int alpha, int b) {
  IndexSet out = I;
  auto& from = out.blocks.at(static_cast<std::size_t>(beta - 1));
  int elt = from.at(static_cast<std::size_t>(b - 1));
  from.erase(from.begin() + (b - 1));
  auto& to = out.blocks.at(static_cast<std::size_t>(alpha - 1));
  to.insert(std::lower_bound(to.begin(), to.end(), elt), elt);
  return out;
}

IndexSet swap_pair(const IndexSet& I, int i, int j, int m1, int m2) {
  IndexSet out = I;
  auto& bi = out.blocks.at(static_cast<std::size_t>(i - 1));
  auto& bj = out.blocks.at(static_cast<std::size_t>(j - 1));
  std::swap(bi.at(static_cast<std::size_t>(m1 - 1)), bj.at(static_cast<std::size_t>(m2 - 1)));
  std::sort(bi.begin(), bi.end());
  std::sort(bj.begin(), bj.end());
  return out;
}

IndexSet imax(const Shape& s) {
  IndexSet I;
  int hi = s.n();
  for (int i = 1; i <= s.N(); ++i) {
    std::vector<int> b;
    for (int k = hi - s.part(i) + 1; k <= hi; ++k) b.push_back(k);
    hi -= s.part(i);
    I.blocks.push_back(b);
  }
  return I;
}

IndexSet imin(const Shape& s) {
  IndexSet I;
  int lo = 1;
  for (int i = 1; i <= s.N(); ++i) {
    std::vector<int> b;
    for (int k = lo; k < lo + s.part(i); ++k) b.push_back(k);
    lo += s.part(i);
    I.blocks.push_back(b);
  }
  return I;
}

IndexSet imax_level(const Shape& s, int j) {
  IndexSet I;
  for (int a = 1; a <= s.N(); ++a) {
    std::vector<int> b;
    int lo = s.cum(j) - s.cum(a);
    int hi = s.cum(j) - s.cum(a - 1);
    for (int k = lo + 1; k <= hi; ++k)
      if (k >= 1) b.push_back(k);
    I.blocks.push_back(b);
  }
  return I;
}

Perm Perm::identity(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  return Perm(v);
}

Perm Perm::transposition(int n, int i, int j) {
  Perm p = identity(n);
  std::swap(p.img.at(static_cast<std::size_t>(i - 1)), p.img.at(static_cast<std::size_t>(j - 1)));
  return p;
}

Perm Perm::longest(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) v[static_cast<std::size_t>(i - 1)] = n + 1 - i;
  return Perm(v);
}

Perm Perm::compose(const Perm& o) const {
  std::vector<int> v(img.size());
  for (int i = 1; i <= n(); ++i) v[static_cast<std::size_t>(i - 1)] = (*this)(o(i));
  return Perm(v);
}

Perm Perm::inverse() const {
  std::vector<int> v(img.size());
  for (int i = 1; i <= n(); ++i) v[static_cast<std::size_t>((*this)(i)-1)] = i;
  return Perm(v);
}

int Perm::length() const {
  int inv = 0;
  for (int i = 1; i <= n(); ++i)
    for (int j = i + 1; j <= n(); ++j)
      if ((*this)(i) > (*this)(j)) ++inv;
  return inv;
}

bool Perm::is_identity() const {
  for (int i = 1; i <= n(); ++i)
    if ((*this)(i) != i) return false;
  return true;
}

std::vector<int> Perm::reduced_word() const {
  // bubble sort: each adjacent swap that removes an inversion contributes a
  // letter; word applies right to left, so collect in reverse
  std::vector<int> w;
  std::vector<int> v = img;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (v[i] > v[i + 1]) {
        std::swap(v[i], v[i + 1]);
        w.push_back(static_cast<int>(i + 1));
        moved = true;
      }
    }
  }
  std::reverse(w.begin(), w.end());
  return w;
}

std::string Perm::str() const {
  std::string s = "[";
  for (int i = 1; i <= n(); ++i) {
    if (i > 1) s += ",";
    s += std::to_string((*this)(i));
  }
  return s + "]";
}

std::vector<Perm> all_perms(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  std::vector<Perm> out;
  do {
    out.push_back(Perm(v));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

IndexSet apply_perm(const Perm& sigma, const IndexSet& I) {
  IndexSet out = I;
  for (auto& b : out.blocks) {
    for (int& e : b) e = sigma(e);
    std::sort(b.begin(), b.end());
  }
  return out;
}

Perm sigma_up(const IndexSet& I) {
  std::vector<int> v;
  for (const auto& b : I.blocks) v.insert(v.end(), b.begin(), b.end());
  return Perm(v);
}

Perm sigma_lo(const IndexSet& I) { return sigma_up(I).compose(sigma_up(imax(I.shape())).inverse()); }

}  // namespace qde
