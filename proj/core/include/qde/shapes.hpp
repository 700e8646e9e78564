#pragma once

#include <string>
#include <vector>

namespace qde {

// Composition lambda of n into N parts (zero parts allowed).
struct Shape {
  std::vector<int> lam;

  Shape() = default;
  explicit Shape(std::vector<int> parts);

  int N() const { return static_cast<int>(lam.size()); }
  int n() const;
  int part(int i) const { return lam.at(static_cast<std::size_t>(i - 1)); }  // 1-based

  // cum(i) = lambda_1 + ... + lambda_i, cum(0) = 0, valid for 0..N
  int cum(int i) const;
  int level_sum() const;       // sum of cum(i), i = 1..N-1: total level variable count
  long level_sum_sq() const;   // sum of cum(i)^2, i = 1..N-1
  long pair_product() const;   // sum_{i<j} lambda_i lambda_j
  long basis_size() const;     // n! / prod lambda_i!
  long moved_basis_size(int i) const;  // lambda_i (n-1)! / prod lambda_k!
  long det_exponent() const;   // 2 (n-2)! pair_product / prod lambda_k!

  // shape with part a decremented and part b incremented (1-based)
  Shape transfer(int a, int b) const;

  friend bool operator==(const Shape&, const Shape&) = default;
  std::string str() const;
};

// Ordered set partition of {1..n} with block sizes lambda.
struct IndexSet {
  std::vector<std::vector<int>> blocks;  // each sorted ascending, 1-based elements

  int n() const;
  int N() const { return static_cast<int>(blocks.size()); }
  Shape shape() const;
  int block_of(int a) const;                 // 1-based block index containing a
  std::vector<int> word() const;             // membership word, word[a-1] = block_of(a)
  std::vector<int> union_prefix(int i) const;  // sorted union of blocks 1..i
  int element(int i, int m) const;           // m-th smallest element of block i (1-based)

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  std::string str() const;
};

IndexSet index_set_from_word(const std::vector<int>& word, int N);

// all of I_lambda, ordered lexicographically by membership word
std::vector<IndexSet> enumerate_index_sets(const Shape& s);

// (I)^b_{beta->alpha}: move the b-th smallest element of block beta into block alpha
IndexSet move_element(const IndexSet& I, int beta, int alpha, int b);

// I_{i,j;m1,m2}: exchange the m1-th element of block i with the m2-th of block j
IndexSet swap_pair(const IndexSet& I, int i, int j, int m1, int m2);

IndexSet imax(const Shape& s);
IndexSet imin(const Shape& s);
// I^{max,j}: blocks {i : cum(j)-cum(a) < i <= cum(j)-cum(a-1)} on ground set {1..cum(j)}
IndexSet imax_level(const Shape& s, int j);

struct Perm {
  std::vector<int> img;  // one-line notation, 1-based images

  Perm() = default;
  explicit Perm(std::vector<int> one_line) : img(std::move(one_line)) {}

  int n() const { return static_cast<int>(img.size()); }
  int operator()(int i) const { return img.at(static_cast<std::size_t>(i - 1)); }

  static Perm identity(int n);
  static Perm transposition(int n, int i, int j);
  static Perm adjacent(int n, int i) { return transposition(n, i, i + 1); }
  static Perm longest(int n);  // i -> n+1-i

  Perm compose(const Perm& o) const;  // (this o other)(i) = this(other(i))
  Perm inverse() const;
  int length() const;  // inversions
  int sign() const { return length() % 2 == 0 ? 1 : -1; }
  bool is_identity() const;
  // factorization into adjacent transpositions s_{i}, applied right to left
  std::vector<int> reduced_word() const;

  friend bool operator==(const Perm&, const Perm&) = default;
  std::string str() const;
};

std::vector<Perm> all_perms(int n);  // lex order on one-line words

// blocks mapped through sigma elementwise, then sorted
IndexSet apply_perm(const Perm& sigma, const IndexSet& I);

// sigma^I: concatenation of the blocks of I as a one-line word
Perm sigma_up(const IndexSet& I);
// sigma_I = sigma^I (sigma^{Imax})^{-1}
Perm sigma_lo(const IndexSet& I);

}  // namespace qde
