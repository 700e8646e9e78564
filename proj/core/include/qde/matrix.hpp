#pragma once

#include <stdexcept>
#include <vector>

namespace qde {

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, const T& fill = T{})
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n, const T& one) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = one;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& at(int r, int c) { return a_.at(static_cast<std::size_t>(r) * cols_ + c); }
  const T& at(int r, int c) const { return a_.at(static_cast<std::size_t>(r) * cols_ + c); }

  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw std::logic_error("Mat: shape mismatch");
    Mat out(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        const T& xik = x.at(i, k);
        for (int j = 0; j < y.cols_; ++j) out.at(i, j) += xik * y.at(k, j);
      }
    return out;
  }

  friend Mat operator+(Mat x, const Mat& y) {
    for (std::size_t i = 0; i < x.a_.size(); ++i) x.a_[i] += y.a_[i];
    return x;
  }

  friend Mat operator-(Mat x, const Mat& y) {
    for (std::size_t i = 0; i < x.a_.size(); ++i) x.a_[i] -= y.a_[i];
    return x;
  }

  friend bool operator==(const Mat&, const Mat&) = default;

  template <class F>
  auto map(F&& f) const {
    using U = decltype(f(a_[0]));
    Mat<U> out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.at(i, j) = f(at(i, j));
    return out;
  }

 private:
  int rows_{0}, cols_{0};
  std::vector<T> a_;

  template <class U>
  friend class Mat;
};

}  // namespace qde
