#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace qde {

using Rat = mpq_class;
using Cplx = std::complex<double>;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// canonical "p" or "p/q" with the sign on the numerator
inline std::string rat_string(const Rat& r) { return r.get_str(); }

inline double rat_double(const Rat& r) { return r.get_d(); }

inline Rat rat_pow(const Rat& base, int e) {
  Rat out(1);
  Rat b = base;
  int k = e;
  if (k < 0) {
    b = Rat(1) / b;
    k = -k;
  }
  for (; k > 0; --k) out *= b;
  return out;
}

}  // namespace qde
