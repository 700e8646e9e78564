#include "qde/gammafn.hpp"

#include <cmath>

namespace qde {

namespace {

constexpr double kG = 607.0 / 128.0;
constexpr double kCoef[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * M_PI);

Cplx lanczos(Cplx z) {
  // valid for Re z >= 1/2
  Cplx a{kCoef[0], 0.0};
  for (int k = 1; k < 15; ++k) a += kCoef[k] / (z - 1.0 + static_cast<double>(k));
  const Cplx t = z + (kG - 0.5);
  return kLogSqrtTwoPi + (z - 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace

Cplx log_gamma(Cplx z) {
  if (z.real() >= 0.5) return lanczos(z);
  // reflection through sin keeps the pole structure exact
  const Cplx s = std::sin(M_PI * z);
  return std::log(M_PI) - std::log(s) - lanczos(1.0 - z);
}

Cplx gamma_fn(Cplx z) { return std::exp(log_gamma(z)); }

Cplx stirling_gap(Cplx z) {
  return log_gamma(z + 1.0) - (z * std::log(z) - z + 0.5 * std::log(2.0 * M_PI * z));
}

}  // namespace qde
