#pragma once

#include <complex>

namespace qde {

using Cplx = std::complex<double>;

// principal-branch log Gamma, Lanczos with reflection for Re z < 1/2
Cplx log_gamma(Cplx z);

Cplx gamma_fn(Cplx z);

// log Gamma(z+1) - (z log z - z + log sqrt(2 pi z)), the Stirling remainder
Cplx stirling_gap(Cplx z);

}  // namespace qde
