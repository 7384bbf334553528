#pragma once

#include <complex>

namespace wickconv::bessel {

// Modified Bessel K0(z) for Re z > 0 (right half-plane, branch-cut side
// excluded). Relative accuracy ~1e-11 across the domain.
std::complex<double> k0(std::complex<double> z);

// K1(z), same domain. Needed as the derivative seed: K0'(z) = -K1(z).
std::complex<double> k1(std::complex<double> z);

}  // namespace wickconv::bessel
