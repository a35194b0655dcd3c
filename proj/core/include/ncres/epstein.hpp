#pragma once

#include "ncres/theta.hpp"

namespace ncres {

// Lanczos Gamma for complex argument (reflection for Re z < 1/2).
cplx gamma_complex(cplx z);
// 1/Gamma, entire; exact zeros at the non-positive integers.
cplx rgamma_complex(cplx z);
// Upper incomplete Gamma(a, x) for complex a and x > 0.
cplx upper_gamma(cplx a, double x);

struct EpsteinValue {
  cplx value{};
  double error = 0.0;  // first omitted shell of the theta series
};

// Z(s) = sum_{k in Z^n, k != 0} |k|^{-2s}, continued to s != n/2 through
// pi^{-s} Gamma(s) Z(s) = sum' [G(s, pi|k|^2) + G(n/2 - s, pi|k|^2)] + 1/(s - n/2) - 1/s
// with G(a, x) = x^{-a} Gamma(a, x). K bounds |k|_inf in the theta series.
EpsteinValue epstein_zeta(cplx s, int n = 2, int K = 6);

// Direct lattice sum for Re s > n/2 (test oracle).
EpsteinValue epstein_direct(double s, int n, int K);

}  // namespace ncres
