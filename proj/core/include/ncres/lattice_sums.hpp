#pragma once

#include <functional>

#include "ncres/theta.hpp"

namespace ncres {

// sum_{|j| <= K} exp(-a j^2); K < 0 means all of Z (Poisson dual used for small a)
double gaussian_sum_1d(double a, int K = -1);

struct LatticeSum {
  cplx value{};
  double tail = 0.0;  // bound on the omitted part
};

// sum over |k|_inf <= K of f(k), with k = 0 skipped when skip_origin. The tail is
// bounded assuming |f(k)| <= bound * |k|_inf^{-power} outside the box (power > n).
LatticeSum lattice_sum(int n, int K, const std::function<cplx(const Index&)>& f, double bound, double power,
                       bool skip_origin = false);

// sum_{|k|_inf <= K} exp(-t |k|^2) in dimension n, and the tail beyond K.
LatticeSum flat_heat_trace(int n, double t, int K);

}  // namespace ncres
