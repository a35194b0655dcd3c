#include "ncres/lattice_sums.hpp"

#include <cmath>
#include <numbers>

#include "ncres/error.hpp"

namespace ncres {

double gaussian_sum_1d(double a, int K) {
  if (!(a > 0.0)) throw InvalidInput("gaussian sum needs a > 0");
  if (K < 0) {
    // Poisson: sum e^{-a j^2} = sqrt(pi/a) sum e^{-pi^2 j^2 / a}
    if (a < 1.0) {
      double s = 1.0, c = std::numbers::pi * std::numbers::pi / a;
      for (int j = 1; j < 50; ++j) {
        double t = 2.0 * std::exp(-c * j * j);
        s += t;
        if (t < 1e-18 * s) break;
      }
      return std::sqrt(std::numbers::pi / a) * s;
    }
    K = 1 << 20;
  }
  double s = 1.0;
  for (int j = 1; j <= K; ++j) {
    double t = 2.0 * std::exp(-a * double(j) * j);
    s += t;
    if (t < 1e-18 * s) break;
  }
  return s;
}

LatticeSum lattice_sum(int n, int K, const std::function<cplx(const Index&)>& f, double bound, double power,
                       bool skip_origin) {
  if (n < 1 || n > kMaxDim) throw InvalidInput("lattice dimension out of range");
  if (power <= n) throw InvalidInput("tail bound needs decay faster than |k|^-n");
  LatticeSum out;
  Index k{};
  std::function<void(int)> rec = [&](int d) {
    if (d == n) {
      if (skip_origin && linf(k) == 0) return;
      out.value += f(k);
      return;
    }
    for (int i = -K; i <= K; ++i) {
      k[d] = i;
      rec(d + 1);
    }
    k[d] = 0;
  };
  rec(0);
  // shell s holds (2s+1)^n - (2s-1)^n <= 2n (2s+1)^{n-1} points; integrate the bound
  double c = 2.0 * n * std::pow(2.0, n - 1) * std::pow(1.0 + 0.5 / (K + 1), n - 1);
  out.tail = bound * c * std::pow(K + 0.5, n - power) / (power - n);
  return out;
}

LatticeSum flat_heat_trace(int n, double t, int K) {
  double in = gaussian_sum_1d(t, K);
  double tau = 0.0;  // 1d tail, summed directly to avoid cancellation
  for (int j = K + 1;; ++j) {
    double v = 2.0 * std::exp(-t * double(j) * j);
    tau += v;
    if (v < 1e-20 * (tau + 1e-300) || v == 0.0) break;
  }
  LatticeSum out;
  out.value = std::pow(in, n);
  // (in + tau)^n - in^n
  double binom = 1.0;
  for (int i = 1; i <= n; ++i) {
    binom = binom * (n - i + 1) / i;
    out.tail += binom * std::pow(in, n - i) * std::pow(tau, i);
  }
  return out;
}

}  // namespace ncres
