#include "ncres/epstein.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "ncres/error.hpp"
#include "ncres/lattice_sums.hpp"

namespace ncres {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos, g = 7, n = 9
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  cplx t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}

}  // namespace

cplx gamma_complex(cplx z) {
  if (z.real() < 0.5) {
    cplx s = std::sin(kPi * z);
    if (s == cplx(0.0)) throw InvalidInput("Gamma pole");
    return kPi / (s * lanczos(1.0 - z));
  }
  return lanczos(z);
}

cplx rgamma_complex(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) return 0.0;
  if (z.real() < 0.5) return std::sin(kPi * z) * lanczos(1.0 - z) / kPi;
  return 1.0 / lanczos(z);
}

cplx upper_gamma(cplx a, double x) {
  if (!(x >= 0.5)) throw InvalidInput("upper incomplete Gamma implemented for x >= 1/2");
  // continued fraction, modified Lentz
  const double tiny = 1e-300;
  cplx b = x + 1.0 - a;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 10000; ++i) {
    cplx an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return std::exp(-x + a * std::log(x)) * h;
  }
  throw ConvergenceError("incomplete Gamma continued fraction", std::abs(h));
}

EpsteinValue epstein_zeta(cplx s, int n, int K) {
  if (n < 1 || n > kMaxDim) throw InvalidInput("Epstein dimension out of range");
  if (std::abs(s - 0.5 * n) < 1e-14) throw InvalidInput("Epstein zeta has its pole at s = n/2");
  // multiplicities of |k|^2 in the box
  std::map<long, long> shells;
  Index k{};
  std::function<void(int)> rec = [&](int d) {
    if (d == n) {
      long r2 = 0;
      for (int i = 0; i < n; ++i) r2 += long(k[i]) * k[i];
      if (r2 > 0) ++shells[r2];
      return;
    }
    for (int i = -K; i <= K; ++i) {
      k[d] = i;
      rec(d + 1);
    }
    k[d] = 0;
  };
  rec(0);
  const cplx s2 = 0.5 * n - s;
  auto G = [](cplx a, double x) { return std::exp(-a * std::log(x)) * upper_gamma(a, x); };
  cplx sum = 0.0;
  for (const auto& [r2, cnt] : shells) {
    double x = kPi * double(r2);
    sum += double(cnt) * (G(s, x) + G(s2, x));
  }
  // Z = pi^s [ (sum + 1/(s - n/2)) / Gamma(s) - 1/Gamma(s + 1) ]
  cplx ps = std::exp(s * std::log(kPi));
  EpsteinValue out;
  out.value = ps * (rgamma_complex(s) * (sum + 1.0 / (s - 0.5 * n)) - rgamma_complex(s + 1.0));
  double x = kPi * double(K + 1) * double(K + 1);
  double shell = 2.0 * n * std::pow(2.0 * K + 3.0, n - 1);
  out.error = std::abs(ps * rgamma_complex(s)) * shell * std::abs(G(s, x) + G(s2, x));
  return out;
}

EpsteinValue epstein_direct(double s, int n, int K) {
  if (s <= 0.5 * n) throw InvalidInput("direct Epstein sum needs Re s > n/2");
  auto r = lattice_sum(
      n, K,
      [&](const Index& k) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += double(k[i]) * k[i];
        return cplx(std::pow(r2, -s));
      },
      1.0, 2.0 * s, true);
  return {r.value, r.tail};
}

}  // namespace ncres
