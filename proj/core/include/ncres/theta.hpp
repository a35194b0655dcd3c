#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <string>

namespace ncres {

using cplx = std::complex<double>;

constexpr int kMaxDim = 4;

// Lattice point of Z^n, unused trailing slots are zero.
using Index = std::array<int, kMaxDim>;

inline Index make_index(std::initializer_list<int> v) {
  Index k{};
  int i = 0;
  for (int x : v) k[i++] = x;
  return k;
}

inline Index operator+(const Index& a, const Index& b) {
  Index r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

inline Index operator-(const Index& a) {
  Index r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = -a[i];
  return r;
}

inline Index operator-(const Index& a, const Index& b) { return a + (-b); }

inline int linf(const Index& k) {
  int m = 0;
  for (int x : k) m = std::max(m, x < 0 ? -x : x);
  return m;
}

std::string index_to_string(const Index& k, int n);

// Antisymmetric deformation matrix. The zero matrix is the commutative torus.
class ThetaMatrix {
 public:
  ThetaMatrix() = default;
  explicit ThetaMatrix(int n);
  // Row-major n*n entries. Throws InvalidInput unless antisymmetric.
  ThetaMatrix(int n, const double* entries);

  static ThetaMatrix zero(int n) { return ThetaMatrix(n); }
  // n = 2 with theta_12 = t, theta_21 = -t.
  static ThetaMatrix two_dim(double t);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return e_[i][j]; }
  bool is_zero() const { return zero_; }

  // <k, theta l>
  double pairing(const Index& k, const Index& l) const;
  // True when theta k lies in Z^n (within 1e-12).
  bool kernel_lattice(const Index& k) const;

  bool operator==(const ThetaMatrix& o) const;
  bool operator!=(const ThetaMatrix& o) const { return !(*this == o); }

 private:
  int n_ = 0;
  double e_[kMaxDim][kMaxDim] = {};
  bool zero_ = true;
};

}  // namespace ncres
