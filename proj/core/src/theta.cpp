#include "ncres/theta.hpp"

#include <cmath>
#include <sstream>

#include "ncres/error.hpp"

namespace ncres {

std::string index_to_string(const Index& k, int n) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << k[i];
  os << ')';
  return os.str();
}

ThetaMatrix::ThetaMatrix(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) throw InvalidInput("dimension must be in 1..4, got " + std::to_string(n));
}

ThetaMatrix::ThetaMatrix(int n, const double* entries) : ThetaMatrix(n) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e_[i][j] = entries[i * n + j];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double scale = std::max(1.0, std::abs(e_[i][j]));
      if (std::abs(e_[i][j] + e_[j][i]) > 1e-14 * scale)
        throw InvalidInput("theta must be antisymmetric (entry " + std::to_string(i) + "," + std::to_string(j) + ")");
      if (e_[i][j] != 0.0) zero_ = false;
    }
  }
  // store the exact antisymmetric part
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double a = 0.5 * (e_[i][j] - e_[j][i]);
      e_[i][j] = a;
      e_[j][i] = -a;
    }
}

ThetaMatrix ThetaMatrix::two_dim(double t) {
  double e[4] = {0.0, t, -t, 0.0};
  return ThetaMatrix(2, e);
}

double ThetaMatrix::pairing(const Index& k, const Index& l) const {
  if (zero_) return 0.0;
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (k[i] == 0) continue;
    double row = 0.0;
    for (int j = 0; j < n_; ++j) row += e_[i][j] * l[j];
    s += k[i] * row;
  }
  return s;
}

bool ThetaMatrix::kernel_lattice(const Index& k) const {
  if (zero_) return true;
  for (int i = 0; i < n_; ++i) {
    double v = 0.0;
    for (int j = 0; j < n_; ++j) v += e_[i][j] * k[j];
    if (std::abs(v - std::round(v)) > 1e-12) return false;
  }
  return true;
}

bool ThetaMatrix::operator==(const ThetaMatrix& o) const {
  if (n_ != o.n_) return false;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (e_[i][j] != o.e_[i][j]) return false;
  return true;
}

}  // namespace ncres
