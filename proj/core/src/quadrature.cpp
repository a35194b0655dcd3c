#include "ncres/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ncres/error.hpp"

namespace ncres {

QuadratureRule gauss_jacobi(int m, double a, double b) {
  if (m < 1) throw InvalidInput("quadrature needs at least one node");
  if (a <= -1.0 || b <= -1.0) throw InvalidInput("Jacobi exponents must exceed -1");
  // three-term recurrence of the monic Jacobi polynomials
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    double s = 2.0 * k + a + b;
    double alpha_k = (s == 0.0 || s + 2.0 == 0.0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    j(k, k) = alpha_k;
    if (k + 1 < m) {
      double kk = k + 1.0;
      double s1 = 2.0 * kk + a + b;
      double num = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b);
      double den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
      // the generic formula is 0/0 at k = 1 when a + b = -1
      double beta_k = k == 0 ? 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b)) : num / den;
      j(k, k + 1) = j(k + 1, k) = std::sqrt(beta_k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  double mu0 = std::pow(2.0, a + b + 1.0) * std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  QuadratureRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < m; ++i) {
    r.x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v * v;
  }
  return r;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int m) {
  QuadratureRule base = gauss_legendre(m);
  QuadratureRule r;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (int i = 0; i < m; ++i) {
      r.x.push_back(lo + 0.5 * h * (base.x[i] + 1.0));
      r.w.push_back(0.5 * h * base.w[i]);
    }
  }
  return r;
}

SphereQuadrature sphere_quadrature(int n, int m, bool normalized) {
  if (n < 1 || n > 4) throw InvalidInput("sphere quadrature supports n = 1..4");
  if (m < 1) throw InvalidInput("sphere quadrature needs nodes");
  SphereQuadrature q;
  q.n = n;
  if (n == 1) {
    q.nodes = {{1.0, 0.0, 0.0, 0.0}, {-1.0, 0.0, 0.0, 0.0}};
    q.weights = {1.0, 1.0};
  } else if (n == 2) {
    const int k = std::max(m, 3);
    for (int i = 0; i < k; ++i) {
      double phi = 2.0 * std::numbers::pi * (i + 0.5) / k;
      q.nodes.push_back({std::cos(phi), std::sin(phi), 0.0, 0.0});
      q.weights.push_back(2.0 * std::numbers::pi / k);
    }
  } else {
    // omega = (t, sqrt(1 - t^2) omega'), dS = (1 - t^2)^{(n-3)/2} dt dS'
    auto sub = sphere_quadrature(n - 1, m, false);
    double e = 0.5 * (n - 3);
    auto gj = gauss_jacobi(m, e, e);
    for (std::size_t i = 0; i < gj.x.size(); ++i) {
      double t = gj.x[i], s = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (std::size_t j = 0; j < sub.nodes.size(); ++j) {
        std::array<double, 4> p{};
        p[0] = t;
        for (int d = 0; d < n - 1; ++d) p[d + 1] = s * sub.nodes[j][d];
        q.nodes.push_back(p);
        q.weights.push_back(gj.w[i] * sub.weights[j]);
      }
    }
  }
  if (normalized) {
    double f = std::pow(2.0 * std::numbers::pi, -n);
    for (auto& w : q.weights) w *= f;
  }
  return q;
}

}  // namespace ncres
