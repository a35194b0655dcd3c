#pragma once

#include <array>
#include <vector>

namespace ncres {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Jacobi on [-1, 1] with weight (1-x)^alpha (1+x)^beta, Golub-Welsch.
QuadratureRule gauss_jacobi(int m, double alpha, double beta);
inline QuadratureRule gauss_legendre(int m) { return gauss_jacobi(m, 0.0, 0.0); }

// Composite Gauss-Legendre on [a, b] split into equal panels.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int m);

// Product rule on S^{n-1}, n = 1..4: trapezoid in the azimuth, Gauss-Jacobi in the
// polar coordinates. m is the node count per coordinate. With normalized = true the
// weights sum to vol(S^{n-1}) / (2 pi)^n.
struct SphereQuadrature {
  int n = 0;
  std::vector<std::array<double, 4>> nodes;
  std::vector<double> weights;
};

SphereQuadrature sphere_quadrature(int n, int m, bool normalized = true);

}  // namespace ncres
