#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "ncres/theta.hpp"

namespace ncres {

// Closed keyhole around the spectrum: outer circle of radius R (counter-clockwise),
// the upper side of the cut arg = beta from R down to eps, the inner circle of radius
// eps (clockwise) and the lower side of the cut back out to R.
struct ContourSpec {
  double beta = std::numbers::pi;
  double eps = 0.0;
  double R = 0.0;
  int panels = 4;
  int nodes = 16;  // Gauss-Legendre nodes per panel

  bool operator==(const ContourSpec&) const = default;
};

class Contour {
 public:
  struct Point {
    cplx lambda;
    cplx log_lambda;  // branch with arg in [beta - 2 pi, beta]
    cplx weight;      // includes d lambda
  };

  explicit Contour(const ContourSpec& spec);

  const ContourSpec& spec() const { return spec_; }
  // fine rule and the half-panel rule used for the error estimate
  const std::vector<Point>& fine() const { return fine_; }
  const std::vector<Point>& coarse() const { return coarse_; }

 private:
  ContourSpec spec_;
  std::vector<Point> fine_, coarse_;
};

}  // namespace ncres
