#include "ncres/contour.hpp"

#include <cmath>

#include "ncres/error.hpp"
#include "ncres/quadrature.hpp"

namespace ncres {

namespace {

std::vector<Contour::Point> build(const ContourSpec& s, int panels) {
  const double two_pi = 2.0 * std::numbers::pi;
  const cplx I(0.0, 1.0);
  std::vector<Contour::Point> pts;
  auto arc = [&](double radius, double a0, double a1) {
    auto q = composite_gauss_legendre(a0, a1, panels, s.nodes);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      double phi = q.x[i];
      cplx lam = std::polar(radius, phi);
      pts.push_back({lam, cplx(std::log(radius), phi), q.w[i] * I * lam});
    }
  };
  // radial pieces in the variable u = log r
  auto ray = [&](double arg, double u0, double u1) {
    auto q = composite_gauss_legendre(u0, u1, panels, s.nodes);
    cplx dir = std::polar(1.0, arg);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      double r = std::exp(q.x[i]);
      cplx lam = r * dir;
      pts.push_back({lam, cplx(q.x[i], arg), q.w[i] * lam});
    }
  };
  const double lr = std::log(s.R), le = std::log(s.eps);
  arc(s.R, s.beta - two_pi, s.beta);
  ray(s.beta, lr, le);
  arc(s.eps, s.beta, s.beta - two_pi);
  ray(s.beta - two_pi, le, lr);
  return pts;
}

}  // namespace

Contour::Contour(const ContourSpec& spec) : spec_(spec) {
  if (!(spec.eps > 0.0) || !(spec.R > spec.eps)) throw InvalidInput("contour needs 0 < eps < R");
  if (spec.panels < 2 || spec.nodes < 2) throw InvalidInput("contour needs at least 2 panels and 2 nodes");
  fine_ = build(spec, spec.panels);
  coarse_ = build(spec, spec.panels / 2);
}

}  // namespace ncres
