#include "ncres/heat_geometry.hpp"

#include <cmath>

#include "ncres/epstein.hpp"
#include "ncres/error.hpp"
#include "ncres/parallel.hpp"

namespace ncres {

ClassicalSymbol conformal_laplacian(const ConformalData& cd) {
  const ThetaMatrix& th = cd.h.theta();
  if (th.dim() != 2) throw InvalidInput("the conformal Laplacian lives on the 2-torus");
  if (!(cd.modulus.imag() > 0.0)) throw InvalidInput("modulus needs Im > 0");
  if (!is_self_adjoint(cd.h, 1e-12)) throw InvalidInput("conformal factor must be self-adjoint");
  const cplx tau = cd.modulus;
  NCElement k2 = exp_element(cd.h, cd.exp);
  // d k^2 = delta_1 k^2 + conj(tau) delta_2 k^2
  NCElement dk2 = add(derive(k2, 0), scale(derive(k2, 1), std::conj(tau)));
  auto R = [&](const NCElement& x, cplx c) { return MultiplierCoefficient::right(scale(x, c)); };
  std::vector<DifferentialTerm> t = {
      {make_index({2, 0}), R(k2, 1.0)},
      {make_index({1, 1}), R(k2, 2.0 * tau.real())},
      {make_index({0, 2}), R(k2, std::norm(tau))},
      {make_index({1, 0}), R(dk2, 1.0)},
      {make_index({0, 1}), R(dk2, tau)},
  };
  return from_differential(th, t);
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kResidue:
      return "residue-derived";
    case Provenance::kLogResidue:
      return "residue-derived(log)";
    case Provenance::kOracleFit:
      return "oracle-fitted";
    case Provenance::kOutOfRange:
      return "out-of-range";
  }
  return "?";
}

const HeatTerm* HeatExpansion::find(double exponent) const {
  for (const auto& t : terms)
    if (std::abs(t.exponent - cplx(exponent)) < 1e-12) return &t;
  return nullptr;
}

HeatExpansion heat_coefficients(const ClassicalSymbol& A, const ClassicalSymbol& Q, int depth, const HeatOptions& opt) {
  const int n = A.dim();
  const double q = real_order(Q);
  HeatExpansion out;
  out.terms.resize(depth);
  ZetaRequest req;
  req.regularization = opt.regularization;
  req.residue = opt.residue;
  parallel_for(static_cast<std::size_t>(depth), opt.threads, [&](std::size_t jj) {
    int j = static_cast<int>(jj);
    cplx d = (A.order + static_cast<double>(n - j)) / q;
    HeatTerm& t = out.terms[jj];
    t.exponent = -d;
    if (std::abs(d) < 1e-12) {
      auto z = zeta_at_zero(A, Q, req);
      t.coefficient = z.value;
      t.error = z.error;
      t.provenance = Provenance::kLogResidue;
    } else if (d.real() > 0.0 || std::abs(d.imag()) > 1e-12) {
      auto p = zeta_pole(A, Q, j, false, req);
      cplx g = std::abs(d.imag()) < 1e-14 ? cplx(std::tgamma(d.real())) : gamma_complex(d);
      t.coefficient = g * p.residue;
      t.error = std::abs(g) * p.error;
      t.provenance = Provenance::kResidue;
    } else {
      t.provenance = Provenance::kOutOfRange;
    }
  });
  return out;
}

ResidueValue scalar_curvature_pairing(const ConformalData& cd, const NCElement& a, const HeatOptions& opt) {
  if (cd.h.dim() != 2) throw InvalidInput("scalar curvature pairing is implemented for n = 2 only");
  auto Q = conformal_laplacian(cd);
  ZetaRequest req;
  req.regularization = opt.regularization;
  req.residue = opt.residue;
  auto z = zeta_at_zero(multiplication_symbol(a), Q, req);
  return {3.0 * z.value, 3.0 * z.error};
}

}  // namespace ncres
