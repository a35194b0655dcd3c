#pragma once

#include <string>
#include <vector>

#include "ncres/zeta.hpp"

namespace ncres {

struct ConformalData {
  NCElement h;                // self-adjoint conformal factor
  cplx modulus{0.0, 1.0};     // Im > 0
  ExpOptions exp;
};

// Delta_h = d R_{k^2} d^*, d = delta_1 + conj(modulus) delta_2, k = e^{h/2}.
ClassicalSymbol conformal_laplacian(const ConformalData& cd);

enum class Provenance { kResidue, kLogResidue, kOracleFit, kOutOfRange };
std::string to_string(Provenance p);

struct HeatTerm {
  cplx exponent{};  // power of t
  cplx coefficient{};
  Provenance provenance = Provenance::kResidue;
  double error = 0.0;
};

struct HeatExpansion {
  std::vector<HeatTerm> terms;  // increasing exponents
  const HeatTerm* find(double exponent) const;
};

struct HeatOptions {
  FiniteRankRegularization regularization;
  ResidueOptions residue;
  int threads = 1;
};

// Tr(A e^{-tQ}) ~ sum_j c_j t^{-d_j}, d_j = (a + n - j)/q, j = 0..depth-1:
// c_j = Gamma(d_j) (1/q) V Res(A Q^{-d_j}) for d_j > 0, the t^0 slot from
// -(1/q) V Res(A log Q), negative d_j reported out of range.
HeatExpansion heat_coefficients(const ClassicalSymbol& A, const ClassicalSymbol& Q, int depth,
                                const HeatOptions& opt = {});

// 3 x the t^0 coefficient of Tr(a e^{-t Delta_h}) in n = 2.
ResidueValue scalar_curvature_pairing(const ConformalData& cd, const NCElement& a, const HeatOptions& opt = {});

}  // namespace ncres
