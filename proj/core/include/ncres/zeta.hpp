#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncres/residues.hpp"

namespace ncres {

struct ZetaPole {
  int j = 0;
  cplx location{};  // d_j = (a + n - j) / q
  cplx residue{};
  std::optional<cplx> finite_part;
  double error = 0.0;
};

struct ZetaGridPoint {
  cplx z{};
  std::optional<cplx> value;
  std::string note;  // why the value is missing
  double error = 0.0;
};

struct ZetaReport {
  double q = 0.0;
  cplx a{};
  int n = 0;
  std::vector<ZetaPole> poles;
  std::vector<ZetaGridPoint> grid;
  std::optional<cplx> value_at_zero;
  double value_at_zero_error = 0.0;
};

struct ZetaRequest {
  std::vector<int> pole_indices;  // j values
  bool finite_parts = false;
  std::vector<cplx> grid;
  bool at_zero = false;
  int components = 4;  // depth of the component-truncated family on the grid
  FiniteRankRegularization regularization;
  ResidueOptions residue;
  int threads = 1;
};

// Pole locations (a + n - j)/q for j = 0..count-1.
std::vector<cplx> zeta_pole_locations(cplx a, int n, double q, int count);

// V * residue of the family member A o Q^{-d_j} divided by q.
ZetaPole zeta_pole(const ClassicalSymbol& A, const ClassicalSymbol& Q, int j, bool finite_part,
                   const ZetaRequest& req);

// Continuous cut-off of the component-truncated family A o Q^{-z} (times V).
ZetaGridPoint zeta_value(const ClassicalSymbol& A, const ClassicalSymbol& Q, cplx z, const ZetaRequest& req);

// -(1/q) V Res(A log Q); A must be differential.
ResidueValue zeta_at_zero(const ClassicalSymbol& A, const ClassicalSymbol& Q, const ZetaRequest& req = {});

ZetaReport zeta(const ClassicalSymbol& A, const ClassicalSymbol& Q, const ZetaRequest& req);

// Laurent coefficients c_k, k = kmin..kmax, of f around c from M trapezoid nodes on
// the circle of the given radius.
std::vector<cplx> laurent_coefficients(const std::function<cplx(cplx)>& f, cplx center, double radius, int kmin,
                                       int kmax, int M = 64);

}  // namespace ncres
