#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "ncres/classical_symbol.hpp"
#include "ncres/contour.hpp"

namespace ncres {

// Components b_j of the parametrix of Q - lambda, degree -q - j with lambda at weight q.
struct ResolventExpansion {
  ThetaMatrix theta;
  double q = 0.0;
  Expr lambda;
  Expr shifted_leading;  // sigma_q(Q) - lambda
  std::vector<HomogeneousComponent> components;
};

ResolventExpansion resolvent_components(const ClassicalSymbol& Q, int J);

// Residual components of (Q - lambda) o B_J - 1 at degrees 0, -1, ..., -J.
std::vector<HomogeneousComponent> parametrix_residual(const ClassicalSymbol& Q, const ResolventExpansion& B);

// Numerical range of the leading symbol over sphere nodes, from the truncated
// multiplier matrices.
struct LeadingRange {
  double min_re = 0.0;  // smallest eigenvalue of the Hermitian part
  double max_abs = 0.0;
};

LeadingRange leading_numerical_range(const ClassicalSymbol& Q, int sphere_nodes = 8, int basis_radius = 4);

// Keyhole around the numerical range; throws when the range meets the cut at pi.
ContourSpec default_contour(const ClassicalSymbol& Q, double eps_cap = std::numeric_limits<double>::infinity());

// Components sigma_{qz - j}(Q^z), j < N.
ClassicalSymbol power_symbol(const ClassicalSymbol& Q, cplx z, int N, const ContourSpec& spec);

// d/dz of the components of power_symbol (log lambda against b_j).
ClassicalSymbol power_symbol_dz(const ClassicalSymbol& Q, cplx z, int N, const ContourSpec& spec);

// sigma(log Q) = q log|xi| + classical part of order 0.
struct LogSymbol {
  double q = 0.0;
  ClassicalSymbol classical;
  Expr raw_leading;  // classical[0] + q log|xi|, a single contour node
  ClassicalSymbol as_symbol() const;
};

LogSymbol log_symbol(const ClassicalSymbol& Q, int N, const ContourSpec& spec);

double real_order(const ClassicalSymbol& Q);

}  // namespace ncres
