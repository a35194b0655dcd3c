#pragma once

#include <optional>
#include <vector>

#include "ncres/classical_symbol.hpp"
#include "ncres/functional_calculus.hpp"
#include "ncres/quadrature.hpp"

namespace ncres {

// Q + sum_i w_i |v_i><v_i|, e.g. the projector onto ker Delta. A smoothing
// perturbation: it never changes a symbol, only where the contour may pass.
struct FiniteRankRegularization {
  std::vector<NCElement> vectors;
  std::vector<double> weights;

  static FiniteRankRegularization kernel_projector(const ThetaMatrix& theta, double weight = 1.0);
  double min_weight() const;
};

struct ResidueOptions {
  int sphere_nodes = 32;  // per coordinate; trapezoid count on S^1
  EvalOptions eval;
  std::optional<ContourSpec> contour;  // default: from the leading symbol of Q
};

struct ResidueValue {
  cplx value{};
  double error = 0.0;  // contour discrepancy plus dropped truncation mass, integrated
};

// int_{S^{n-1}} tr sigma_{-n}(omega) dbar omega, tr the multiplier trace.
ResidueValue residue(const ClassicalSymbol& A, const ResidueOptions& opt = {});

// Sphere integral of tr of a single component (no degree check).
ResidueValue sphere_trace(const Expr& component, int n, const ResidueOptions& opt = {});

ResidueValue residue_log(const ClassicalSymbol& A, const ClassicalSymbol& Q,
                         const FiniteRankRegularization& reg = {}, const ResidueOptions& opt = {});

ContourSpec contour_for(const ClassicalSymbol& Q, const FiniteRankRegularization& reg, const ResidueOptions& opt);

struct CutoffOptions {
  ResidueOptions residue;
  int radial_panels = 6;
  int radial_nodes = 16;
};

// Finite part of int tr sigma(xi) dbar xi. Uses the closed form when present,
// otherwise excises the unit ball.
ResidueValue cutoff_integral(const ClassicalSymbol& A, const CutoffOptions& opt = {});

enum class TraceRoute { kLattice, kCutoff };

struct CanonicalTraceOptions {
  TraceRoute route = TraceRoute::kLattice;
  CutoffOptions cutoff;
  std::vector<int> radii;  // lattice cube radii for extrapolation, empty: by dimension
};

ResidueValue canonical_trace(const ClassicalSymbol& A, const CanonicalTraceOptions& opt = {});

// (2 pi)^n, the coordinate-torus volume relative to tau(1) = 1
double torus_volume(int n);

}  // namespace ncres
