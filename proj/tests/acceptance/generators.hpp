#pragma once

#include <cstdint>
#include <random>

#include "ncres/classical_symbol.hpp"

namespace ncres::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);

// coefficients uniform in the unit disc times scale, support |k|_inf <= radius
NCElement random_element(const ThetaMatrix& th, int radius, Rng& rng, double scale = 1.0);
NCElement random_self_adjoint(const ThetaMatrix& th, int radius, Rng& rng, double scale = 1.0);

// one of L_a, R_b, L_a R_b
MultiplierCoefficient random_multiplier(const ThetaMatrix& th, int radius, Rng& rng, double scale = 1.0);

// sum over |alpha| <= order of random multipliers, with a nonzero top-order term
ClassicalSymbol random_differential(const ThetaMatrix& th, int order, int radius, Rng& rng);

// random xi-dependent expression tree, depth-limited, with inverses of invertible operands
Expr random_expression(const ThetaMatrix& th, int depth, Rng& rng);

}  // namespace ncres::testing
