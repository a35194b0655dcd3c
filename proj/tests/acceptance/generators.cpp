#include "generators.hpp"

#include <cmath>

namespace ncres::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

NCElement random_element(const ThetaMatrix& th, int radius, Rng& rng, double scale) {
  std::vector<NCElement::Term> t;
  for (const auto& k : box_basis(th.dim(), radius, std::vector<bool>(th.dim(), true))) {
    double r = std::sqrt(uniform(rng, 0.0, 1.0)), a = uniform(rng, 0.0, 2.0 * M_PI);
    t.push_back({k, scale * std::polar(r, a)});
  }
  return NCElement(th, std::move(t));
}

NCElement random_self_adjoint(const ThetaMatrix& th, int radius, Rng& rng, double scale) {
  auto a = random_element(th, radius, rng, 0.5 * scale);
  return add(a, star(a));
}

MultiplierCoefficient random_multiplier(const ThetaMatrix& th, int radius, Rng& rng, double scale) {
  int kind = static_cast<int>(uniform(rng, 0.0, 3.0));
  if (kind == 0) return MultiplierCoefficient::left(random_element(th, radius, rng, scale));
  if (kind == 1) return MultiplierCoefficient::right(random_element(th, radius, rng, scale));
  auto a = random_element(th, radius, rng, scale);
  return MultiplierCoefficient::pair(a, random_element(th, radius, rng, 1.0));
}

ClassicalSymbol random_differential(const ThetaMatrix& th, int order, int radius, Rng& rng) {
  std::vector<DifferentialTerm> terms;
  for (int m = 0; m <= order; ++m)
    for (const auto& alpha : multi_indices(th.dim(), m)) {
      // keep lower orders sparse
      if (m < order && uniform(rng, 0.0, 1.0) < 0.4) continue;
      terms.push_back({alpha, random_multiplier(th, radius, rng)});
    }
  return from_differential(th, terms);
}

namespace {

Expr atom(const ThetaMatrix& th, Rng& rng) {
  const int n = th.dim();
  switch (static_cast<int>(uniform(rng, 0.0, 5.0))) {
    case 0:
      return sym::xi_coord(th, static_cast<int>(uniform(rng, 0.0, n)));
    case 1:
      return sym::norm_squared(th);
    case 2:
      return sym::left(random_element(th, 1, rng));
    case 3:
      return sym::right(random_element(th, 1, rng));
    default:
      return sym::constant(th, std::polar(uniform(rng, 0.5, 1.5), uniform(rng, 0.0, 2.0 * M_PI)));
  }
}

// |xi|^2 + 1 + small noncommutative perturbation: invertible everywhere
Expr invertible(const ThetaMatrix& th, Rng& rng) {
  auto pert = random_element(th, 1, rng, 0.15);
  Expr base = sym::norm_squared(th) + sym::one(th);
  if (uniform(rng, 0.0, 1.0) < 0.5) return base + sym::left(pert);
  return base * sym::right(add(NCElement::unit(th), pert));
}

}  // namespace

Expr random_expression(const ThetaMatrix& th, int depth, Rng& rng) {
  if (depth <= 0) return atom(th, rng);
  switch (static_cast<int>(uniform(rng, 0.0, 5.0))) {
    case 0:
      return random_expression(th, depth - 1, rng) + random_expression(th, depth - 1, rng);
    case 1:
      return random_expression(th, depth - 1, rng) * random_expression(th, depth - 1, rng);
    case 2:
      return sym::inverse(invertible(th, rng)) * random_expression(th, depth - 1, rng);
    case 3:
      return sym::scalar_power(sym::norm_squared(th) + sym::constant(th, uniform(rng, 0.5, 2.0)),
                               uniform(rng, -1.5, 1.5)) *
             random_expression(th, depth - 1, rng);
    default:
      return sym::inverse(invertible(th, rng));
  }
}

}  // namespace ncres::testing
