#pragma once

#include <optional>
#include <vector>

#include "ncres/symbol_expr.hpp"

namespace ncres {

struct HomogeneousComponent {
  cplx degree;
  Expr expr;
};

// sigma ~ sum_j sigma_{order - j}. When exact is set the listed components are the
// whole symbol (differential operators); otherwise the remainder has order
// order - components.size(). full optionally holds a closed-form expression of the
// whole symbol, valid at every xi including 0.
struct ClassicalSymbol {
  ThetaMatrix theta;
  cplx order{};
  std::vector<HomogeneousComponent> components;
  bool exact = false;
  Expr full;

  int dim() const { return theta.dim(); }
  cplx remainder_order() const { return order - static_cast<double>(components.size()); }
  // component j, or the zero expression past the end of an exact symbol
  Expr component(int j) const;
  bool has_component(int j) const { return exact || j < static_cast<int>(components.size()); }
  // exact with non-negative integer order and polynomial components
  bool is_differential() const;
};

struct DifferentialTerm {
  Index alpha{};
  MultiplierCoefficient coefficient;
};

ClassicalSymbol from_differential(const ThetaMatrix& theta, const std::vector<DifferentialTerm>& terms);
ClassicalSymbol identity_symbol(const ThetaMatrix& theta);
ClassicalSymbol multiplication_symbol(const NCElement& a);
ClassicalSymbol multiplier_symbol(const MultiplierCoefficient& m);
ClassicalSymbol laplacian_symbol(const ThetaMatrix& theta);

// (|xi|^2 + c)^p: components from the binomial series, full expression attached.
ClassicalSymbol shifted_laplacian_power(const ThetaMatrix& theta, double c, cplx p, int components);

// N components of sigma(AB) ~ sum_gamma (1/gamma!) d_xi^gamma sigma_A delta^gamma sigma_B.
// N = -1 picks the natural depth: everything for two exact symbols, otherwise the
// largest depth both inputs support.
ClassicalSymbol compose(const ClassicalSymbol& A, const ClassicalSymbol& B, int N = -1);

// Componentwise; orders must differ by an integer.
ClassicalSymbol add(const ClassicalSymbol& A, const ClassicalSymbol& B);
ClassicalSymbol scale(const ClassicalSymbol& A, cplx c);
ClassicalSymbol commutator(const ClassicalSymbol& A, const ClassicalSymbol& B, int N = -1);

MultiplierCoefficient evaluate(const HomogeneousComponent& c, const Xi& xi, std::optional<cplx> lambda = std::nullopt,
                               const EvalOptions& opt = {});

// all multi-indices of length n with |gamma| = total, in a fixed order
std::vector<Index> multi_indices(int n, int total);
double factorial(const Index& gamma);

}  // namespace ncres
