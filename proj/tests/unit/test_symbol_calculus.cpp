#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "ncres/classical_symbol.hpp"
#include "ncres/error.hpp"
#include "ncres/symbol_io.hpp"

using namespace ncres;
namespace gen = ncres::testing;
using gen::Rng;

namespace {

const double kIrr = 1.0 / std::numbers::sqrt2;

Xi at(double a, double b) { return Xi{a, b, 0.0, 0.0}; }

MultiplierCoefficient ev(const Expr& e, const Xi& xi, std::optional<cplx> lambda = std::nullopt) {
  Evaluator E;
  return E.evaluate(e, xi, lambda);
}

std::vector<NCElement> probes(const ThetaMatrix& th, Rng& rng) {
  return {NCElement::unit(th), gen::random_element(th, 2, rng), gen::random_element(th, 1, rng)};
}

}  // namespace

TEST(Expr, NormSquared) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto v = ev(sym::norm_squared(th), at(3, 4));
  ASSERT_TRUE(v.is_scalar());
  EXPECT_NEAR(std::abs(v.scalar_value() - 25.0), 0.0, 1e-14);
  EXPECT_EQ(infer_degree(sym::norm_squared(th)), std::optional<cplx>(2.0));
}

TEST(Expr, ResolventAtNegativeLambda) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto e = sym::inverse(sym::norm_squared(th) - sym::lambda(th, 2.0));
  auto v = ev(e, at(1, 0), cplx(-1.0));
  EXPECT_NEAR(std::abs(v.scalar_value() - 0.5), 0.0, 1e-14);
  EXPECT_EQ(infer_degree(e), std::optional<cplx>(-2.0));
}

TEST(Expr, DiffXiOfPolynomial) {
  auto th = ThetaMatrix::two_dim(0.0);
  auto d = diff_xi(sym::norm_squared(th), 1);
  EXPECT_NEAR(std::abs(ev(d, at(0.7, -1.3)).scalar_value() - (-2.6)), 0.0, 1e-14);
  EXPECT_TRUE(symbolically_zero(diff_xi(d, 0)));
  EXPECT_TRUE(symbolically_zero(diff_xi(sym::one(th), 0)));
}

TEST(Expr, DiffXiOfInverseMatchesFiniteDifference) {
  Rng rng(21);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = gen::random_self_adjoint(th, 1, rng, 0.2);
  // |xi|^2 + L_a with small a stays invertible
  auto e = sym::inverse(sym::norm_squared(th) + sym::left(add(NCElement::scalar(th, 1.0), a)));
  auto d = diff_xi(e, 0);
  const double h = 1e-4;
  auto fd = scale(add(ev(e, at(0.8 + h, 0.5)), scale(ev(e, at(0.8 - h, 0.5)), -1.0)), 1.0 / (2 * h));
  auto ps = probes(th, rng);
  EXPECT_LT(action_distance(ev(d, at(0.8, 0.5)), fd, ps), 1e-7);
}

TEST(Expr, DiffXCommutesWithDiffXi) {
  Rng rng(22);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto e = gen::random_expression(th, 3, rng);
  auto lhs = diff_x(diff_xi(e, 1), 0), rhs = diff_xi(diff_x(e, 0), 1);
  auto ps = probes(th, rng);
  EXPECT_LT(action_distance(ev(lhs, at(1.1, 0.4)), ev(rhs, at(1.1, 0.4)), ps), 1e-10);
}

TEST(Expr, InferredDegreeIsHomogeneity) {
  Rng rng(23);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = sym::left(gen::random_element(th, 1, rng));
  auto c = sym::right(add(NCElement::scalar(th, 2.0), gen::random_element(th, 1, rng, 0.3)));
  auto x1 = sym::xi_coord(th, 0), x2 = sym::xi_coord(th, 1);
  std::vector<std::pair<Expr, double>> cases = {
      {x1 * a * x2, 2.0},
      {a * sym::inverse(sym::norm_squared(th) * c), -2.0},
      {x1 * sym::inverse(c * sym::norm_squared(th)) * a * x2 * x2, 1.0},
      {diff_xi(sym::inverse(sym::norm_squared(th) * c), 0), -3.0}};
  auto ps = probes(th, rng);
  for (const auto& [e, want] : cases) {
    auto deg = infer_degree(e);
    ASSERT_TRUE(deg.has_value());
    EXPECT_NEAR(std::abs(*deg - want), 0.0, 1e-15);
    auto v1 = ev(e, at(0.6, 0.9)), v2 = ev(e, at(1.8, 2.7));
    double s = std::pow(3.0, want);
    EXPECT_LT(action_distance(v2, scale(v1, s), ps), 1e-10 * std::max(1.0, s * v1.norm1()));
  }
  EXPECT_FALSE(infer_degree(x1 + sym::norm_squared(th)).has_value());
}

TEST(Symbols, LaplacianIsDifferential) {
  auto L = laplacian_symbol(ThetaMatrix::two_dim(kIrr));
  EXPECT_TRUE(L.is_differential());
  EXPECT_EQ(L.order, cplx(2.0));
  EXPECT_NEAR(std::abs(evaluate(L.components[0], at(1, 2)).scalar_value() - 5.0), 0.0, 1e-14);
  EXPECT_TRUE(symbolically_zero(L.component(1)));
}

TEST(Symbols, ShiftedPowerComponentsAreHomogeneous) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto S = shifted_laplacian_power(th, 1.0, -0.5, 4);
  for (int j = 0; j < 4; ++j) {
    cplx deg = S.order - 2.0 * 0 - static_cast<double>(j);
    auto v1 = evaluate(S.components[j], at(0.6, 0.8)).scalar_value();
    auto v2 = evaluate(S.components[j], at(1.2, 1.6)).scalar_value();
    EXPECT_NEAR(std::abs(v2 - std::pow(2.0, deg.real()) * v1), 0.0, 1e-12) << j;
  }
  // (|xi|^2 + 1)^{-1/2} at |xi| = 10: the four-term expansion is accurate to |xi|^{-5}
  cplx sum = 0.0;
  for (int j = 0; j < 4; ++j) sum += evaluate(S.components[j], at(6, 8)).scalar_value();
  EXPECT_NEAR(std::abs(sum - 1.0 / std::sqrt(101.0)), 0.0, 1e-5);
}

TEST(Compose, CommutatorWithMultiplication) {
  Rng rng(24);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = gen::random_element(th, 2, rng);
  auto D1 = from_differential(th, {{make_index({1, 0}), MultiplierCoefficient::scalar(th, 1.0)}});
  auto C = commutator(D1, multiplication_symbol(a));
  auto ps = probes(th, rng);
  EXPECT_TRUE(symbolically_zero(C.component(0)));
  auto v = ev(C.component(1), at(0.3, -0.2));
  EXPECT_LT(action_distance(v, MultiplierCoefficient::left(derive(a, 0)), ps), 1e-13);
}

TEST(Compose, IdentityIsNeutral) {
  Rng rng(25);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto A = gen::random_differential(th, 2, 1, rng);
  auto IA = compose(identity_symbol(th), A), AI = compose(A, identity_symbol(th));
  auto ps = probes(th, rng);
  for (int j = 0; j <= 2; ++j) {
    auto want = ev(A.component(j), at(0.9, 1.4));
    EXPECT_LT(action_distance(ev(IA.component(j), at(0.9, 1.4)), want, ps), 1e-12);
    EXPECT_LT(action_distance(ev(AI.component(j), at(0.9, 1.4)), want, ps), 1e-12);
  }
}

TEST(Compose, LaplacianSquared) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto L = laplacian_symbol(th);
  auto LL = compose(L, L);
  EXPECT_EQ(LL.order, cplx(4.0));
  EXPECT_NEAR(std::abs(ev(LL.component(0), at(1, 2)).scalar_value() - 25.0), 0.0, 1e-13);
  EXPECT_TRUE(symbolically_zero(LL.component(1)));
  EXPECT_TRUE(symbolically_zero(LL.component(2)));
}

TEST(Compose, Associative) {
  Rng rng(26);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto A = gen::random_differential(th, 1, 1, rng), B = gen::random_differential(th, 1, 1, rng),
       C = gen::random_differential(th, 1, 1, rng);
  auto l = compose(compose(A, B), C), r = compose(A, compose(B, C));
  auto ps = probes(th, rng);
  for (int j = 0; j <= 3; ++j)
    EXPECT_LT(action_distance(ev(l.component(j), at(0.5, 0.7)), ev(r.component(j), at(0.5, 0.7)), ps), 1e-11) << j;
}

TEST(Compose, RejectsMixedTori) {
  EXPECT_THROW(compose(laplacian_symbol(ThetaMatrix::two_dim(0.1)), laplacian_symbol(ThetaMatrix::two_dim(0.2))),
               InvalidInput);
}

TEST(SymbolIo, ReadsScalarTerms) {
  std::stringstream ss("# Laplacian plus shift\ndimension 2\ntheta 0.25\nterm 2 0 scalar 1 0\nterm 0 2 scalar 1 0\n"
                       "term 0 0 scalar 3 0\n");
  auto S = read_differential(ss);
  EXPECT_TRUE(S.is_differential());
  EXPECT_EQ(S.order, cplx(2.0));
  cplx total = 0.0;
  for (int j = 0; j <= 2; ++j) total += ev(S.component(j), at(1, 1)).scalar_value();
  EXPECT_NEAR(std::abs(total - 5.0), 0.0, 1e-14);
}

TEST(SymbolIo, RejectsGarbage) {
  std::stringstream a("dimension 2\ntheta 0\nterm 1 0 bogus\n");
  EXPECT_THROW(read_differential(a), InvalidInput);
  std::stringstream b("dimension 9\n");
  EXPECT_THROW(read_differential(b), InvalidInput);
}
