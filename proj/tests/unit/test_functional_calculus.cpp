#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "ncres/error.hpp"
#include "ncres/functional_calculus.hpp"
#include "ncres/heat_geometry.hpp"

using namespace ncres;
namespace gen = ncres::testing;
using gen::Rng;

namespace {

const double kIrr = 1.0 / std::numbers::sqrt2;

Xi at(double a, double b) { return Xi{a, b, 0.0, 0.0}; }

MultiplierCoefficient ev(const Expr& e, const Xi& xi, std::optional<cplx> lambda = std::nullopt,
                         EvalOptions opt = {}) {
  Evaluator E(opt);
  return E.evaluate(e, xi, lambda);
}

cplx sv(const Expr& e, const Xi& xi, std::optional<cplx> lambda = std::nullopt) {
  auto v = ev(e, xi, lambda);
  EXPECT_TRUE(v.is_scalar());
  return v.scalar_value();
}

ClassicalSymbol shifted_by(const NCElement& a) {
  auto th = a.theta();
  return add(laplacian_symbol(th), multiplication_symbol(a));
}

}  // namespace

TEST(Resolvent, FlatLaplacian) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto B = resolvent_components(laplacian_symbol(th), 3);
  ASSERT_EQ(B.components.size(), 4u);  // b_0 .. b_J
  EXPECT_NEAR(std::abs(sv(B.components[0].expr, at(1, 1), cplx(-1.0)) - 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_TRUE(symbolically_zero(B.components[1].expr));
  EXPECT_TRUE(symbolically_zero(B.components[2].expr));
  EXPECT_EQ(B.components[2].degree, cplx(-4.0));
}

TEST(Resolvent, PotentialTermAtSecondOrder) {
  Rng rng(31);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = gen::random_self_adjoint(th, 1, rng, 0.3);
  auto B = resolvent_components(shifted_by(a), 3);
  auto want = MultiplierCoefficient::left(scale(a, -1.0 / 9.0));
  std::vector<NCElement> ps = {NCElement::unit(th), gen::random_element(th, 2, rng)};
  EXPECT_LT(action_distance(ev(B.components[2].expr, at(1, 1), cplx(-1.0)), want, ps), 1e-14);
  EXPECT_TRUE(symbolically_zero(B.components[1].expr));
}

TEST(Resolvent, ParametrixResidualVanishesForConformalLaplacian) {
  auto th = ThetaMatrix::two_dim(kIrr);
  ConformalData cd;
  cd.h = NCElement(th, {{make_index({1, 0}), 0.1}, {make_index({-1, 0}), 0.1}});
  cd.exp.target_support = 8;
  auto Q = conformal_laplacian(cd);
  auto B = resolvent_components(Q, 3);
  auto res = parametrix_residual(Q, B);
  ASSERT_EQ(res.size(), 4u);
  EvalOptions opt;
  opt.truncation.radius = 8;
  std::vector<NCElement> ps = {NCElement::unit(th), NCElement::monomial(th, make_index({1, 1}))};
  auto zero = MultiplierCoefficient(th);
  // degree 0 residual is exactly -1 + 1, the rest vanish up to truncation
  for (std::size_t j = 0; j < res.size(); ++j)
    EXPECT_LT(action_distance(ev(res[j].expr, at(0.8, 0.6), cplx(-0.5), opt), zero, ps), 1e-9) << j;
}

TEST(Contour, DefaultCutAvoidsPositiveSpectrum) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto spec = default_contour(laplacian_symbol(th));
  EXPECT_NEAR(spec.beta, std::numbers::pi, 1e-15);
  EXPECT_GT(spec.R, 1.0);
  EXPECT_GT(spec.eps, 0.0);
  EXPECT_LT(spec.eps, 1.0);
  // integrate 1 / (1 - lambda) around the keyhole: winds once around lambda = 1
  Contour c(spec);
  cplx s = 0.0;
  for (const auto& p : c.fine()) s += p.weight / (1.0 - p.lambda);
  EXPECT_NEAR(std::abs(s / cplx(0.0, 2.0 * std::numbers::pi) + 1.0), 0.0, 1e-10);
}

TEST(Contour, RejectsNonElliptic) {
  auto th = ThetaMatrix::two_dim(kIrr);
  EXPECT_THROW(default_contour(scale(laplacian_symbol(th), -1.0)), InvalidInput);
}

TEST(Power, ZeroAndOne) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto L = laplacian_symbol(th);
  auto spec = default_contour(L);
  auto P0 = power_symbol(L, 0.0, 2, spec);
  auto P1 = power_symbol(L, 1.0, 2, spec);
  EXPECT_NEAR(std::abs(sv(P0.component(0), at(0.6, 0.8)) - 1.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sv(P1.component(0), at(1.2, 1.6)) - 4.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sv(P1.component(1), at(1.2, 1.6))), 0.0, 1e-12);
}

TEST(Power, BinomialSeriesOfShiftedLaplacian) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto Q = shifted_laplacian_power(th, 2.0, 1.0, 3);
  auto spec = default_contour(Q);
  for (cplx z : {cplx(-1.0), cplx(0.5), cplx(-0.3, 0.7)}) {
    auto P = power_symbol(Q, z, 3, spec);
    auto ref = shifted_laplacian_power(th, 2.0, z, 3);
    for (int j = 0; j < 3; ++j) {
      cplx got = sv(P.component(j), at(0.6, 0.8)), want = sv(ref.component(j), at(0.6, 0.8));
      EXPECT_NEAR(std::abs(got - want), 0.0, 1e-9 * std::max(1.0, std::abs(want))) << z << " " << j;
    }
  }
}

TEST(Power, NoncommutativeInverseMatchesResolventAtZero) {
  Rng rng(32);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = add(NCElement::scalar(th, 1.0), gen::random_self_adjoint(th, 1, rng, 0.2));
  auto Q = shifted_by(a);
  auto P = power_symbol(Q, -1.0, 3, default_contour(Q));
  auto B = resolvent_components(Q, 3);
  std::vector<NCElement> ps = {NCElement::unit(th), gen::random_element(th, 1, rng)};
  for (int j = 0; j < 3; ++j)
    EXPECT_LT(action_distance(ev(P.component(j), at(0.6, 0.8)), ev(B.components[j].expr, at(0.6, 0.8), cplx(0.0)), ps),
              1e-9)
        << j;
}

TEST(Log, FlatLaplacian) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto L = laplacian_symbol(th);
  auto ls = log_symbol(L, 2, default_contour(L));
  EXPECT_EQ(ls.q, 2.0);
  EXPECT_NEAR(std::abs(sv(ls.classical.component(0), at(1.2, 1.6))), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sv(ls.raw_leading, at(1.2, 1.6)) - 2.0 * std::log(2.0)), 0.0, 1e-9);
}

TEST(Log, ScalingShiftsByConstant) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto L3 = scale(laplacian_symbol(th), 3.0);
  auto ls = log_symbol(L3, 2, default_contour(L3));
  EXPECT_NEAR(std::abs(sv(ls.classical.component(0), at(0.6, 0.8)) - std::log(3.0)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sv(ls.classical.component(1), at(0.6, 0.8))), 0.0, 1e-9);
}

TEST(Log, IsDerivativeOfPowersAtZero) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto Q = shifted_laplacian_power(th, 1.5, 1.0, 3);
  auto spec = default_contour(Q);
  auto ls = log_symbol(Q, 3, spec).as_symbol();
  // log(|xi|^2 + c) = 2 log|xi| + c |xi|^-2 - ...
  EXPECT_NEAR(std::abs(sv(ls.component(2), at(0.6, 0.8)) - 1.5), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sv(ls.component(1), at(0.6, 0.8))), 0.0, 1e-9);
  auto dz = power_symbol_dz(Q, 0.0, 3, spec);
  for (int j = 1; j < 3; ++j)
    EXPECT_NEAR(std::abs(sv(ls.component(j), at(0.6, 0.8)) - sv(dz.component(j), at(0.6, 0.8))), 0.0, 1e-9) << j;
}
