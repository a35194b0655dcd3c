#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "ncres/error.hpp"
#include "ncres/heat_geometry.hpp"
#include "ncres/oracle.hpp"
#include "oracle_values.hpp"

using namespace ncres;
namespace gen = ncres::testing;
using gen::Rng;
using std::numbers::pi;

namespace {

const double kIrr = 1.0 / std::numbers::sqrt2;

std::vector<std::pair<double, cplx>> samples(const HeatOracle& o, double t0, double t1, int count) {
  std::vector<std::pair<double, cplx>> s;
  for (int i = 0; i < count; ++i) {
    double t = t0 + (t1 - t0) * i / (count - 1);
    s.push_back({t, o.trace(t).value});
  }
  return s;
}

}  // namespace

TEST(OperatorMatrix, LaplacianIsDiagonal) {
  auto M = operator_matrix(laplacian_symbol(ThetaMatrix::two_dim(kIrr)), 3);
  EXPECT_EQ(M.dim(), 49);
  EXPECT_TRUE(M.exact);
  EXPECT_TRUE(M.hermitian);
  EXPECT_EQ(M.band, 0);
  auto D = M.dense();
  int p = M.position(make_index({2, -3}));
  ASSERT_GE(p, 0);
  EXPECT_EQ(D(p, p), cplx(13.0));
  EXPECT_EQ(M.position(make_index({4, 0})), -1);
}

TEST(OperatorMatrix, MultiplicationPhases) {
  const double t = 0.3;
  auto th = ThetaMatrix::two_dim(t);
  auto u = NCElement::monomial(th, make_index({1, 0}));
  auto L = left_operator(u, 2).dense();
  auto R = multiplier_operator(MultiplierCoefficient::right(u), 2).dense();
  auto M = operator_matrix(laplacian_symbol(th), 2);
  int col = M.position(make_index({0, 1})), row = M.position(make_index({1, 1}));
  // U_1 U_(0,1) = e^{-i pi t} U_(1,1), U_(0,1) U_1 = e^{+i pi t} U_(1,1)
  EXPECT_NEAR(std::abs(L(row, col) - std::exp(cplx(0.0, -pi * t))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(R(row, col) - std::exp(cplx(0.0, pi * t))), 0.0, 1e-15);
}

TEST(OperatorMatrix, CompositionOnInteriorColumns) {
  Rng rng(51);
  auto th = ThetaMatrix::two_dim(kIrr);
  auto A = gen::random_differential(th, 2, 1, rng), B = gen::random_differential(th, 1, 1, rng);
  const int K = 6;
  auto MA = operator_matrix(A, K), MB = operator_matrix(B, K), MAB = operator_matrix(compose(A, B), K);
  Eigen::SparseMatrix<cplx> prod = MA.M * MB.M;
  double scale = Eigen::MatrixXcd(prod).cwiseAbs().maxCoeff();
  EXPECT_LT(column_deviation(prod, MAB.M, interior_positions(MAB, 2)), 1e-12 * scale);
}

TEST(Spectrum, ConformalLaplacianIsPositiveWithConstantKernel) {
  auto th = ThetaMatrix::two_dim(kIrr);
  ConformalData cd;
  cd.h = NCElement(th, {{make_index({1, 0}), 0.1}, {make_index({-1, 0}), 0.1}});
  cd.exp.target_support = 6;
  cd.exp.tol = 1e-9;
  auto M = operator_matrix(conformal_laplacian(cd), 8);
  EXPECT_TRUE(M.hermitian);
  auto sp = hermitian_spectrum(M);
  EXPECT_LT(sp.max_residual, 1e-12);
  auto ev = sp.all_eigenvalues();
  std::sort(ev.begin(), ev.end());
  EXPECT_GT(ev[0], -1e-10);
  EXPECT_LT(std::abs(ev[0]), 1e-10);
  EXPECT_GT(ev[1], 0.1);
}

TEST(HeatOracle, FlatTraceMatchesLatticeSum) {
  auto M = operator_matrix(laplacian_symbol(ThetaMatrix::two_dim(kIrr)), 60);
  HeatOracle o(M, 1.0);
  auto s = o.trace(0.05);
  EXPECT_NEAR(s.value.real(), oracle::kFlatHeat60, 1e-10 * oracle::kFlatHeat60);
  EXPECT_TRUE(s.trusted);
  EXPECT_LT(o.trace(0.06).value.real(), s.value.real());
}

TEST(HeatOracle, ZeroTraceObservable) {
  auto th = ThetaMatrix::two_dim(kIrr);
  ConformalData cd;
  cd.h = NCElement(th, {{make_index({0, 1}), 0.1}, {make_index({0, -1}), 0.1}});
  cd.exp.target_support = 6;
  cd.exp.tol = 1e-9;
  auto M = operator_matrix(conformal_laplacian(cd), 10);
  HeatOracle o(M, 0.5);
  auto u = NCElement::monomial(th, make_index({1, 0}));
  // diagonal of L_{U_1} vanishes in the monomial basis and the weights see only that
  auto w = o.weights(add(u, star(u)));
  EXPECT_LT(std::abs(o.trace(w, 2.0, 0.1).value), 1e-12);
}

TEST(Fit, RecoversSyntheticExpansion) {
  std::vector<std::pair<double, cplx>> s;
  for (int i = 0; i < 30; ++i) {
    double t = 0.01 + 0.01 * i;
    s.push_back({t, 3.0 / t + cplx(2.0, -1.0) + 0.5 * t});
  }
  auto f = fit_expansion(s, {-1.0, 0.0, 1.0});
  EXPECT_NEAR(std::abs(f.coefficient(-1.0) - 3.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(f.coefficient(0.0) - cplx(2.0, -1.0)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(f.coefficient(1.0) - 0.5), 0.0, 1e-8);
  EXPECT_TRUE(f.trusted);
  EXPECT_EQ(f.samples, 30u);
  EXPECT_THROW(fit_expansion(s, {-1.0, -1.0}), SingularError);
}

TEST(Fit, FlatTorusHasOnlyTheLeadingTerm) {
  auto M = operator_matrix(laplacian_symbol(ThetaMatrix::two_dim(kIrr)), 40);
  HeatOracle o(M, 1.0);
  auto f = fit_expansion(samples(o, 0.02, 0.1, 41), {-1.0, -0.5, 0.0, 1.0});
  EXPECT_NEAR(f.coefficient(-1.0).real(), pi, 1e-6);
  EXPECT_LT(std::abs(f.coefficient(-0.5)), 1e-5);
  EXPECT_LT(std::abs(f.coefficient(0.0)), 1e-5);
}

TEST(MatrixIo, RoundTripAndBadMagic) {
  Rng rng(52);
  Eigen::MatrixXcd A(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = cplx(gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1));
  std::stringstream ss;
  write_matrix(ss, A);
  EXPECT_EQ(read_matrix(ss), A);
  std::stringstream bad("NCRX garbage");
  EXPECT_THROW(read_matrix(bad), InvalidInput);
}
