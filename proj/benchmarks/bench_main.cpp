#include <benchmark/benchmark.h>

#include <numbers>

#include "ncres/functional_calculus.hpp"
#include "ncres/heat_geometry.hpp"
#include "ncres/oracle.hpp"
#include "ncres/residues.hpp"

using namespace ncres;

namespace {

const double kIrr = 1.0 / std::numbers::sqrt2;

NCElement cos_like(const ThetaMatrix& th, int r, double c) {
  std::vector<NCElement::Term> t;
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j)
      if (i || j) t.emplace_back(make_index({i, j}), c / (1.0 + i * i + j * j));
  return NCElement(th, std::move(t));
}

void BM_Mul(benchmark::State& st) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = cos_like(th, static_cast<int>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(mul(a, a));
}
BENCHMARK(BM_Mul)->DenseRange(2, 10, 4);

void BM_Exp(benchmark::State& st) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto h = cos_like(th, 1, 0.1);
  ExpOptions opt;
  opt.target_support = static_cast<int>(st.range(0));
  opt.tol = 1e-8;
  for (auto _ : st) benchmark::DoNotOptimize(exp_element(h, opt));
}
BENCHMARK(BM_Exp)->Arg(6)->Arg(10);

void BM_InvertNewton(benchmark::State& st) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto a = add(NCElement::unit(th), cos_like(th, 1, 0.1));
  InvertOptions opt;
  opt.target_support = 10;
  for (auto _ : st) benchmark::DoNotOptimize(invert(a, opt));
}
BENCHMARK(BM_InvertNewton);

void BM_ResidueInverseLaplacian(benchmark::State& st) {
  auto S = shifted_laplacian_power(ThetaMatrix::two_dim(kIrr), 1.0, -1.0, 4);
  for (auto _ : st) benchmark::DoNotOptimize(residue(S));
}
BENCHMARK(BM_ResidueInverseLaplacian);

void BM_LogResidueShifted(benchmark::State& st) {
  auto th = ThetaMatrix::two_dim(kIrr);
  auto Q = shifted_laplacian_power(th, 0.7, 1.0, 3);
  for (auto _ : st) benchmark::DoNotOptimize(residue_log(identity_symbol(th), Q));
}
BENCHMARK(BM_LogResidueShifted)->Unit(benchmark::kMillisecond);

// conformal heat coefficients at theta = 0, the cheap curved case
void BM_CurvedHeat(benchmark::State& st) {
  auto th = ThetaMatrix::zero(2);
  ConformalData cd;
  cd.h = NCElement(th, {{make_index({1, 0}), 0.1}, {make_index({-1, 0}), 0.1}});
  HeatOptions ho;
  ho.regularization = FiniteRankRegularization::kernel_projector(th);
  ho.residue.sphere_nodes = 4;
  ho.residue.eval.truncation.radius = 6;
  auto Q = conformal_laplacian(cd);
  auto a = NCElement(th, {{make_index({1, 0}), 1.0}, {make_index({-1, 0}), 1.0}});
  for (auto _ : st) benchmark::DoNotOptimize(heat_coefficients(multiplication_symbol(a), Q, 3, ho));
}
BENCHMARK(BM_CurvedHeat)->Unit(benchmark::kMillisecond);

void BM_OracleSpectrum(benchmark::State& st) {
  auto th = ThetaMatrix::two_dim(kIrr);
  ConformalData cd;
  cd.h = cos_like(th, 1, 0.1);
  cd.exp.target_support = 6;
  cd.exp.tol = 1e-9;
  auto M = operator_matrix(conformal_laplacian(cd), static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(hermitian_spectrum(M));
}
BENCHMARK(BM_OracleSpectrum)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
