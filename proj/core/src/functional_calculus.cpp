#include "ncres/functional_calculus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ncres/error.hpp"
#include "ncres/quadrature.hpp"

namespace ncres {

double real_order(const ClassicalSymbol& Q) {
  if (std::abs(Q.order.imag()) > 1e-14 || Q.order.real() <= 0.0)
    throw InvalidInput("weights need a real positive order");
  return Q.order.real();
}

ResolventExpansion resolvent_components(const ClassicalSymbol& Q, int J) {
  if (J < 0) throw InvalidInput("negative parametrix depth");
  const double q = real_order(Q);
  const ThetaMatrix& th = Q.theta;
  const int n = th.dim();
  for (int i = 0; i <= J; ++i)
    if (!Q.has_component(i)) throw InvalidInput("parametrix of depth " + std::to_string(J) + " needs component " +
                                                std::to_string(i) + " of Q");
  ResolventExpansion B;
  B.theta = th;
  B.q = q;
  B.lambda = sym::lambda(th, q);
  B.shifted_leading = Q.component(0) - B.lambda;
  Expr b0 = sym::inverse(B.shifted_leading);
  B.components.push_back({-q, b0});
  // c_i: components of Q - lambda
  auto c = [&](int i) { return i == 0 ? B.shifted_leading : Q.component(i); };
  for (int m = 1; m <= J; ++m) {
    std::vector<Expr> s;
    for (int j = 0; j < m; ++j) {
      for (int g = 0; g + j <= m; ++g) {
        int i = m - j - g;
        if (c(i)->zero) continue;
        for (const auto& gamma : multi_indices(n, g)) {
          Expr l = diff_xi(c(i), gamma);
          if (l->zero) continue;
          Expr r = diff_x(B.components[j].expr, gamma);
          if (r->zero) continue;
          double f = factorial(gamma);
          s.push_back(f == 1.0 ? sym::product({l, r}) : sym::product({sym::constant(th, 1.0 / f), l, r}));
        }
      }
    }
    Expr bm = s.empty() ? sym::zero(th) : sym::product({sym::constant(th, -1.0), b0, sym::sum(s)});
    B.components.push_back({-q - static_cast<double>(m), bm});
  }
  return B;
}

std::vector<HomogeneousComponent> parametrix_residual(const ClassicalSymbol& Q, const ResolventExpansion& B) {
  const ThetaMatrix& th = Q.theta;
  const int J = static_cast<int>(B.components.size()) - 1;
  ClassicalSymbol qm = Q;
  qm.components[0].expr = B.shifted_leading;
  ClassicalSymbol b;
  b.theta = th;
  b.order = -B.q;
  b.components = B.components;
  auto prod = compose(qm, b, J + 1);
  std::vector<HomogeneousComponent> out;
  for (int m = 0; m <= J; ++m) {
    Expr e = prod.components[m].expr;
    if (m == 0) e = e - sym::one(th);
    out.push_back({-static_cast<double>(m), e});
  }
  return out;
}

LeadingRange leading_numerical_range(const ClassicalSymbol& Q, int sphere_nodes, int basis_radius) {
  const int n = Q.dim();
  auto sq = sphere_quadrature(n, sphere_nodes, false);
  Evaluator ev;
  LeadingRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& w : sq.nodes) {
    Xi xi{};
    for (int i = 0; i < n; ++i) xi[i] = w[i];
    auto m = ev.evaluate(Q.component(0), xi);
    if (m.is_zero()) throw SingularError("leading symbol vanishes on the sphere", 0.0);
    if (m.is_scalar()) {
      cplx v = m.scalar_value();
      r.min_re = std::min(r.min_re, v.real());
      r.max_abs = std::max(r.max_abs, std::abs(v));
      continue;
    }
    std::vector<bool> active(n, true);
    auto basis = box_basis(n, basis_radius, active);
    Eigen::MatrixXcd M = multiplier_matrix(m, basis);
    Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    r.min_re = std::min(r.min_re, es.eigenvalues().minCoeff());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    r.max_abs = std::max(r.max_abs, svd.singularValues()(0));
  }
  return r;
}

ContourSpec default_contour(const ClassicalSymbol& Q, double eps_cap) {
  const double q = real_order(Q);
  auto range = leading_numerical_range(Q);
  if (!(range.min_re > 0.0))
    throw InvalidInput("numerical range of the leading symbol reaches the spectral cut (min Re = " +
                       std::to_string(range.min_re) + ")");
  ContourSpec s;
  s.eps = std::min(0.5 * range.min_re, eps_cap);
  s.R = 4.0 * q * std::max(range.max_abs, 1.0);
  return s;
}

ClassicalSymbol power_symbol(const ClassicalSymbol& Q, cplx z, int N, const ContourSpec& spec) {
  if (N < 1) throw InvalidInput("power symbol needs at least one component");
  auto B = resolvent_components(Q, N - 1);
  auto contour = std::make_shared<const Contour>(spec);
  ClassicalSymbol out;
  out.theta = Q.theta;
  out.order = B.q * z;
  for (int j = 0; j < N; ++j) {
    Expr e = sym::contour_integral(B.components[j].expr, z, 0, contour, B.q, B.components[j].degree);
    out.components.push_back({B.q * z - static_cast<double>(j), e});
  }
  return out;
}

ClassicalSymbol power_symbol_dz(const ClassicalSymbol& Q, cplx z, int N, const ContourSpec& spec) {
  if (N < 1) throw InvalidInput("power symbol needs at least one component");
  auto B = resolvent_components(Q, N - 1);
  auto contour = std::make_shared<const Contour>(spec);
  ClassicalSymbol out;
  out.theta = Q.theta;
  out.order = B.q * z;
  for (int j = 0; j < N; ++j) {
    Expr e = sym::contour_integral(B.components[j].expr, z, 1, contour, B.q, B.components[j].degree);
    out.components.push_back({B.q * z - static_cast<double>(j), e});
  }
  return out;
}

LogSymbol log_symbol(const ClassicalSymbol& Q, int N, const ContourSpec& spec) {
  if (N < 1) throw InvalidInput("log symbol needs at least one component");
  auto B = resolvent_components(Q, N - 1);
  auto contour = std::make_shared<const Contour>(spec);
  LogSymbol L;
  L.q = B.q;
  L.classical.theta = Q.theta;
  L.classical.order = 0.0;
  for (int j = 0; j < N; ++j) {
    Expr e = sym::contour_integral(B.components[j].expr, 0.0, 1, contour, B.q, B.components[j].degree);
    if (j == 0) {
      L.raw_leading = e;
      e = e - sym::log_norm(Q.theta, B.q);
    }
    L.classical.components.push_back({-static_cast<double>(j), e});
  }
  return L;
}

ClassicalSymbol LogSymbol::as_symbol() const {
  ClassicalSymbol s = classical;
  s.components[0].expr = raw_leading;
  return s;
}

}  // namespace ncres
