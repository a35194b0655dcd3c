#include "ncres/zeta.hpp"

#include <cmath>
#include <numbers>

#include "ncres/error.hpp"
#include "ncres/parallel.hpp"

namespace ncres {

std::vector<cplx> zeta_pole_locations(cplx a, int n, double q, int count) {
  std::vector<cplx> out;
  for (int j = 0; j < count; ++j) out.push_back((a + static_cast<double>(n - j)) / q);
  return out;
}

ZetaPole zeta_pole(const ClassicalSymbol& A, const ClassicalSymbol& Q, int j, bool finite_part,
                   const ZetaRequest& req) {
  const int n = A.dim();
  const double q = real_order(Q);
  const double V = torus_volume(n);
  auto spec = contour_for(Q, req.regularization, req.residue);
  ZetaPole p;
  p.j = j;
  p.location = (A.order + static_cast<double>(n - j)) / q;
  auto fam = compose(A, power_symbol(Q, -p.location, j + 1, spec), j + 1);
  auto s = sphere_trace(fam.components[j].expr, n, req.residue);
  p.residue = V * s.value / q;
  p.error = V * s.error / q;
  if (finite_part) {
    int N = std::max(req.components, j + 1);
    auto famN = compose(A, power_symbol(Q, -p.location, N, spec), N);
    cplx fp = 0.0;
    for (int i = 0; i < N; ++i) {
      if (i == j) continue;
      cplx mn = famN.components[i].degree + static_cast<double>(n);
      auto si = sphere_trace(famN.components[i].expr, n, req.residue);
      fp -= si.value / mn;
      p.error += V * si.error / std::abs(mn);
    }
    // d/dz of the family Q^{-z} brings a minus sign
    auto dfam = compose(A, power_symbol_dz(Q, -p.location, j + 1, spec), j + 1);
    auto sd = sphere_trace(dfam.components[j].expr, n, req.residue);
    fp -= sd.value / q;
    p.finite_part = V * fp;
    p.error += V * sd.error / q;
  }
  return p;
}

ZetaGridPoint zeta_value(const ClassicalSymbol& A, const ClassicalSymbol& Q, cplx z, const ZetaRequest& req) {
  const int n = A.dim();
  const double q = real_order(Q);
  const double V = torus_volume(n);
  ZetaGridPoint g;
  g.z = z;
  for (int i = 0; i < req.components; ++i) {
    cplx mn = A.order - q * z - static_cast<double>(i) + static_cast<double>(n);
    if (std::abs(mn) < 1e-10) {
      g.note = "pole d_" + std::to_string(i);
      return g;
    }
  }
  auto spec = contour_for(Q, req.regularization, req.residue);
  auto fam = compose(A, power_symbol(Q, -z, req.components, spec), req.components);
  cplx v = 0.0;
  double err = 0.0;
  for (int i = 0; i < req.components; ++i) {
    cplx mn = fam.components[i].degree + static_cast<double>(n);
    auto s = sphere_trace(fam.components[i].expr, n, req.residue);
    v -= s.value / mn;
    err += s.error / std::abs(mn);
  }
  g.value = V * v;
  g.error = V * err;
  return g;
}

ResidueValue zeta_at_zero(const ClassicalSymbol& A, const ClassicalSymbol& Q, const ZetaRequest& req) {
  if (!A.is_differential())
    throw InvalidInput("zeta at zero through the log residue needs a differential A; use the finite-part mode of zeta");
  const double q = real_order(Q);
  const double V = torus_volume(A.dim());
  auto r = residue_log(A, Q, req.regularization, req.residue);
  return {-V * r.value / q, V * r.error / q};
}

ZetaReport zeta(const ClassicalSymbol& A, const ClassicalSymbol& Q, const ZetaRequest& req) {
  ZetaReport rep;
  rep.q = real_order(Q);
  rep.a = A.order;
  rep.n = A.dim();
  rep.poles.resize(req.pole_indices.size());
  parallel_for(req.pole_indices.size(), req.threads, [&](std::size_t i) {
    rep.poles[i] = zeta_pole(A, Q, req.pole_indices[i], req.finite_parts, req);
  });
  rep.grid.resize(req.grid.size());
  parallel_for(req.grid.size(), req.threads, [&](std::size_t i) { rep.grid[i] = zeta_value(A, Q, req.grid[i], req); });
  if (req.at_zero) {
    auto z = zeta_at_zero(A, Q, req);
    rep.value_at_zero = z.value;
    rep.value_at_zero_error = z.error;
  }
  return rep;
}

std::vector<cplx> laurent_coefficients(const std::function<cplx(cplx)>& f, cplx center, double radius, int kmin,
                                       int kmax, int M) {
  std::vector<cplx> fv(M);
  std::vector<cplx> w(M);
  for (int m = 0; m < M; ++m) {
    w[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / M);
    fv[m] = f(center + radius * w[m]);
  }
  std::vector<cplx> out;
  for (int k = kmin; k <= kmax; ++k) {
    // c_k = (1/2 pi i) \oint f (z - c)^{-k-1} dz = mean of f w^{-k} r^{-k}
    cplx acc = 0.0;
    for (int m = 0; m < M; ++m) acc += fv[m] * std::pow(w[m], -k);
    out.push_back(acc / double(M) * std::pow(radius, -k));
  }
  return out;
}

}  // namespace ncres
