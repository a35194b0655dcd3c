#include "ncres/residues.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "ncres/error.hpp"

namespace ncres {

namespace {

bool is_int(cplx z) { return std::abs(z.imag()) < 1e-12 && std::abs(z.real() - std::round(z.real())) < 1e-12; }

// every coefficient is L-only, R-only, or theta = 0: then <sigma U_m, U_m> = tr sigma
bool phase_free(const Expr& e) {
  if (e->kind == NodeKind::kScalar && !e->commutative) {
    if (e->theta.is_zero()) return true;
    for (const auto& t : e->scalar.terms())
      if (!t.left.is_scalar() && !t.right.is_scalar()) return false;
    return true;
  }
  for (const auto& c : e->children)
    if (!phase_free(c)) return false;
  return true;
}

Expr full_or_sum(const ClassicalSymbol& A) {
  if (A.full) return A.full;
  if (A.is_differential()) {
    std::vector<Expr> t;
    for (const auto& c : A.components) t.push_back(c.expr);
    return sym::sum(t);
  }
  return nullptr;
}

}  // namespace

double torus_volume(int n) { return std::pow(2.0 * std::numbers::pi, n); }

FiniteRankRegularization FiniteRankRegularization::kernel_projector(const ThetaMatrix& theta, double weight) {
  FiniteRankRegularization r;
  r.vectors.push_back(NCElement::unit(theta));
  r.weights.push_back(weight);
  return r;
}

double FiniteRankRegularization::min_weight() const {
  double m = std::numeric_limits<double>::infinity();
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidInput("regularization weights must be positive");
    m = std::min(m, w);
  }
  return m;
}

ResidueValue sphere_trace(const Expr& component, int n, const ResidueOptions& opt) {
  ResidueValue r;
  if (component->zero) return r;
  auto sq = sphere_quadrature(n, opt.sphere_nodes);
  Evaluator ev(opt.eval);
  double wsum = 0.0;
  for (std::size_t i = 0; i < sq.nodes.size(); ++i) {
    Xi xi{};
    for (int d = 0; d < n; ++d) xi[d] = sq.nodes[i][d];
    r.value += sq.weights[i] * trace(ev.evaluate(component, xi));
    wsum += sq.weights[i];
  }
  r.error = wsum * ev.stats().contour_error + ev.stats().dropped_mass * wsum / sq.nodes.size();
  return r;
}

ResidueValue residue(const ClassicalSymbol& A, const ResidueOptions& opt) {
  const int n = A.dim();
  cplx j = A.order + static_cast<double>(n);
  if (!is_int(j) || j.real() < -0.5) return {};
  int jj = static_cast<int>(std::lround(j.real()));
  if (!A.has_component(jj))
    throw InvalidInput("residue needs component " + std::to_string(jj) + " (degree -" + std::to_string(n) +
                       "), the symbol has " + std::to_string(A.components.size()));
  return sphere_trace(A.component(jj), n, opt);
}

ContourSpec contour_for(const ClassicalSymbol& Q, const FiniteRankRegularization& reg, const ResidueOptions& opt) {
  if (opt.contour) return *opt.contour;
  double cap = reg.weights.empty() ? std::numeric_limits<double>::infinity() : 0.5 * reg.min_weight();
  return default_contour(Q, cap);
}

ResidueValue residue_log(const ClassicalSymbol& A, const ClassicalSymbol& Q, const FiniteRankRegularization& reg,
                         const ResidueOptions& opt) {
  if (!A.exact) throw InvalidInput("logarithmic residue needs an exact (differential) left factor");
  if (A.theta != Q.theta) throw InvalidInput("operands live on different tori");
  if (reg.vectors.size() != reg.weights.size()) throw InvalidInput("regularization vectors and weights differ in count");
  const int n = A.dim();
  cplx j = A.order + static_cast<double>(n);
  if (!is_int(j) || j.real() < -0.5) return {};
  int jj = static_cast<int>(std::lround(j.real()));
  auto L = log_symbol(Q, jj + 1, contour_for(Q, reg, opt));
  auto prod = compose(A, L.as_symbol(), jj + 1);
  return sphere_trace(prod.components[jj].expr, n, opt);
}

ResidueValue cutoff_integral(const ClassicalSymbol& A, const CutoffOptions& options) {
  const int n = A.dim();
  CutoffOptions opt = options;
  if (A.is_differential()) {
    // exact rules suffice for polynomials of this degree
    int d = static_cast<int>(std::lround(A.order.real()));
    opt.residue.sphere_nodes = std::min(opt.residue.sphere_nodes, d + 2);
    opt.radial_panels = 1;
    opt.radial_nodes = std::min(opt.radial_nodes, (d + n) / 2 + 2);
  }
  Expr full = full_or_sum(A);
  if (!A.exact && A.remainder_order().real() >= -n)
    throw InvalidInput("cut-off integral needs remainder order below -n; add components (remainder order " +
                       std::to_string(A.remainder_order().real()) + ")");
  ResidueValue out;
  // finite parts of the components over |xi| >= 1
  for (std::size_t j = 0; j < A.components.size(); ++j) {
    cplx mn = A.components[j].degree + static_cast<double>(n);
    if (std::abs(mn) < 1e-12) continue;
    auto s = sphere_trace(A.components[j].expr, n, opt.residue);
    out.value -= s.value / mn;
    out.error += s.error / std::abs(mn);
  }
  if (!full) return out;

  auto sq = sphere_quadrature(n, opt.residue.sphere_nodes);
  Evaluator ev(opt.residue.eval);
  auto shell = [&](double r, bool subtract) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < sq.nodes.size(); ++i) {
      Xi xi{};
      for (int d = 0; d < n; ++d) xi[d] = r * sq.nodes[i][d];
      cplx v = trace(ev.evaluate(full, xi));
      if (subtract)
        for (const auto& c : A.components) v -= trace(ev.evaluate(c.expr, xi));
      acc += sq.weights[i] * v;
    }
    return acc;
  };
  // unit ball
  auto rule = composite_gauss_legendre(0.0, 1.0, opt.radial_panels, opt.radial_nodes);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    double r = rule.x[i];
    out.value += rule.w[i] * std::pow(r, n - 1) * shell(r, false);
  }
  // outside: u = 1/r, geometric panels towards u = 0
  if (!A.exact) {
    auto gl = gauss_legendre(opt.radial_nodes);
    for (int k = 0; k < 40; ++k) {
      double b = std::pow(0.5, k), a = 0.5 * b;
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        double u = a + 0.5 * (b - a) * (gl.x[i] + 1.0);
        double w = 0.5 * (b - a) * gl.w[i];
        out.value += w * std::pow(u, -n - 1) * shell(1.0 / u, true);
      }
    }
  }
  out.error += ev.stats().contour_error + ev.stats().dropped_mass;
  return out;
}

namespace {

// Sum over the faces x_i = +-1 of the cube [-1, 1]^n of tr h.
cplx face_integral(const Expr& h, int n, const ResidueOptions& ro) {
  Evaluator ev(ro.eval);
  if (n == 1) {
    Xi a{}, b{};
    a[0] = 1.0;
    b[0] = -1.0;
    return trace(ev.evaluate(h, a)) + trace(ev.evaluate(h, b));
  }
  auto g = composite_gauss_legendre(-1.0, 1.0, 4, 12);
  const int m = n - 1;
  const std::size_t q = g.x.size();
  std::size_t total = 1;
  for (int d = 0; d < m; ++d) total *= q;
  cplx acc = 0.0;
  for (int face = 0; face < n; ++face)
    for (int sgn = -1; sgn <= 1; sgn += 2)
      for (std::size_t idx = 0; idx < total; ++idx) {
        Xi xi{};
        double w = 1.0;
        std::size_t rem = idx;
        int d = 0;
        for (int c = 0; c < n; ++c) {
          if (c == face) {
            xi[c] = sgn;
            continue;
          }
          std::size_t t = rem % q;
          rem /= q;
          xi[c] = g.x[t];
          w *= g.w[t];
          ++d;
        }
        acc += w * trace(ev.evaluate(h, xi));
      }
  return acc;
}

std::vector<int> default_radii(int n) {
  switch (n) {
    case 1:
      return {50, 70, 100, 140, 200, 280, 400};
    case 2:
      return {10, 14, 20, 28, 40, 56, 80};
    case 3:
      return {6, 8, 10, 12, 14, 17, 20};
    default:
      return {4, 5, 6, 7, 8, 9, 10};
  }
}

// least squares G(s) = T + sum_e c_e s^e, returns T
cplx extrapolate(const std::vector<double>& s, const std::vector<cplx>& g, const std::vector<double>& exps) {
  const int rows = static_cast<int>(s.size()), cols = 1 + static_cast<int>(exps.size());
  Eigen::MatrixXd M(rows, cols);
  Eigen::VectorXcd y(rows);
  for (int i = 0; i < rows; ++i) {
    M(i, 0) = 1.0;
    for (int e = 0; e < static_cast<int>(exps.size()); ++e) M(i, e + 1) = std::pow(s[i], exps[e]);
    y(i) = g[i];
  }
  Eigen::VectorXd scale = M.colwise().norm().cwiseInverse();
  Eigen::MatrixXd Ms = M * scale.asDiagonal();
  auto qr = Ms.colPivHouseholderQr();
  Eigen::VectorXd re = qr.solve(y.real()), im = qr.solve(y.imag());
  return cplx(re(0) * scale(0), im(0) * scale(0));
}

}  // namespace

ResidueValue canonical_trace(const ClassicalSymbol& A, const CanonicalTraceOptions& opt) {
  const int n = A.dim();
  if (is_int(A.order) && A.order.real() >= -n - 0.5)
    throw InvalidInput("canonical trace is undefined at integer order >= -n (order " +
                       std::to_string(A.order.real()) + ")");
  if (opt.route == TraceRoute::kCutoff) {
    auto c = cutoff_integral(A, opt.cutoff);
    double v = torus_volume(n);
    return {v * c.value, v * c.error};
  }
  if (A.order.real() + n >= 2.0)
    throw InvalidInput("lattice route needs order < 2 - n; use the cut-off route");
  Expr full = A.full;
  bool ok = !full || phase_free(full);
  for (const auto& c : A.components) ok = ok && phase_free(c.expr);
  if (!ok) throw InvalidInput("lattice route needs left-only or right-only coefficients when theta != 0");

  auto radii = opt.radii.empty() ? default_radii(n) : opt.radii;
  std::sort(radii.begin(), radii.end());
  const int Lmax = radii.back();
  // shell sums by |k|_inf
  std::vector<cplx> shell(Lmax + 1, 0.0);
  Evaluator ev(opt.cutoff.residue.eval);
  Index k{};
  std::function<void(int)> rec = [&](int d) {
    if (d == n) {
      int r = linf(k);
      if (r == 0 && !full) return;
      Xi xi{};
      for (int i = 0; i < n; ++i) xi[i] = k[i];
      cplx v = 0.0;
      if (full) {
        v = trace(ev.evaluate(full, xi));
      } else {
        for (const auto& c : A.components) v += trace(ev.evaluate(c.expr, xi));
      }
      shell[r] += v;
      return;
    }
    for (int i = -Lmax; i <= Lmax; ++i) {
      k[d] = i;
      rec(d + 1);
    }
    k[d] = 0;
  };
  rec(0);
  std::vector<cplx> C;
  for (const auto& c : A.components) {
    cplx mn = c.degree + static_cast<double>(n);
    C.push_back(face_integral(c.expr, n, opt.cutoff.residue) / mn);
  }
  std::vector<double> s;
  std::vector<cplx> g;
  cplx partial = 0.0;
  int next = 0;
  for (int L = 0; L <= Lmax; ++L) {
    partial += shell[L];
    if (L != radii[next]) continue;
    double sL = L + 0.5;
    cplx G = partial;
    for (std::size_t j = 0; j < C.size(); ++j) G -= C[j] * std::exp((A.components[j].degree + double(n)) * std::log(sL));
    s.push_back(sL);
    g.push_back(G);
    ++next;
  }
  std::vector<double> exps;
  for (int kk = 1; exps.size() < 5 && kk < 50; ++kk) {
    double e = A.order.real() + n - kk;
    if (e < -1e-9) exps.push_back(e);
  }
  cplx T = extrapolate(s, g, exps);
  std::vector<double> s2(s.begin(), s.end() - 1);
  std::vector<cplx> g2(g.begin(), g.end() - 1);
  cplx T2 = extrapolate(s2, g2, exps);
  return {T, std::abs(T - T2) + ev.stats().dropped_mass};
}

}  // namespace ncres
