#include "ncres/classical_symbol.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "ncres/error.hpp"

namespace ncres {

namespace {

bool is_int(cplx z) { return std::abs(z.imag()) < 1e-12 && std::abs(z.real() - std::round(z.real())) < 1e-12; }

bool polynomial(const Expr& e) {
  switch (e->kind) {
    case NodeKind::kScalar:
    case NodeKind::kXiMonomial:
      return true;
    case NodeKind::kSum:
    case NodeKind::kProduct:
      for (const auto& c : e->children)
        if (!polynomial(c)) return false;
      return true;
    default:
      return false;
  }
}

cplx binomial(cplx p, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= (p - static_cast<double>(i)) / static_cast<double>(i + 1);
  return r;
}

}  // namespace

Expr ClassicalSymbol::component(int j) const {
  if (j < static_cast<int>(components.size())) return components[j].expr;
  if (exact) return sym::zero(theta);
  throw InvalidInput("symbol has " + std::to_string(components.size()) + " components, component " +
                     std::to_string(j) + " is required");
}

bool ClassicalSymbol::is_differential() const {
  if (!exact || !is_int(order) || order.real() < -0.5) return false;
  for (const auto& c : components)
    if (!polynomial(c.expr)) return false;
  return true;
}

std::vector<Index> multi_indices(int n, int total) {
  std::vector<Index> out;
  Index g{};
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      g[i] = left;
      out.push_back(g);
      g[i] = 0;
      return;
    }
    for (int v = left; v >= 0; --v) {
      g[i] = v;
      rec(i + 1, left - v);
    }
    g[i] = 0;
  };
  if (n >= 1) rec(0, total);
  return out;
}

double factorial(const Index& gamma) {
  double f = 1.0;
  for (int g : gamma)
    for (int i = 2; i <= g; ++i) f *= i;
  return f;
}

ClassicalSymbol from_differential(const ThetaMatrix& theta, const std::vector<DifferentialTerm>& terms) {
  int top = 0;
  for (const auto& t : terms) {
    int s = 0;
    for (int i = 0; i < kMaxDim; ++i) {
      if (t.alpha[i] < 0) throw InvalidInput("negative multi-index in differential term");
      if (t.alpha[i] > 0 && i >= theta.dim()) throw InvalidInput("multi-index beyond the dimension");
      s += t.alpha[i];
    }
    if (t.coefficient.theta() != theta) throw InvalidInput("coefficient lives on a different torus");
    top = std::max(top, s);
  }
  std::vector<std::vector<Expr>> by_degree(top + 1);
  for (const auto& t : terms) {
    int s = 0;
    for (int a : t.alpha) s += a;
    by_degree[s].push_back(sym::product({sym::scalar(t.coefficient), sym::xi(theta, t.alpha)}));
  }
  ClassicalSymbol out;
  out.theta = theta;
  out.order = static_cast<double>(top);
  out.exact = true;
  for (int d = top; d >= 0; --d) {
    Expr e = by_degree[d].empty() ? sym::zero(theta) : sym::sum(by_degree[d]);
    out.components.push_back({static_cast<double>(d), e});
  }
  return out;
}

ClassicalSymbol identity_symbol(const ThetaMatrix& theta) {
  return from_differential(theta, {{Index{}, MultiplierCoefficient::scalar(theta, 1.0)}});
}

ClassicalSymbol multiplication_symbol(const NCElement& a) {
  return from_differential(a.theta(), {{Index{}, MultiplierCoefficient::left(a)}});
}

ClassicalSymbol multiplier_symbol(const MultiplierCoefficient& m) {
  return from_differential(m.theta(), {{Index{}, m}});
}

ClassicalSymbol laplacian_symbol(const ThetaMatrix& theta) {
  std::vector<DifferentialTerm> t;
  for (int i = 0; i < theta.dim(); ++i) {
    Index g{};
    g[i] = 2;
    t.push_back({g, MultiplierCoefficient::scalar(theta, 1.0)});
  }
  return from_differential(theta, t);
}

ClassicalSymbol shifted_laplacian_power(const ThetaMatrix& theta, double c, cplx p, int components) {
  // (|xi|^2 + c)^p = sum_k C(p, k) c^k |xi|^{2p - 2k}
  ClassicalSymbol out;
  out.theta = theta;
  out.order = 2.0 * p;
  Expr r2 = sym::norm_squared(theta);
  for (int j = 0; j < components; ++j) {
    Expr e = sym::zero(theta);
    if (j % 2 == 0) {
      int k = j / 2;
      cplx coef = binomial(p, k) * std::pow(c, k);
      e = sym::product({sym::constant(theta, coef), sym::scalar_power(r2, p - static_cast<double>(k))});
    }
    out.components.push_back({2.0 * p - static_cast<double>(j), e});
  }
  out.full = sym::scalar_power(sym::sum({r2, sym::constant(theta, c)}), p);
  // non-negative integer powers are polynomials: the binomial series terminates
  if (is_int(p) && p.real() >= 0 && components > 2 * static_cast<int>(std::lround(p.real()))) out.exact = true;
  return out;
}

ClassicalSymbol compose(const ClassicalSymbol& A, const ClassicalSymbol& B, int N) {
  if (A.theta != B.theta) throw InvalidInput("composition of symbols on different tori");
  const ThetaMatrix& th = A.theta;
  const int n = th.dim();
  const int na = static_cast<int>(A.components.size()), nb = static_cast<int>(B.components.size());
  bool exact = false;
  if (N < 0) {
    if (A.exact && B.exact) {
      N = na + nb - 1;
      exact = true;
    } else if (A.exact) {
      N = nb;
    } else if (B.exact) {
      N = na;
    } else {
      N = std::min(na, nb);
    }
  } else if (A.exact && B.exact && N >= na + nb - 1) {
    exact = true;
  }
  ClassicalSymbol out;
  out.theta = th;
  out.order = A.order + B.order;
  out.exact = exact;
  // derivative caches: d_xi^gamma a_i and delta^gamma b_j
  std::map<std::pair<int, Index>, Expr> da, db;
  auto get_da = [&](int i, const Index& g) {
    auto key = std::make_pair(i, g);
    auto it = da.find(key);
    if (it != da.end()) return it->second;
    Expr e = diff_xi(A.component(i), g);
    da.emplace(key, e);
    return e;
  };
  auto get_db = [&](int j, const Index& g) {
    auto key = std::make_pair(j, g);
    auto it = db.find(key);
    if (it != db.end()) return it->second;
    Expr e = diff_x(B.component(j), g);
    db.emplace(key, e);
    return e;
  };
  for (int m = 0; m < N; ++m) {
    std::vector<Expr> terms;
    for (int g = 0; g <= m; ++g) {
      auto gammas = multi_indices(n, g);
      for (int i = 0; i + g <= m; ++i) {
        int j = m - g - i;
        if (!A.has_component(i))
          throw InvalidInput("composition depth " + std::to_string(N) + " needs component " + std::to_string(i) +
                             " of the left factor");
        if (!B.has_component(j))
          throw InvalidInput("composition depth " + std::to_string(N) + " needs component " + std::to_string(j) +
                             " of the right factor");
        if (A.component(i)->zero || B.component(j)->zero) continue;
        for (const auto& gamma : gammas) {
          Expr l = get_da(i, gamma);
          if (l->zero) continue;
          Expr r = get_db(j, gamma);
          if (r->zero) continue;
          double f = factorial(gamma);
          terms.push_back(f == 1.0 ? sym::product({l, r}) : sym::product({sym::constant(th, 1.0 / f), l, r}));
        }
      }
    }
    out.components.push_back({out.order - static_cast<double>(m), terms.empty() ? sym::zero(th) : sym::sum(terms)});
  }
  return out;
}

ClassicalSymbol add(const ClassicalSymbol& A, const ClassicalSymbol& B) {
  if (A.theta != B.theta) throw InvalidInput("sum of symbols on different tori");
  cplx diff = A.order - B.order;
  if (!is_int(diff)) throw InvalidInput("sum of symbols whose orders differ by a non-integer");
  const ClassicalSymbol& hi = diff.real() >= 0 ? A : B;
  const ClassicalSymbol& lo = diff.real() >= 0 ? B : A;
  const int shift = static_cast<int>(std::lround(std::abs(diff.real())));
  ClassicalSymbol out;
  out.theta = A.theta;
  out.order = hi.order;
  out.exact = A.exact && B.exact;
  int nh = static_cast<int>(hi.components.size());
  int nl = static_cast<int>(lo.components.size()) + shift;
  int N = std::min(nh, nl);
  if (out.exact)
    N = std::max(nh, nl);
  else if (hi.exact)
    N = nl;
  else if (lo.exact)
    N = nh;
  for (int j = 0; j < N; ++j) {
    Expr a = j < nh ? hi.components[j].expr : sym::zero(A.theta);
    Expr b = (j >= shift && j - shift < static_cast<int>(lo.components.size())) ? lo.components[j - shift].expr
                                                                              : sym::zero(A.theta);
    out.components.push_back({out.order - static_cast<double>(j), a + b});
  }
  if (A.full && B.full) out.full = A.full + B.full;
  return out;
}

ClassicalSymbol scale(const ClassicalSymbol& A, cplx c) {
  ClassicalSymbol out = A;
  for (auto& comp : out.components) comp.expr = c * comp.expr;
  if (A.full) out.full = c * A.full;
  return out;
}

ClassicalSymbol commutator(const ClassicalSymbol& A, const ClassicalSymbol& B, int N) {
  return add(compose(A, B, N), scale(compose(B, A, N), -1.0));
}

MultiplierCoefficient evaluate(const HomogeneousComponent& c, const Xi& xi, std::optional<cplx> lambda,
                               const EvalOptions& opt) {
  Evaluator ev(opt);
  return ev.evaluate(c.expr, xi, lambda);
}

}  // namespace ncres
