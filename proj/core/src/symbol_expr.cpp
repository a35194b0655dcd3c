#include "ncres/symbol_expr.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <unordered_set>

#include "ncres/error.hpp"

namespace ncres {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct HashBuilder {
  std::uint64_t a = 0x243f6a8885a308d3ULL, b = 0x13198a2e03707344ULL;
  void add(std::uint64_t v) {
    a = splitmix(a ^ v);
    b = splitmix(b + v + 0xa4093822299f31d0ULL);
  }
  void add_double(double d) {
    if (d == 0.0) d = 0.0;  // fold -0
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    add(bits);
  }
  void add_cplx(cplx c) {
    add_double(c.real());
    add_double(c.imag());
  }
  void add_element(const NCElement& e) {
    add(e.size());
    for (const auto& [k, c] : e.terms()) {
      for (int i = 0; i < e.dim(); ++i) add(static_cast<std::uint64_t>(static_cast<std::int64_t>(k[i])));
      add_cplx(c);
    }
  }
  void add_hash(const Hash128& h) {
    add(h.a);
    add(h.b);
  }
  Hash128 done() const { return {a, b}; }
};

Hash128 multiplier_hash(const MultiplierCoefficient& m) {
  HashBuilder h;
  h.add(m.terms().size());
  for (const auto& t : m.terms()) {
    h.add_element(t.left);
    h.add_element(t.right);
  }
  return h.done();
}

Hash128 element_hash(const NCElement& e) {
  HashBuilder h;
  h.add_element(e);
  return h.done();
}

void finish(SymbolNode& nd) {
  HashBuilder h;
  h.add(static_cast<std::uint64_t>(nd.kind));
  h.add(nd.theta.dim());
  switch (nd.kind) {
    case NodeKind::kScalar:
      h.add_hash(multiplier_hash(nd.scalar));
      break;
    case NodeKind::kXiMonomial:
      for (int i = 0; i < kMaxDim; ++i) h.add(static_cast<std::uint64_t>(nd.gamma[i]));
      break;
    case NodeKind::kLambda:
    case NodeKind::kLogNorm:
      h.add_double(nd.weight);
      break;
    case NodeKind::kScalarPower:
      h.add_cplx(nd.exponent);
      break;
    case NodeKind::kContour: {
      h.add_cplx(nd.exponent);
      h.add(nd.log_power);
      h.add_double(nd.weight);
      h.add_cplx(nd.child_degree);
      const auto& s = nd.contour->spec();
      h.add_double(s.beta);
      h.add_double(s.eps);
      h.add_double(s.R);
      h.add(s.panels);
      h.add(s.nodes);
      break;
    }
    default:
      break;
  }
  h.add(nd.children.size());
  for (const auto& c : nd.children) h.add_hash(c->hash);
  nd.hash = h.done();
}

std::shared_ptr<SymbolNode> make(NodeKind k, const ThetaMatrix& th) {
  auto nd = std::make_shared<SymbolNode>();
  nd->kind = k;
  nd->theta = th;
  return nd;
}

bool is_number(const Expr& e) { return e->kind == NodeKind::kScalar && e->commutative; }

cplx number_value(const Expr& e) { return e->scalar.is_zero() ? cplx(0.0) : e->scalar.scalar_value(); }

void check_theta(const std::vector<Expr>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i]->theta != v[0]->theta) throw InvalidInput("expression operands live on different tori");
}

}  // namespace

namespace sym {

Expr constant(const ThetaMatrix& th, cplx c) {
  auto nd = make(NodeKind::kScalar, th);
  nd->scalar = MultiplierCoefficient::scalar(th, c);
  nd->zero = (c == cplx(0.0));
  finish(*nd);
  return nd;
}

Expr scalar(const MultiplierCoefficient& m) {
  auto nm = m.normalized();
  if (nm.is_scalar()) return constant(m.theta(), nm.scalar_value());
  auto nd = make(NodeKind::kScalar, m.theta());
  nd->scalar = std::move(nm);
  nd->commutative = false;
  finish(*nd);
  return nd;
}

Expr left(const NCElement& a) { return scalar(MultiplierCoefficient::left(a)); }
Expr right(const NCElement& b) { return scalar(MultiplierCoefficient::right(b)); }

Expr xi(const ThetaMatrix& th, const Index& gamma) {
  bool any = false;
  for (int i = 0; i < kMaxDim; ++i) {
    if (gamma[i] < 0) throw InvalidInput("negative xi exponent");
    if (gamma[i] > 0 && i >= th.dim()) throw InvalidInput("xi exponent beyond the dimension");
    any = any || gamma[i] > 0;
  }
  if (!any) return one(th);
  auto nd = make(NodeKind::kXiMonomial, th);
  nd->gamma = gamma;
  finish(*nd);
  return nd;
}

Expr xi_coord(const ThetaMatrix& th, int i) {
  Index g{};
  g[i] = 1;
  return xi(th, g);
}

Expr norm_squared(const ThetaMatrix& th) {
  std::vector<Expr> t;
  for (int i = 0; i < th.dim(); ++i) {
    Index g{};
    g[i] = 2;
    t.push_back(xi(th, g));
  }
  return sum(t);
}

Expr lambda(const ThetaMatrix& th, double q) {
  auto nd = make(NodeKind::kLambda, th);
  nd->weight = q;
  nd->lambda_free = false;
  finish(*nd);
  return nd;
}

Expr sum(std::vector<Expr> terms) {
  if (terms.empty()) throw InvalidInput("empty sum has no torus");
  check_theta(terms);
  const ThetaMatrix th = terms[0]->theta;
  std::vector<Expr> flat;
  cplx c = 0.0;
  bool has_c = false;
  std::function<void(const Expr&)> push = [&](const Expr& e) {
    if (e->zero) return;
    if (e->kind == NodeKind::kSum) {
      for (const auto& ch : e->children) push(ch);
    } else if (is_number(e)) {
      c += number_value(e);
      has_c = true;
    } else {
      flat.push_back(e);
    }
  };
  for (const auto& t : terms) push(t);
  if (has_c && c != cplx(0.0)) flat.push_back(constant(th, c));
  if (flat.empty()) return zero(th);
  if (flat.size() == 1) return flat[0];
  auto nd = make(NodeKind::kSum, th);
  for (const auto& f : flat) {
    nd->lambda_free = nd->lambda_free && f->lambda_free;
    nd->commutative = nd->commutative && f->commutative;
  }
  nd->children = std::move(flat);
  finish(*nd);
  return nd;
}

Expr product(std::vector<Expr> factors) {
  if (factors.empty()) throw InvalidInput("empty product has no torus");
  check_theta(factors);
  const ThetaMatrix th = factors[0]->theta;
  cplx c = 1.0;
  Index g{};
  bool has_xi = false, is_zero = false;
  std::vector<Expr> comm, nc;
  std::function<void(const Expr&)> push = [&](const Expr& e) {
    if (e->zero) {
      is_zero = true;
      return;
    }
    if (e->kind == NodeKind::kProduct) {
      for (const auto& ch : e->children) push(ch);
    } else if (is_number(e)) {
      c *= number_value(e);
    } else if (e->kind == NodeKind::kXiMonomial) {
      g = g + e->gamma;
      has_xi = true;
    } else if (e->commutative) {
      comm.push_back(e);
    } else {
      nc.push_back(e);
    }
  };
  for (const auto& f : factors) push(f);
  if (is_zero || c == cplx(0.0)) return zero(th);
  std::vector<Expr> out;
  if (c != cplx(1.0)) out.push_back(constant(th, c));
  if (has_xi) out.push_back(xi(th, g));
  for (auto& e : comm) out.push_back(e);
  for (auto& e : nc) out.push_back(e);
  if (out.empty()) return one(th);
  if (out.size() == 1) return out[0];
  auto nd = make(NodeKind::kProduct, th);
  for (const auto& f : out) {
    nd->lambda_free = nd->lambda_free && f->lambda_free;
    nd->commutative = nd->commutative && f->commutative;
  }
  nd->children = std::move(out);
  finish(*nd);
  return nd;
}

Expr inverse(const Expr& e) {
  if (e->zero) throw SingularError("symbolic inverse of zero", 0.0);
  if (is_number(e)) return constant(e->theta, 1.0 / number_value(e));
  if (e->kind == NodeKind::kInverse) return e->children[0];
  auto nd = make(NodeKind::kInverse, e->theta);
  nd->children = {e};
  nd->lambda_free = e->lambda_free;
  nd->commutative = e->commutative;
  // recognise X - lambda with X free of lambda
  if (e->kind == NodeKind::kSum) {
    std::vector<Expr> base;
    int lam_terms = 0;
    bool ok = true;
    for (const auto& ch : e->children) {
      if (ch->lambda_free) {
        base.push_back(ch);
        continue;
      }
      ++lam_terms;
      bool minus_lambda = ch->kind == NodeKind::kProduct && ch->children.size() == 2 && is_number(ch->children[0]) &&
                          number_value(ch->children[0]) == cplx(-1.0) && ch->children[1]->kind == NodeKind::kLambda;
      ok = ok && minus_lambda;
    }
    if (ok && lam_terms == 1 && !base.empty()) nd->resolvent_base = sum(base);
  }
  finish(*nd);
  return nd;
}

Expr scalar_power(const Expr& e, cplx p) {
  if (!e->commutative) throw InvalidInput("scalar powers need a commutative (scalar valued) base");
  if (p == cplx(0.0)) return one(e->theta);
  if (p == cplx(1.0)) return e;
  if (is_number(e)) return constant(e->theta, std::pow(number_value(e), p));
  auto nd = make(NodeKind::kScalarPower, e->theta);
  nd->children = {e};
  nd->exponent = p;
  nd->lambda_free = e->lambda_free;
  finish(*nd);
  return nd;
}

Expr log_norm(const ThetaMatrix& th, double q) {
  if (q == 0.0) return zero(th);
  auto nd = make(NodeKind::kLogNorm, th);
  nd->weight = q;
  finish(*nd);
  return nd;
}

Expr contour_integral(const Expr& child, cplx z, int log_power, std::shared_ptr<const Contour> contour, double q,
                      cplx child_degree) {
  if (log_power < 0 || log_power > 1) throw InvalidInput("contour integrals support log powers 0 and 1");
  if (!contour) throw InvalidInput("contour integral without contour");
  if (child->zero) return zero(child->theta);
  auto nd = make(NodeKind::kContour, child->theta);
  nd->children = {child};
  nd->exponent = z;
  nd->log_power = log_power;
  nd->contour = std::move(contour);
  nd->weight = q;
  nd->child_degree = child_degree;
  nd->commutative = child->commutative;
  nd->lambda_free = true;
  finish(*nd);
  return nd;
}

}  // namespace sym

Expr operator+(const Expr& a, const Expr& b) { return sym::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sym::sum({a, sym::product({sym::constant(b->theta, -1.0), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return sym::product({a, b}); }
Expr operator*(cplx c, const Expr& a) { return sym::product({sym::constant(a->theta, c), a}); }

namespace {

using DiffMemo = std::unordered_map<const SymbolNode*, Expr>;

Expr dxi(const Expr& e, int i, DiffMemo& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  const ThetaMatrix& th = e->theta;
  Expr r;
  switch (e->kind) {
    case NodeKind::kScalar:
    case NodeKind::kLambda:
      r = sym::zero(th);
      break;
    case NodeKind::kXiMonomial: {
      if (e->gamma[i] == 0) {
        r = sym::zero(th);
      } else {
        Index g = e->gamma;
        g[i] -= 1;
        r = sym::product({sym::constant(th, static_cast<double>(e->gamma[i])), sym::xi(th, g)});
      }
      break;
    }
    case NodeKind::kSum: {
      std::vector<Expr> t;
      for (const auto& c : e->children) t.push_back(dxi(c, i, memo));
      r = sym::sum(t);
      break;
    }
    case NodeKind::kProduct: {
      std::vector<Expr> t;
      for (std::size_t j = 0; j < e->children.size(); ++j) {
        Expr d = dxi(e->children[j], i, memo);
        if (d->zero) continue;
        std::vector<Expr> f(e->children);
        f[j] = d;
        t.push_back(sym::product(f));
      }
      r = t.empty() ? sym::zero(th) : sym::sum(t);
      break;
    }
    case NodeKind::kInverse: {
      Expr d = dxi(e->children[0], i, memo);
      r = d->zero ? sym::zero(th) : sym::product({sym::constant(th, -1.0), e, d, e});
      break;
    }
    case NodeKind::kScalarPower: {
      Expr d = dxi(e->children[0], i, memo);
      r = d->zero ? sym::zero(th)
                  : sym::product({sym::constant(th, e->exponent), sym::scalar_power(e->children[0], e->exponent - 1.0), d});
      break;
    }
    case NodeKind::kLogNorm:
      r = sym::product({sym::constant(th, e->weight), sym::xi_coord(th, i),
                        sym::scalar_power(sym::norm_squared(th), -1.0)});
      break;
    case NodeKind::kContour: {
      Expr d = dxi(e->children[0], i, memo);
      r = sym::contour_integral(d, e->exponent, e->log_power, e->contour, e->weight, e->child_degree - 1.0);
      break;
    }
  }
  memo.emplace(e.get(), r);
  return r;
}

Expr dx(const Expr& e, int j, DiffMemo& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  const ThetaMatrix& th = e->theta;
  Expr r;
  switch (e->kind) {
    case NodeKind::kScalar:
      r = e->commutative ? sym::zero(th) : sym::scalar(derive(e->scalar, j));
      break;
    case NodeKind::kXiMonomial:
    case NodeKind::kLambda:
    case NodeKind::kScalarPower:
    case NodeKind::kLogNorm:
      r = sym::zero(th);
      break;
    case NodeKind::kSum: {
      std::vector<Expr> t;
      for (const auto& c : e->children) t.push_back(dx(c, j, memo));
      r = sym::sum(t);
      break;
    }
    case NodeKind::kProduct: {
      std::vector<Expr> t;
      for (std::size_t k = 0; k < e->children.size(); ++k) {
        Expr d = dx(e->children[k], j, memo);
        if (d->zero) continue;
        std::vector<Expr> f(e->children);
        f[k] = d;
        t.push_back(sym::product(f));
      }
      r = t.empty() ? sym::zero(th) : sym::sum(t);
      break;
    }
    case NodeKind::kInverse: {
      Expr d = dx(e->children[0], j, memo);
      r = d->zero ? sym::zero(th) : sym::product({sym::constant(th, -1.0), e, d, e});
      break;
    }
    case NodeKind::kContour: {
      Expr d = dx(e->children[0], j, memo);
      r = sym::contour_integral(d, e->exponent, e->log_power, e->contour, e->weight, e->child_degree);
      break;
    }
  }
  memo.emplace(e.get(), r);
  return r;
}

}  // namespace

Expr diff_xi(const Expr& e, int i) {
  if (i < 0 || i >= e->dim()) throw InvalidInput("xi direction out of range");
  DiffMemo memo;
  return dxi(e, i, memo);
}

Expr diff_xi(const Expr& e, const Index& gamma) {
  Expr r = e;
  for (int i = 0; i < e->dim(); ++i)
    for (int k = 0; k < gamma[i]; ++k) r = diff_xi(r, i);
  return r;
}

Expr diff_x(const Expr& e, int j) {
  if (j < 0 || j >= e->dim()) throw InvalidInput("derivation direction out of range");
  DiffMemo memo;
  return dx(e, j, memo);
}

Expr diff_x(const Expr& e, const Index& gamma) {
  Expr r = e;
  for (int i = 0; i < e->dim(); ++i)
    for (int k = 0; k < gamma[i]; ++k) r = diff_x(r, i);
  return r;
}

std::optional<cplx> infer_degree(const Expr& e) {
  if (e->zero) return cplx(0.0);
  switch (e->kind) {
    case NodeKind::kScalar:
      return cplx(0.0);
    case NodeKind::kXiMonomial: {
      int s = 0;
      for (int g : e->gamma) s += g;
      return cplx(s);
    }
    case NodeKind::kLambda:
      return cplx(e->weight);
    case NodeKind::kLogNorm:
      return std::nullopt;
    case NodeKind::kSum: {
      std::optional<cplx> d;
      for (const auto& c : e->children) {
        auto dc = infer_degree(c);
        if (!dc) return std::nullopt;
        if (d && std::abs(*d - *dc) > 1e-12) return std::nullopt;
        d = dc;
      }
      return d;
    }
    case NodeKind::kProduct: {
      cplx s = 0.0;
      for (const auto& c : e->children) {
        auto dc = infer_degree(c);
        if (!dc) return std::nullopt;
        s += *dc;
      }
      return s;
    }
    case NodeKind::kInverse: {
      auto d = infer_degree(e->children[0]);
      if (!d) return std::nullopt;
      return -*d;
    }
    case NodeKind::kScalarPower: {
      auto d = infer_degree(e->children[0]);
      if (!d) return std::nullopt;
      return e->exponent * *d;
    }
    case NodeKind::kContour:
      // log powers break exact homogeneity away from the unit sphere
      if (e->log_power != 0) return std::nullopt;
      return e->weight * e->exponent + e->child_degree + e->weight;
  }
  return std::nullopt;
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const SymbolNode*> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!seen.insert(x.get()).second) return;
    for (const auto& c : x->children) walk(c);
    if (x->resolvent_base) walk(x->resolvent_base);
  };
  walk(e);
  return seen.size();
}

// ---------------------------------------------------------------- evaluation

struct Evaluator::SolverEntry {
  ResolventSolver solver;
};

Evaluator::Evaluator(EvalOptions opt) : opt_(opt) {}
Evaluator::~Evaluator() = default;

void Evaluator::set_point(const Xi& xi, std::optional<cplx> lambda) {
  if (!has_xi_ || xi != xi_) {
    xi_memo_.clear();
    memo_.clear();
    xi_ = xi;
    has_xi_ = true;
    lambda_ = lambda;
    return;
  }
  if (lambda != lambda_) {
    memo_.clear();
    lambda_ = lambda;
  }
}

MultiplierCoefficient Evaluator::evaluate(const Expr& e, const Xi& xi, std::optional<cplx> lambda) {
  set_point(xi, lambda);
  return eval(*e);
}

MultiplierCoefficient Evaluator::eval(const SymbolNode& nd) {
  auto& table = nd.lambda_free ? xi_memo_ : memo_;
  if (auto it = table.find(nd.hash); it != table.end()) return it->second;
  const ThetaMatrix& th = nd.theta;
  MultiplierCoefficient v(th);
  switch (nd.kind) {
    case NodeKind::kScalar:
      v = nd.commutative ? nd.scalar : truncate(nd.scalar, opt_.truncation, &stats_.dropped_mass);
      break;
    case NodeKind::kXiMonomial: {
      double p = 1.0;
      for (int i = 0; i < th.dim(); ++i)
        for (int k = 0; k < nd.gamma[i]; ++k) p *= xi_[i];
      v = MultiplierCoefficient::scalar(th, p);
      break;
    }
    case NodeKind::kLambda:
      if (!lambda_) throw InvalidInput("expression depends on lambda but no lambda was given");
      v = MultiplierCoefficient::scalar(th, *lambda_);
      break;
    case NodeKind::kLogNorm: {
      double r2 = 0.0;
      for (int i = 0; i < th.dim(); ++i) r2 += xi_[i] * xi_[i];
      if (r2 == 0.0) throw InvalidInput("log|xi| at xi = 0");
      v = MultiplierCoefficient::scalar(th, 0.5 * nd.weight * std::log(r2));
      break;
    }
    case NodeKind::kSum: {
      std::vector<MultiplierCoefficient::Term> terms;
      for (const auto& c : nd.children) {
        auto cv = eval(*c);
        terms.insert(terms.end(), cv.terms().begin(), cv.terms().end());
      }
      v = MultiplierCoefficient(th, std::move(terms)).normalized();
      break;
    }
    case NodeKind::kProduct: {
      v = eval(*nd.children[0]);
      for (std::size_t i = 1; i < nd.children.size(); ++i) {
        v = mul(v, eval(*nd.children[i]));
        if (!v.is_scalar()) v = truncate(v, opt_.truncation, &stats_.dropped_mass);
        if (v.is_zero()) break;
      }
      break;
    }
    case NodeKind::kInverse:
      v = eval_inverse(nd);
      break;
    case NodeKind::kScalarPower: {
      auto b = eval(*nd.children[0]);
      if (!b.is_scalar()) throw InvalidInput("scalar power of a non-scalar value");
      cplx x = b.scalar_value();
      if (x == cplx(0.0)) throw SingularError("scalar power at zero", 0.0);
      v = MultiplierCoefficient::scalar(th, std::exp(nd.exponent * std::log(x)));
      break;
    }
    case NodeKind::kContour:
      v = eval_contour(nd);
      break;
  }
  table.emplace(nd.hash, v);
  return v;
}

MultiplierCoefficient Evaluator::eval_inverse(const SymbolNode& nd) {
  const ThetaMatrix& th = nd.theta;
  const int radius = opt_.resolvent_radius > 0 ? opt_.resolvent_radius : opt_.truncation.radius + 4;
  if (nd.resolvent_base && lambda_) {
    auto x = eval(*nd.resolvent_base).normalized();
    const cplx lam = *lambda_;
    if (x.is_scalar()) {
      cplx d = x.scalar_value() - lam;
      if (std::abs(d) < 1e-300) throw SingularError("resolvent at a spectral point", 0.0);
      return MultiplierCoefficient::scalar(th, 1.0 / d);
    }
    if (auto os = one_sided(x)) {
      const bool left_type = !os->second;
      NCElement y = os->first;
      // pull out a scalar so that rescaled operands share one factorisation
      cplx c = y.coeff(Index{});
      if (std::abs(c) < 1e-3 * y.norm_max()) {
        for (const auto& term : y.terms())
          if (std::abs(term.second) == y.norm_max()) c = term.second;
      }
      NCElement yn = scale(y, 1.0 / c);
      Hash128 key = element_hash(yn);
      auto it = solvers_.find(key);
      if (it == solvers_.end()) {
        if (solvers_.size() > 256) solvers_.clear();
        it = solvers_.emplace(key, std::make_shared<SolverEntry>(SolverEntry{ResolventSolver(yn, radius, opt_.truncation.drop_tol)}))
                 .first;
        ++stats_.resolvent_factorizations;
      }
      const auto& solver = it->second->solver;
      cplx mu = lam / c;
      if (solver.distance_to_spectrum(mu) < 1e-12 * std::max(1.0, std::abs(mu)))
        throw SingularError("resolvent operand singular at lambda = (" + std::to_string(lam.real()) + "," +
                                std::to_string(lam.imag()) + ")",
                            solver.distance_to_spectrum(mu) * std::abs(c));
      NCElement r = scale(solver.resolve(mu), 1.0 / c);
      auto tr = truncate(r, opt_.truncation);
      stats_.dropped_mass += tr.dropped;
      return left_type ? MultiplierCoefficient::left(tr.value) : MultiplierCoefficient::right(tr.value);
    }
  }
  auto val = eval(*nd.children[0]);
  InvertOptions io = opt_.invert;
  if (io.target_support == 0) io.target_support = opt_.truncation.radius;
  if (io.basis_radius == 0) io.basis_radius = radius;
  return inverse(val, io);
}

MultiplierCoefficient Evaluator::eval_contour(const SymbolNode& nd) {
  const ThetaMatrix& th = nd.theta;
  const int n = th.dim();
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += xi_[i] * xi_[i];
  if (r2 == 0.0) throw InvalidInput("contour integral evaluated at xi = 0");
  const double r = std::sqrt(r2);
  Xi omega{};
  for (int i = 0; i < n; ++i) omega[i] = xi_[i] / r;
  if (!inner_) inner_ = std::make_unique<Evaluator>(opt_);

  const bool need_plain = nd.log_power == 1 && r != 1.0;
  const cplx pref = -1.0 / (2.0 * std::numbers::pi * cplx(0.0, 1.0));
  // truncation losses inside the integrand, weighted like the integrand itself
  double weighted_drop = 0.0;
  auto integrate = [&](const std::vector<Contour::Point>& pts, MultiplierCoefficient* plain) {
    std::vector<MultiplierCoefficient::Term> acc, acc0;
    for (const auto& p : pts) {
      double before = inner_->stats_.dropped_mass;
      auto val = inner_->evaluate(nd.children[0], omega, p.lambda);
      cplx pw = nd.exponent == cplx(0.0) ? cplx(1.0) : std::exp(nd.exponent * p.log_lambda);
      cplx f = nd.log_power == 1 ? pw * p.log_lambda : pw;
      weighted_drop += std::abs(pref * f * p.weight) * (inner_->stats_.dropped_mass - before);
      for (const auto& t : val.terms()) acc.push_back({scale(t.left, pref * f * p.weight), t.right});
      if (plain)
        for (const auto& t : val.terms()) acc0.push_back({scale(t.left, pref * pw * p.weight), t.right});
    }
    if (plain) *plain = MultiplierCoefficient(th, std::move(acc0)).normalized();
    return MultiplierCoefficient(th, std::move(acc)).normalized();
  };
  MultiplierCoefficient plain(th);
  auto fine = integrate(nd.contour->fine(), need_plain ? &plain : nullptr);
  const double drop_fine = weighted_drop;
  auto coarse = integrate(nd.contour->coarse(), nullptr);
  ++stats_.contour_integrals;
  const auto& is = inner_->stats_;
  stats_.resolvent_factorizations += is.resolvent_factorizations;
  stats_.contour_error = std::max(stats_.contour_error, is.contour_error);
  inner_->stats_ = EvalStats{};

  const cplx deg = nd.weight * nd.exponent + nd.child_degree + nd.weight;
  const cplx factor = r == 1.0 ? cplx(1.0) : std::exp(deg * std::log(r));
  stats_.dropped_mass += drop_fine * std::abs(factor);
  double err = add(fine, scale(coarse, -1.0)).norm1() * std::abs(factor);
  stats_.contour_error = std::max(stats_.contour_error, err);
  if (err > opt_.contour_tol * std::max(1.0, fine.norm1() * std::abs(factor)))
    throw ConvergenceError("contour quadrature: halving the panels changed the value", err);
  if (r == 1.0) return fine;
  auto out = scale(fine, factor);
  if (need_plain) out = add(out, scale(plain, factor * nd.weight * std::log(r)));
  return out;
}

}  // namespace ncres
