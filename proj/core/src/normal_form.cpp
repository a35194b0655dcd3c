#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ncres/error.hpp"
#include "ncres/symbol_expr.hpp"

namespace ncres {

namespace {

struct Mono {
  cplx coef = 1.0;
  Index xi{};
  int lam = 0;
  std::vector<const SymbolNode*> comm;
  std::vector<const SymbolNode*> nc;
};

bool inverse_pair(const SymbolNode* a, const SymbolNode* b) {
  if (a->kind == NodeKind::kInverse && a->children[0]->hash == b->hash) return true;
  if (b->kind == NodeKind::kInverse && b->children[0]->hash == a->hash) return true;
  return false;
}

// X * X^{-1} cancels anywhere among commuting atoms
void cancel_commutative(std::vector<const SymbolNode*>& v) {
  bool again = true;
  while (again) {
    again = false;
    for (std::size_t i = 0; i < v.size() && !again; ++i)
      for (std::size_t j = i + 1; j < v.size() && !again; ++j)
        if (inverse_pair(v[i], v[j])) {
          v.erase(v.begin() + static_cast<long>(j));
          v.erase(v.begin() + static_cast<long>(i));
          again = true;
        }
  }
}

// append b to a, cancelling adjacent inverse pairs at the seam
void append_nc(std::vector<const SymbolNode*>& a, const std::vector<const SymbolNode*>& b) {
  for (const auto* x : b) {
    if (!a.empty() && inverse_pair(a.back(), x))
      a.pop_back();
    else
      a.push_back(x);
  }
}

class Expander {
 public:
  Expander(std::size_t cap) : cap_(cap) {}

  const std::vector<Mono>& expand(const SymbolNode* nd) {
    auto it = memo_.find(nd);
    if (it != memo_.end()) return it->second;
    std::vector<Mono> out = compute(nd);
    return memo_.emplace(nd, std::move(out)).first->second;
  }

  bool truncated = false;

 private:
  std::vector<Mono> atom(const SymbolNode* nd) {
    Mono m;
    if (nd->commutative)
      m.comm.push_back(nd);
    else
      m.nc.push_back(nd);
    return {m};
  }

  std::vector<Mono> compute(const SymbolNode* nd) {
    switch (nd->kind) {
      case NodeKind::kScalar: {
        if (nd->commutative) {
          Mono m;
          m.coef = nd->scalar.is_zero() ? cplx(0.0) : nd->scalar.scalar_value();
          if (m.coef == cplx(0.0)) return {};
          return {m};
        }
        return atom(nd);
      }
      case NodeKind::kXiMonomial: {
        Mono m;
        m.xi = nd->gamma;
        return {m};
      }
      case NodeKind::kLambda: {
        Mono m;
        m.lam = 1;
        return {m};
      }
      case NodeKind::kSum: {
        std::vector<Mono> out;
        for (const auto& c : nd->children) {
          const auto& e = expand(c.get());
          out.insert(out.end(), e.begin(), e.end());
          if (out.size() > cap_) {
            truncated = true;
            return out;
          }
        }
        return out;
      }
      case NodeKind::kProduct: {
        std::vector<const SymbolNode*> comm, nc;
        for (const auto& c : nd->children) (c->commutative ? comm : nc).push_back(c.get());
        cancel_commutative(comm);
        std::vector<const SymbolNode*> seq;
        append_nc(seq, nc);
        std::vector<Mono> acc{Mono{}};
        auto multiply = [&](const SymbolNode* f) {
          const auto& e = expand(f);
          std::vector<Mono> next;
          next.reserve(acc.size() * e.size());
          for (const auto& a : acc)
            for (const auto& b : e) {
              Mono m = a;
              m.coef *= b.coef;
              m.xi = m.xi + b.xi;
              m.lam += b.lam;
              m.comm.insert(m.comm.end(), b.comm.begin(), b.comm.end());
              append_nc(m.nc, b.nc);
              next.push_back(std::move(m));
              if (next.size() > cap_) {
                truncated = true;
                return;
              }
            }
          acc = std::move(next);
        };
        for (const auto* f : comm) {
          multiply(f);
          if (truncated) return acc;
        }
        for (const auto* f : seq) {
          multiply(f);
          if (truncated) return acc;
        }
        for (auto& m : acc) cancel_commutative(m.comm);
        return acc;
      }
      case NodeKind::kInverse:
      case NodeKind::kScalarPower:
      case NodeKind::kLogNorm:
      case NodeKind::kContour:
        return atom(nd);
    }
    return {};
  }

  std::size_t cap_;
  std::unordered_map<const SymbolNode*, std::vector<Mono>> memo_;
};

std::vector<std::uint64_t> key_of(const Mono& m) {
  std::vector<std::uint64_t> k;
  for (int x : m.xi) k.push_back(static_cast<std::uint64_t>(x));
  k.push_back(static_cast<std::uint64_t>(m.lam));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cs;
  for (const auto* c : m.comm) cs.emplace_back(c->hash.a, c->hash.b);
  std::sort(cs.begin(), cs.end());
  k.push_back(cs.size());
  for (auto [a, b] : cs) {
    k.push_back(a);
    k.push_back(b);
  }
  k.push_back(m.nc.size());
  for (const auto* c : m.nc) {
    k.push_back(c->hash.a);
    k.push_back(c->hash.b);
  }
  return k;
}

}  // namespace

NormalFormResult normal_form(const Expr& e, std::size_t cap, double tol) {
  Expander ex(cap);
  const auto& monos = ex.expand(e.get());
  NormalFormResult r;
  r.truncated = ex.truncated;
  double scale = 0.0;
  std::map<std::vector<std::uint64_t>, cplx> merged;
  for (const auto& m : monos) {
    scale = std::max(scale, std::abs(m.coef));
    merged[key_of(m)] += m.coef;
  }
  for (const auto& [k, c] : merged) {
    if (std::abs(c) <= tol * std::max(scale, 1.0)) continue;
    ++r.monomials;
    r.max_coefficient = std::max(r.max_coefficient, std::abs(c));
  }
  return r;
}

bool symbolically_zero(const Expr& e, double tol, std::size_t cap) {
  if (e->zero) return true;
  auto r = normal_form(e, cap, tol);
  return !r.truncated && r.monomials == 0;
}

}  // namespace ncres
