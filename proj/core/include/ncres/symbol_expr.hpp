#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ncres/contour.hpp"
#include "ncres/multiplier.hpp"

namespace ncres {

enum class NodeKind {
  kScalar,       // constant MultiplierCoefficient
  kXiMonomial,   // xi^gamma
  kLambda,       // resolvent parameter, homogeneity weight q
  kSum,
  kProduct,      // ordered
  kInverse,
  kScalarPower,  // (commutative child)^p, principal branch
  kLogNorm,      // q log|xi|
  kContour,      // -(1/2 pi i) \oint f(lambda) child(xi, lambda) d lambda, f = lambda^z (log lambda)^p
};

struct Hash128 {
  std::uint64_t a = 0, b = 0;
  bool operator==(const Hash128&) const = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const { return static_cast<std::size_t>(h.a ^ (h.b * 0x9e3779b97f4a7c15ULL)); }
};

class SymbolNode;
using Expr = std::shared_ptr<const SymbolNode>;

class SymbolNode {
 public:
  NodeKind kind;
  ThetaMatrix theta;
  MultiplierCoefficient scalar;  // kScalar
  Index gamma{};                 // kXiMonomial
  double weight = 0.0;           // kLambda: q, kLogNorm: factor q, kContour: q
  cplx exponent{};               // kScalarPower: p, kContour: z
  int log_power = 0;             // kContour
  cplx child_degree{};           // kContour
  std::shared_ptr<const Contour> contour;
  std::vector<Expr> children;
  Expr resolvent_base;  // kInverse of the form X - lambda with X lambda-free

  Hash128 hash;
  bool lambda_free = true;
  bool commutative = true;  // value is always a multiple of the identity
  bool zero = false;

  int dim() const { return theta.dim(); }
};

namespace sym {

Expr constant(const ThetaMatrix& th, cplx c);
inline Expr zero(const ThetaMatrix& th) { return constant(th, 0.0); }
inline Expr one(const ThetaMatrix& th) { return constant(th, 1.0); }
Expr scalar(const MultiplierCoefficient& m);
Expr left(const NCElement& a);
Expr right(const NCElement& b);
Expr xi(const ThetaMatrix& th, const Index& gamma);
Expr xi_coord(const ThetaMatrix& th, int i);
Expr norm_squared(const ThetaMatrix& th);
Expr lambda(const ThetaMatrix& th, double q);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr inverse(const Expr& e);
Expr scalar_power(const Expr& e, cplx p);
Expr log_norm(const ThetaMatrix& th, double q);
Expr contour_integral(const Expr& child, cplx z, int log_power, std::shared_ptr<const Contour> contour, double q,
                      cplx child_degree);

}  // namespace sym

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator*(cplx c, const Expr& a);

// d/d xi_i, i zero-based
Expr diff_xi(const Expr& e, int i);
Expr diff_xi(const Expr& e, const Index& gamma);
// delta_j acting on the coefficients
Expr diff_x(const Expr& e, int j);
Expr diff_x(const Expr& e, const Index& gamma);

// Homogeneity degree read off the tree (lambda at its weight); empty when the tree
// is not homogeneous or contains log terms. Zero trees report degree 0.
std::optional<cplx> infer_degree(const Expr& e);

std::size_t node_count(const Expr& e);

using Xi = std::array<double, kMaxDim>;

struct EvalOptions {
  Truncation truncation{10, 1e-16};
  int resolvent_radius = 0;  // basis radius for resolvent solves; 0 means truncation radius + 4
  InvertOptions invert;
  // fine/coarse discrepancy of a contour integral above this (relative) fails
  double contour_tol = 1e-6;
};

struct EvalStats {
  double dropped_mass = 0.0;
  double contour_error = 0.0;  // largest fine/coarse contour discrepancy seen
  long contour_integrals = 0;
  long resolvent_factorizations = 0;
};

// Evaluates expressions at (xi, lambda). Keeps per-point memo tables keyed by
// structural hash, so shared subtrees are computed once. Not thread safe; use one
// evaluator per worker.
class Evaluator {
 public:
  explicit Evaluator(EvalOptions opt = {});
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  MultiplierCoefficient evaluate(const Expr& e, const Xi& xi, std::optional<cplx> lambda = std::nullopt);
  const EvalStats& stats() const { return stats_; }
  const EvalOptions& options() const { return opt_; }

 private:
  struct SolverEntry;
  MultiplierCoefficient eval(const SymbolNode& node);
  MultiplierCoefficient eval_inverse(const SymbolNode& node);
  MultiplierCoefficient eval_contour(const SymbolNode& node);
  void set_point(const Xi& xi, std::optional<cplx> lambda);

  EvalOptions opt_;
  EvalStats stats_;
  Xi xi_{};
  bool has_xi_ = false;
  std::optional<cplx> lambda_;
  std::unordered_map<Hash128, MultiplierCoefficient, Hash128Hasher> memo_;     // cleared per (xi, lambda)
  std::unordered_map<Hash128, MultiplierCoefficient, Hash128Hasher> xi_memo_;  // lambda-free nodes, per xi
  std::unordered_map<Hash128, std::shared_ptr<SolverEntry>, Hash128Hasher> solvers_;
  std::unique_ptr<Evaluator> inner_;
};

// Polynomial-style normal form: products of sums are expanded into monomials over
// opaque atoms (inverses, contour integrals, powers, non-scalar coefficients);
// commuting factors are collected, adjacent E * E^{-1} pairs cancel, like
// monomials are merged.
struct NormalFormResult {
  std::size_t monomials = 0;      // surviving after merging
  double max_coefficient = 0.0;   // largest surviving |coefficient|
  bool truncated = false;         // hit the expansion cap
};

NormalFormResult normal_form(const Expr& e, std::size_t cap = 2000000, double tol = 1e-12);
bool symbolically_zero(const Expr& e, double tol = 1e-12, std::size_t cap = 2000000);

}  // namespace ncres
