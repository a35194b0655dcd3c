#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ncres/theta.hpp"

namespace ncres {

// Truncated element sum_k a_k U_k of the smooth noncommutative torus.
// Coefficients are kept sorted by lattice index and contain no explicit zeros.
class NCElement {
 public:
  using Term = std::pair<Index, cplx>;

  NCElement() = default;
  explicit NCElement(const ThetaMatrix& theta) : theta_(theta) {}
  // Unsorted input is fine, duplicates are summed, exact zeros dropped.
  NCElement(const ThetaMatrix& theta, std::vector<Term> terms);

  static NCElement scalar(const ThetaMatrix& theta, cplx c);
  static NCElement unit(const ThetaMatrix& theta) { return scalar(theta, 1.0); }
  static NCElement monomial(const ThetaMatrix& theta, const Index& k, cplx c = 1.0);

  const ThetaMatrix& theta() const { return theta_; }
  int dim() const { return theta_.dim(); }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  cplx coeff(const Index& k) const;
  // max |k|_inf over the nonzero coefficients
  int support_radius() const;
  // only the zero mode is present (or nothing)
  bool is_scalar() const;
  cplx scalar_part() const { return coeff(Index{}); }

  double norm1() const;
  double norm2() const;
  double norm_max() const;

  bool operator==(const NCElement& o) const { return theta_ == o.theta_ && terms_ == o.terms_; }

 private:
  ThetaMatrix theta_;
  std::vector<Term> terms_;
};

// Declared support box plus tiny-coefficient pruning. Coefficients outside the box
// are dropped and their l1 mass reported.
struct Truncation {
  int radius = 8;
  double drop_tol = 0.0;
};

struct Truncated {
  NCElement value;
  double dropped = 0.0;
};

Truncated truncate(const NCElement& a, const Truncation& t);

NCElement add(const NCElement& a, const NCElement& b);
NCElement sub(const NCElement& a, const NCElement& b);
NCElement scale(const NCElement& a, cplx c);
// (ab)_m = sum_{k+l=m} a_k b_l exp(-i pi <k, theta l>)
NCElement mul(const NCElement& a, const NCElement& b);
cplx trace_tau(const NCElement& a);
// delta_j, j zero-based
NCElement derive(const NCElement& a, int j);
NCElement star(const NCElement& a);

bool is_self_adjoint(const NCElement& a, double tol = 0.0);
double distance(const NCElement& a, const NCElement& b);

// Lattice points with |k_i| <= radius in the active directions and 0 elsewhere.
std::vector<Index> box_basis(int n, int radius, const std::vector<bool>& active);
std::vector<bool> active_directions(const NCElement& a);
std::vector<bool> merge_active(const std::vector<bool>& a, const std::vector<bool>& b);

// Matrix of left multiplication on the given basis.
Eigen::MatrixXcd left_matrix(const NCElement& a, const std::vector<Index>& basis);
Eigen::MatrixXcd right_matrix(const NCElement& b, const std::vector<Index>& basis);

struct InvertOptions {
  int target_support = 0;  // 0: use twice the operand support
  int basis_radius = 0;    // 0: max(target, 2 * support)
  double tol = 1e-10;
};

NCElement invert(const NCElement& a, const InvertOptions& opt = {});

struct ExpOptions {
  int target_support = 12;
  double tol = 1e-12;
};

NCElement exp_element(const NCElement& a, const ExpOptions& opt = {});

// (x - lambda)^{-1} for many lambda from one eigendecomposition of the truncated L_x.
class ResolventSolver {
 public:
  ResolventSolver(const NCElement& x, int basis_radius, double drop_tol);
  NCElement resolve(cplx lambda) const;
  // smallest |eigenvalue - lambda| over the truncated spectrum
  double distance_to_spectrum(cplx lambda) const;
  const Eigen::VectorXcd& eigenvalues() const { return evals_; }

 private:
  ThetaMatrix theta_;
  std::vector<Index> basis_;
  Eigen::VectorXcd evals_;
  Eigen::MatrixXcd vecs_;
  Eigen::VectorXcd w_;  // vecs^{-1} e_0
  double drop_tol_;
  bool scalar_ = false;
  cplx scalar_value_;
};

}  // namespace ncres
