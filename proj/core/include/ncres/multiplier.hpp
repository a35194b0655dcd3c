#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ncres/nc_element.hpp"

namespace ncres {

// sum_i L_{a_i} R_{b_i}, acting by x -> sum_i a_i x b_i.
class MultiplierCoefficient {
 public:
  struct Term {
    NCElement left;
    NCElement right;
  };

  MultiplierCoefficient() = default;
  explicit MultiplierCoefficient(const ThetaMatrix& theta) : theta_(theta) {}
  MultiplierCoefficient(const ThetaMatrix& theta, std::vector<Term> terms);

  static MultiplierCoefficient scalar(const ThetaMatrix& theta, cplx c);
  static MultiplierCoefficient left(const NCElement& a);
  static MultiplierCoefficient right(const NCElement& b);
  static MultiplierCoefficient pair(const NCElement& a, const NCElement& b);

  const ThetaMatrix& theta() const { return theta_; }
  int dim() const { return theta_.dim(); }
  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  // c * identity
  bool is_scalar() const;
  cplx scalar_value() const;
  int support_radius() const;
  double norm1() const;

  // Canonical form: pure-left and pure-right parts merged, right factors folded
  // into the left at theta = 0. Idempotent.
  MultiplierCoefficient normalized() const;

  bool operator==(const MultiplierCoefficient& o) const;

 private:
  ThetaMatrix theta_;
  std::vector<Term> terms_;
};

MultiplierCoefficient add(const MultiplierCoefficient& a, const MultiplierCoefficient& b);
MultiplierCoefficient scale(const MultiplierCoefficient& a, cplx c);
// (L_a R_b)(L_c R_d) = L_{ac} R_{db}
MultiplierCoefficient mul(const MultiplierCoefficient& x, const MultiplierCoefficient& y);
MultiplierCoefficient derive(const MultiplierCoefficient& m, int j);
MultiplierCoefficient truncate(const MultiplierCoefficient& m, const Truncation& t, double* dropped = nullptr);
// m = L_y (second = false) or R_y (second = true); a scalar part folds into either side.
std::optional<std::pair<NCElement, bool>> one_sided(const MultiplierCoefficient& m);

// Only single factorizable terms L_a R_b are invertible here.
MultiplierCoefficient inverse(const MultiplierCoefficient& m, const InvertOptions& opt = {});

NCElement apply(const MultiplierCoefficient& m, const NCElement& x);

// Averaged diagonal trace: tr(L_a R_b) = sum over k with theta k in Z^n of a_k b_{-k}.
// Gives tau(ab) at theta = 0 and tau(a) tau(b) for irrational theta.
cplx trace(const MultiplierCoefficient& m);

// Exact diagonal matrix element <m U_k, U_k>.
cplx diagonal_element(const MultiplierCoefficient& m, const Index& k);

Eigen::MatrixXcd multiplier_matrix(const MultiplierCoefficient& m, const std::vector<Index>& basis);

// Comparison through the action on probe vectors; robust to different term groupings.
double action_distance(const MultiplierCoefficient& a, const MultiplierCoefficient& b,
                       const std::vector<NCElement>& probes);

}  // namespace ncres
