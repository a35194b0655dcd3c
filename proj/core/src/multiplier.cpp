#include "ncres/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "ncres/error.hpp"

namespace ncres {

MultiplierCoefficient::MultiplierCoefficient(const ThetaMatrix& theta, std::vector<Term> terms)
    : theta_(theta), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.left.theta() != theta_ || t.right.theta() != theta_)
      throw InvalidInput("multiplier factors live on a different torus");
  std::erase_if(terms_, [](const Term& t) { return t.left.empty() || t.right.empty(); });
}

MultiplierCoefficient MultiplierCoefficient::scalar(const ThetaMatrix& theta, cplx c) {
  if (c == cplx(0.0)) return MultiplierCoefficient(theta);
  return MultiplierCoefficient(theta, {{NCElement::scalar(theta, c), NCElement::unit(theta)}});
}

MultiplierCoefficient MultiplierCoefficient::left(const NCElement& a) {
  return MultiplierCoefficient(a.theta(), {{a, NCElement::unit(a.theta())}});
}

MultiplierCoefficient MultiplierCoefficient::right(const NCElement& b) {
  return MultiplierCoefficient(b.theta(), {{NCElement::unit(b.theta()), b}});
}

MultiplierCoefficient MultiplierCoefficient::pair(const NCElement& a, const NCElement& b) {
  return MultiplierCoefficient(a.theta(), {{a, b}});
}

bool MultiplierCoefficient::is_scalar() const {
  for (const auto& t : terms_)
    if (!t.left.is_scalar() || !t.right.is_scalar()) return false;
  return true;
}

cplx MultiplierCoefficient::scalar_value() const {
  cplx s = 0.0;
  for (const auto& t : terms_) s += t.left.scalar_part() * t.right.scalar_part();
  return s;
}

int MultiplierCoefficient::support_radius() const {
  int r = 0;
  for (const auto& t : terms_) r = std::max({r, t.left.support_radius(), t.right.support_radius()});
  return r;
}

double MultiplierCoefficient::norm1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.left.norm1() * t.right.norm1();
  return s;
}

MultiplierCoefficient MultiplierCoefficient::normalized() const {
  const NCElement one = NCElement::unit(theta_);
  NCElement lsum(theta_), rsum(theta_);
  std::vector<Term> mixed;
  for (const auto& t : terms_) {
    if (theta_.is_zero()) {
      lsum = add(lsum, t.right.is_scalar()  ? scale(t.left, t.right.scalar_part())
                       : t.left.is_scalar() ? scale(t.right, t.left.scalar_part())
                                            : mul(t.left, t.right));
    } else if (t.right.is_scalar()) {
      lsum = add(lsum, scale(t.left, t.right.scalar_part()));
    } else if (t.left.is_scalar()) {
      rsum = add(rsum, scale(t.right, t.left.scalar_part()));
    } else {
      mixed.push_back(t);
    }
  }
  // a pure scalar on the right side belongs to the left group
  if (!rsum.empty() && rsum.coeff(Index{}) != cplx(0.0)) {
    cplx c = rsum.coeff(Index{});
    lsum = add(lsum, NCElement::scalar(theta_, c));
    rsum = sub(rsum, NCElement::scalar(theta_, c));
  }
  std::vector<Term> out;
  if (!lsum.empty()) out.push_back({lsum, one});
  if (!rsum.empty()) out.push_back({one, rsum});
  for (auto& t : mixed) out.push_back(std::move(t));
  return MultiplierCoefficient(theta_, std::move(out));
}

bool MultiplierCoefficient::operator==(const MultiplierCoefficient& o) const {
  if (theta_ != o.theta_ || terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (!(terms_[i].left == o.terms_[i].left) || !(terms_[i].right == o.terms_[i].right)) return false;
  return true;
}

MultiplierCoefficient add(const MultiplierCoefficient& a, const MultiplierCoefficient& b) {
  if (a.theta() != b.theta()) throw InvalidInput("multiplier theta mismatch");
  std::vector<MultiplierCoefficient::Term> t(a.terms());
  t.insert(t.end(), b.terms().begin(), b.terms().end());
  return MultiplierCoefficient(a.theta(), std::move(t)).normalized();
}

MultiplierCoefficient scale(const MultiplierCoefficient& a, cplx c) {
  if (c == cplx(0.0)) return MultiplierCoefficient(a.theta());
  std::vector<MultiplierCoefficient::Term> t(a.terms());
  for (auto& x : t) x.left = scale(x.left, c);
  return MultiplierCoefficient(a.theta(), std::move(t));
}

MultiplierCoefficient mul(const MultiplierCoefficient& x, const MultiplierCoefficient& y) {
  if (x.theta() != y.theta()) throw InvalidInput("multiplier theta mismatch");
  if (x.is_zero() || y.is_zero()) return MultiplierCoefficient(x.theta());
  if (x.is_scalar()) return scale(y, x.scalar_value());
  if (y.is_scalar()) return scale(x, y.scalar_value());
  std::vector<MultiplierCoefficient::Term> t;
  t.reserve(x.terms().size() * y.terms().size());
  for (const auto& p : x.terms())
    for (const auto& q : y.terms()) {
      NCElement l = p.left.is_scalar() ? scale(q.left, p.left.scalar_part())
                                       : (q.left.is_scalar() ? scale(p.left, q.left.scalar_part()) : mul(p.left, q.left));
      NCElement r = q.right.is_scalar()
                        ? scale(p.right, q.right.scalar_part())
                        : (p.right.is_scalar() ? scale(q.right, p.right.scalar_part()) : mul(q.right, p.right));
      t.push_back({std::move(l), std::move(r)});
    }
  return MultiplierCoefficient(x.theta(), std::move(t)).normalized();
}

MultiplierCoefficient derive(const MultiplierCoefficient& m, int j) {
  std::vector<MultiplierCoefficient::Term> t;
  for (const auto& p : m.terms()) {
    NCElement dl = derive(p.left, j);
    NCElement dr = derive(p.right, j);
    if (!dl.empty()) t.push_back({dl, p.right});
    if (!dr.empty()) t.push_back({p.left, dr});
  }
  return MultiplierCoefficient(m.theta(), std::move(t)).normalized();
}

MultiplierCoefficient truncate(const MultiplierCoefficient& m, const Truncation& tr, double* dropped) {
  std::vector<MultiplierCoefficient::Term> t;
  t.reserve(m.terms().size());
  double d = 0.0;
  for (const auto& p : m.terms()) {
    auto l = truncate(p.left, tr);
    auto r = truncate(p.right, tr);
    d += l.dropped * p.right.norm1() + r.dropped * p.left.norm1();
    t.push_back({std::move(l.value), std::move(r.value)});
  }
  if (dropped) *dropped += d;
  return MultiplierCoefficient(m.theta(), std::move(t));
}

std::optional<std::pair<NCElement, bool>> one_sided(const MultiplierCoefficient& m) {
  auto nm = m.normalized();
  const auto& t = nm.terms();
  if (t.size() == 1) {
    if (t[0].right.is_scalar()) return std::make_pair(scale(t[0].left, t[0].right.scalar_part()), false);
    if (t[0].left.is_scalar()) return std::make_pair(scale(t[0].right, t[0].left.scalar_part()), true);
  }
  if (t.size() == 2 && t[0].right.is_scalar() && t[0].left.is_scalar() && t[1].left.is_scalar())
    return std::make_pair(add(scale(t[1].right, t[1].left.scalar_part()),
                              NCElement::scalar(m.theta(), t[0].left.scalar_part() * t[0].right.scalar_part())),
                          true);
  return std::nullopt;
}

MultiplierCoefficient inverse(const MultiplierCoefficient& m, const InvertOptions& opt) {
  auto nm = m.normalized();
  if (nm.is_zero()) throw SingularError("inverse of the zero multiplier", 0.0);
  if (nm.terms().size() == 2) {
    if (auto os = one_sided(nm))
      return os->second ? MultiplierCoefficient::right(invert(os->first, opt))
                        : MultiplierCoefficient::left(invert(os->first, opt));
  }
  if (nm.terms().size() != 1)
    throw InvalidInput("inverse of a multiplier that is not a single product L_a R_b (" +
                       std::to_string(nm.terms().size()) + " terms)");
  const auto& t = nm.terms()[0];
  return MultiplierCoefficient::pair(invert(t.left, opt), invert(t.right, opt));
}

NCElement apply(const MultiplierCoefficient& m, const NCElement& x) {
  NCElement out(m.theta());
  for (const auto& t : m.terms()) out = add(out, mul(mul(t.left, x), t.right));
  return out;
}

cplx trace(const MultiplierCoefficient& m) {
  const ThetaMatrix& th = m.theta();
  cplx s = 0.0;
  for (const auto& t : m.terms()) {
    if (t.right.is_scalar()) {
      s += t.left.scalar_part() * t.right.scalar_part();
      continue;
    }
    for (const auto& [k, ak] : t.left.terms())
      if (th.kernel_lattice(k)) s += ak * t.right.coeff(-k);
  }
  return s;
}

cplx diagonal_element(const MultiplierCoefficient& m, const Index& k0) {
  const ThetaMatrix& th = m.theta();
  cplx s = 0.0;
  for (const auto& t : m.terms()) {
    for (const auto& [k, ak] : t.left.terms()) {
      cplx b = t.right.coeff(-k);
      if (b == cplx(0.0)) continue;
      double x = 2.0 * th.pairing(k, k0);
      s += ak * b * cplx(std::cos(std::numbers::pi * x), -std::sin(std::numbers::pi * x));
    }
  }
  return s;
}

Eigen::MatrixXcd multiplier_matrix(const MultiplierCoefficient& m, const std::vector<Index>& basis) {
  std::map<Index, int> where;
  for (std::size_t i = 0; i < basis.size(); ++i) where[basis[i]] = static_cast<int>(i);
  const int dim = static_cast<int>(basis.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    NCElement col = apply(m, NCElement::monomial(m.theta(), basis[j]));
    for (const auto& [k, c] : col.terms()) {
      auto it = where.find(k);
      if (it != where.end()) out(it->second, j) = c;
    }
  }
  return out;
}

double action_distance(const MultiplierCoefficient& a, const MultiplierCoefficient& b,
                       const std::vector<NCElement>& probes) {
  double d = 0.0;
  for (const auto& p : probes) d = std::max(d, distance(apply(a, p), apply(b, p)));
  return d;
}

}  // namespace ncres
