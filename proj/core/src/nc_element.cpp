#include "ncres/nc_element.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncres/error.hpp"

namespace ncres {

namespace {

void check_same(const NCElement& a, const NCElement& b) {
  if (a.theta() != b.theta()) throw InvalidInput("elements live on different tori (theta or dimension mismatch)");
}

// Positions inside a box basis, computed arithmetically.
struct BoxIndexer {
  int n;
  std::array<int, kMaxDim> lo{}, ext{}, stride{};
  int size = 1;

  BoxIndexer(int n_, const std::array<int, kMaxDim>& lo_, const std::array<int, kMaxDim>& hi) : n(n_) {
    for (int i = 0; i < n; ++i) {
      lo[i] = lo_[i];
      ext[i] = hi[i] - lo_[i] + 1;
    }
    for (int i = n - 1; i >= 0; --i) {
      stride[i] = size;
      size *= ext[i];
    }
  }
  int pos(const Index& k) const {
    int p = 0;
    for (int i = 0; i < n; ++i) {
      int d = k[i] - lo[i];
      if (d < 0 || d >= ext[i]) return -1;
      p += d * stride[i];
    }
    return p;
  }
  Index at(int p) const {
    Index k{};
    for (int i = 0; i < n; ++i) {
      k[i] = lo[i] + p / stride[i];
      p %= stride[i];
    }
    return k;
  }
};

void bounds(const NCElement& a, std::array<int, kMaxDim>& lo, std::array<int, kMaxDim>& hi) {
  lo.fill(0);
  hi.fill(0);
  bool first = true;
  for (const auto& [k, c] : a.terms()) {
    for (int i = 0; i < a.dim(); ++i) {
      if (first || k[i] < lo[i]) lo[i] = k[i];
      if (first || k[i] > hi[i]) hi[i] = k[i];
    }
    first = false;
  }
}

inline cplx phase(double x) {
  // exp(-i pi x)
  return {std::cos(std::numbers::pi * x), -std::sin(std::numbers::pi * x)};
}

}  // namespace

NCElement::NCElement(const ThetaMatrix& theta, std::vector<Term> terms) : theta_(theta), terms_(std::move(terms)) {
  auto less = [](const Term& x, const Term& y) { return x.first < y.first; };
  if (!std::is_sorted(terms_.begin(), terms_.end(), less)) std::sort(terms_.begin(), terms_.end(), less);
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    for (int i = theta_.dim(); i < kMaxDim; ++i)
      if (t.first[i] != 0) throw InvalidInput("lattice index has more components than the torus dimension");
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  terms_.clear();
  for (auto& t : merged)
    if (t.second != cplx(0.0)) terms_.push_back(t);
}

NCElement NCElement::scalar(const ThetaMatrix& theta, cplx c) { return NCElement(theta, {{Index{}, c}}); }

NCElement NCElement::monomial(const ThetaMatrix& theta, const Index& k, cplx c) { return NCElement(theta, {{k, c}}); }

cplx NCElement::coeff(const Index& k) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), k, [](const Term& t, const Index& x) { return t.first < x; });
  if (it != terms_.end() && it->first == k) return it->second;
  return 0.0;
}

int NCElement::support_radius() const {
  int r = 0;
  for (const auto& t : terms_) r = std::max(r, linf(t.first));
  return r;
}

bool NCElement::is_scalar() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Index{}); }

double NCElement::norm1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.second);
  return s;
}

double NCElement::norm2() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::norm(t.second);
  return std::sqrt(s);
}

double NCElement::norm_max() const {
  double s = 0.0;
  for (const auto& t : terms_) s = std::max(s, std::abs(t.second));
  return s;
}

Truncated truncate(const NCElement& a, const Truncation& t) {
  Truncated r;
  std::vector<NCElement::Term> kept;
  kept.reserve(a.size());
  double cut = t.drop_tol;
  for (const auto& term : a.terms()) {
    if (linf(term.first) > t.radius || std::abs(term.second) <= cut) {
      r.dropped += std::abs(term.second);
      continue;
    }
    kept.push_back(term);
  }
  r.value = NCElement(a.theta(), std::move(kept));
  return r;
}

NCElement add(const NCElement& a, const NCElement& b) {
  check_same(a, b);
  std::vector<NCElement::Term> t(a.terms());
  t.insert(t.end(), b.terms().begin(), b.terms().end());
  return NCElement(a.theta(), std::move(t));
}

NCElement sub(const NCElement& a, const NCElement& b) { return add(a, scale(b, -1.0)); }

NCElement scale(const NCElement& a, cplx c) {
  if (c == cplx(0.0)) return NCElement(a.theta());
  std::vector<NCElement::Term> t(a.terms());
  for (auto& x : t) x.second *= c;
  return NCElement(a.theta(), std::move(t));
}

NCElement mul(const NCElement& a, const NCElement& b) {
  check_same(a, b);
  if (a.empty() || b.empty()) return NCElement(a.theta());
  const int n = a.dim();
  std::array<int, kMaxDim> alo, ahi, blo, bhi, lo{}, hi{};
  bounds(a, alo, ahi);
  bounds(b, blo, bhi);
  for (int i = 0; i < n; ++i) {
    lo[i] = alo[i] + blo[i];
    hi[i] = ahi[i] + bhi[i];
  }
  BoxIndexer box(n, lo, hi);
  std::vector<cplx> acc(box.size, 0.0);
  const ThetaMatrix& th = a.theta();
  // box positions are linear in the index, so pos(k + l) = pa[k] + pb[l]
  const std::size_t na = a.size(), nb = b.size();
  std::vector<int> pa(na), pb(nb);
  for (std::size_t i = 0; i < na; ++i) {
    int p = 0;
    for (int r = 0; r < n; ++r) p += (a.terms()[i].first[r] - alo[r]) * box.stride[r];
    pa[i] = p;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    int p = 0;
    for (int r = 0; r < n; ++r) p += (b.terms()[j].first[r] - blo[r]) * box.stride[r];
    pb[j] = p;
  }
  if (th.is_zero()) {
    for (std::size_t i = 0; i < na; ++i) {
      const cplx ak = a.terms()[i].second;
      cplx* base = acc.data() + pa[i];
      for (std::size_t j = 0; j < nb; ++j) base[pb[j]] += ak * b.terms()[j].second;
    }
  } else {
    // exp(-i pi <k, theta l>) = prod_r exp(-i pi (theta l)_r)^{k_r}: tabulate the powers
    // over the k range of a once per right term
    std::array<int, kMaxDim> width{}, offset{};
    int stride = 0;
    for (int r = 0; r < n; ++r) {
      width[r] = ahi[r] - alo[r] + 1;
      offset[r] = stride;
      stride += width[r];
    }
    std::vector<cplx> table(nb * stride);
    for (std::size_t j = 0; j < nb; ++j) {
      const Index& l = b.terms()[j].first;
      cplx* row = &table[j * stride];
      for (int r = 0; r < n; ++r) {
        double v = 0.0;
        for (int c = 0; c < n; ++c) v += th(r, c) * l[c];
        for (int m = 0; m < width[r]; ++m) row[m] = phase(v * (alo[r] + m));
        row += width[r];
      }
    }
    // column of each a term inside a table row, per coordinate
    std::vector<int> col(na * n);
    for (std::size_t i = 0; i < na; ++i)
      for (int r = 0; r < n; ++r) col[i * n + r] = offset[r] + a.terms()[i].first[r] - alo[r];
    for (std::size_t i = 0; i < na; ++i) {
      const cplx ak = a.terms()[i].second;
      const int* ci = &col[i * n];
      cplx* base = acc.data() + pa[i];
      for (std::size_t j = 0; j < nb; ++j) {
        const cplx* row = &table[j * stride];
        cplx ph = ak * b.terms()[j].second;
        for (int r = 0; r < n; ++r) ph *= row[ci[r]];
        base[pb[j]] += ph;
      }
    }
  }
  std::vector<NCElement::Term> out;
  for (int p = 0; p < box.size; ++p)
    if (acc[p] != cplx(0.0)) out.emplace_back(box.at(p), acc[p]);
  return NCElement(th, std::move(out));
}

cplx trace_tau(const NCElement& a) { return a.coeff(Index{}); }

NCElement derive(const NCElement& a, int j) {
  if (j < 0 || j >= a.dim()) throw InvalidInput("derivation direction out of range");
  std::vector<NCElement::Term> t;
  t.reserve(a.size());
  for (const auto& [k, c] : a.terms())
    if (k[j] != 0) t.emplace_back(k, c * static_cast<double>(k[j]));
  return NCElement(a.theta(), std::move(t));
}

NCElement star(const NCElement& a) {
  std::vector<NCElement::Term> t;
  t.reserve(a.size());
  for (const auto& [k, c] : a.terms()) t.emplace_back(-k, std::conj(c));
  return NCElement(a.theta(), std::move(t));
}

bool is_self_adjoint(const NCElement& a, double tol) { return distance(a, star(a)) <= tol; }

double distance(const NCElement& a, const NCElement& b) { return sub(a, b).norm2(); }

std::vector<bool> active_directions(const NCElement& a) {
  std::vector<bool> act(a.dim(), false);
  for (const auto& t : a.terms())
    for (int i = 0; i < a.dim(); ++i)
      if (t.first[i] != 0) act[i] = true;
  return act;
}

std::vector<bool> merge_active(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::vector<bool> r(std::max(a.size(), b.size()), false);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (i < a.size() && a[i]) || (i < b.size() && b[i]);
  return r;
}

std::vector<Index> box_basis(int n, int radius, const std::vector<bool>& active) {
  std::array<int, kMaxDim> lo{}, hi{};
  for (int i = 0; i < n; ++i) {
    bool on = i < static_cast<int>(active.size()) ? active[i] : true;
    lo[i] = on ? -radius : 0;
    hi[i] = on ? radius : 0;
  }
  BoxIndexer box(n, lo, hi);
  std::vector<Index> out(box.size);
  for (int p = 0; p < box.size; ++p) out[p] = box.at(p);
  return out;
}

namespace {

Eigen::MatrixXcd multiplier_matrix(const NCElement& a, const std::vector<Index>& basis, bool left) {
  const int dim = static_cast<int>(basis.size());
  const int n = a.dim();
  std::array<int, kMaxDim> lo{}, hi{};
  for (int i = 0; i < n; ++i) {
    lo[i] = hi[i] = basis.empty() ? 0 : basis[0][i];
    for (const auto& b : basis) {
      lo[i] = std::min(lo[i], b[i]);
      hi[i] = std::max(hi[i], b[i]);
    }
  }
  BoxIndexer box(n, lo, hi);
  std::vector<int> where(box.size, -1);
  for (int j = 0; j < dim; ++j) where[box.pos(basis[j])] = j;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const ThetaMatrix& th = a.theta();
  for (int j = 0; j < dim; ++j) {
    const Index& mj = basis[j];
    for (const auto& [k, c] : a.terms()) {
      int p = box.pos(mj + k);
      if (p < 0 || where[p] < 0) continue;
      double x = left ? th.pairing(k, mj) : th.pairing(mj, k);
      m(where[p], j) += c * phase(x);
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXcd left_matrix(const NCElement& a, const std::vector<Index>& basis) {
  return multiplier_matrix(a, basis, true);
}

Eigen::MatrixXcd right_matrix(const NCElement& b, const std::vector<Index>& basis) {
  return multiplier_matrix(b, basis, false);
}

NCElement invert(const NCElement& a, const InvertOptions& opt) {
  if (a.is_scalar()) {
    cplx c = a.scalar_part();
    if (c == cplx(0.0)) throw SingularError("inverse of zero", 0.0);
    return NCElement::scalar(a.theta(), 1.0 / c);
  }
  // c U_k: the truncated shift is singular on any box, but U_k U_{-k} = 1 exactly
  if (a.size() == 1) {
    const auto& [k, c] = a.terms()[0];
    return NCElement::monomial(a.theta(), -k, 1.0 / c);
  }
  const int supp = a.support_radius();
  const int target = opt.target_support > 0 ? opt.target_support : 2 * supp;
  const int rb = opt.basis_radius > 0 ? opt.basis_radius : std::max(target, 2 * supp);
  // Newton iteration x <- x + x (1 - a x) in the algebra from x = 1/a_0; converges
  // when the spectrum of a / a_0 stays in the unit disc around 1, else dense solve
  const cplx c = a.scalar_part();
  if (std::abs(c) > 0.0) {
    const Truncation box{rb, 0.0};
    const NCElement one = NCElement::unit(a.theta());
    NCElement x = NCElement::scalar(a.theta(), 1.0 / c);
    for (int it = 0; it < 60; ++it) {
      NCElement r = sub(one, truncate(mul(a, x), box).value);
      if (r.norm2() <= 0.1 * opt.tol) {
        std::vector<NCElement::Term> t;
        for (const auto& [k, v] : x.terms())
          if (linf(k) <= target) t.emplace_back(k, v);
        return NCElement(a.theta(), std::move(t));
      }
      if (!(r.norm2() < 1e3)) break;
      x = add(x, truncate(mul(x, r), box).value);
    }
  }
  auto basis = box_basis(a.dim(), rb, active_directions(a));
  Eigen::MatrixXcd m = left_matrix(a, basis);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  double anorm = m.cwiseAbs().colwise().sum().maxCoeff();
  double rc = lu.rcond();
  if (!(rc > 1e-15)) throw SingularError("left multiplication matrix", rc * anorm);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(basis.size());
  int zero_pos = 0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == Index{}) zero_pos = static_cast<int>(i);
  e0(zero_pos) = 1.0;
  Eigen::VectorXcd x = lu.solve(e0);
  double res = (m * x - e0).norm();
  if (res > opt.tol) throw SingularError("inverse residual " + std::to_string(res) + " above tolerance", rc * anorm);
  std::vector<NCElement::Term> t;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (linf(basis[i]) <= target) t.emplace_back(basis[i], x(i));
  return NCElement(a.theta(), std::move(t));
}

NCElement exp_element(const NCElement& a, const ExpOptions& opt) {
  const ThetaMatrix& th = a.theta();
  double nrm = a.norm1();
  // coefficients this small never matter against tol, and they make products slow
  Truncation tr{opt.target_support, 1e-4 * opt.tol * std::exp(nrm)};
  int s = 0;
  while (nrm / std::ldexp(1.0, s) > 0.5) ++s;
  NCElement x = scale(a, std::ldexp(1.0, -s));
  NCElement sum = NCElement::unit(th);
  NCElement term = NCElement::unit(th);
  double dropped = 0.0;
  int k = 1;
  for (; k < 80; ++k) {
    auto t = truncate(scale(mul(term, x), 1.0 / k), tr);
    dropped += t.dropped;
    term = std::move(t.value);
    sum = add(sum, term);
    if (term.norm1() <= 1e-17 * sum.norm1()) break;
  }
  if (k >= 80) throw ConvergenceError("exponential series", term.norm1());
  for (int i = 0; i < s; ++i) {
    auto t = truncate(mul(sum, sum), tr);
    dropped += t.dropped;
    sum = std::move(t.value);
  }
  if (dropped > opt.tol * std::max(1.0, sum.norm1()))
    throw TruncationError("exponential exceeds target support " + std::to_string(opt.target_support), dropped);
  return sum;
}

ResolventSolver::ResolventSolver(const NCElement& x, int basis_radius, double drop_tol)
    : theta_(x.theta()), drop_tol_(drop_tol) {
  if (x.is_scalar()) {
    scalar_ = true;
    scalar_value_ = x.scalar_part();
    return;
  }
  basis_ = box_basis(x.dim(), basis_radius, active_directions(x));
  Eigen::MatrixXcd m = left_matrix(x, basis_);
  const int dim = static_cast<int>(basis_.size());
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(dim);
  for (int i = 0; i < dim; ++i)
    if (basis_[i] == Index{}) e0(i) = 1.0;
  double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm <= 1e-13 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    evals_ = es.eigenvalues().cast<cplx>();
    vecs_ = es.eigenvectors();
    w_ = vecs_.adjoint() * e0;
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    evals_ = es.eigenvalues();
    vecs_ = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(vecs_);
    if (!(lu.rcond() > 1e-12)) throw SingularError("eigenvector basis of resolvent operand", lu.rcond());
    w_ = lu.solve(e0);
  }
}

NCElement ResolventSolver::resolve(cplx lambda) const {
  if (scalar_) {
    if (scalar_value_ == lambda) throw SingularError("resolvent at a spectral point", 0.0);
    return NCElement::scalar(theta_, 1.0 / (scalar_value_ - lambda));
  }
  Eigen::VectorXcd d = w_.array() / (evals_.array() - lambda);
  Eigen::VectorXcd y = vecs_ * d;
  std::vector<NCElement::Term> t;
  t.reserve(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (std::abs(y(i)) > drop_tol_) t.emplace_back(basis_[i], y(i));
  return NCElement(theta_, std::move(t));
}

double ResolventSolver::distance_to_spectrum(cplx lambda) const {
  if (scalar_) return std::abs(scalar_value_ - lambda);
  return (evals_.array() - lambda).abs().minCoeff();
}

}  // namespace ncres
