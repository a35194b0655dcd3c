#include "ncres/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "ncres/error.hpp"
#include "ncres/lattice_sums.hpp"

namespace ncres {

int OperatorMatrix::position(const Index& k) const {
  const int n = theta.dim();
  int p = 0, stride = 1;
  for (int i = 0; i < n; ++i) {
    if (k[i] < -K || k[i] > K) return -1;
    p += (k[i] + K) * stride;
    stride *= 2 * K + 1;
  }
  return p;
}

namespace {

std::vector<Index> full_box(int n, int K) {
  // position order: first coordinate fastest
  std::vector<Index> out;
  int side = 2 * K + 1, total = 1;
  for (int i = 0; i < n; ++i) total *= side;
  out.reserve(total);
  for (int p = 0; p < total; ++p) {
    Index k{};
    int r = p;
    for (int i = 0; i < n; ++i) {
      k[i] = r % side - K;
      r /= side;
    }
    out.push_back(k);
  }
  return out;
}

template <class ColumnFn>
OperatorMatrix assemble(const ThetaMatrix& th, int K, ColumnFn column) {
  OperatorMatrix out;
  out.theta = th;
  out.K = K;
  out.basis = full_box(th.dim(), K);
  const int N = out.dim();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int c = 0; c < N; ++c) {
    NCElement y = column(out.basis[c]);
    for (const auto& [k, v] : y.terms()) {
      int r = out.position(k);
      if (r < 0) {
        out.leaked_mass += std::abs(v);
        continue;
      }
      trip.emplace_back(r, c, v);
      out.band = std::max(out.band, linf(k - out.basis[c]));
    }
  }
  out.M.resize(N, N);
  out.M.setFromTriplets(trip.begin(), trip.end());
  out.M.makeCompressed();
  Eigen::SparseMatrix<cplx> adj = out.M.adjoint();
  Eigen::SparseMatrix<cplx> diff = out.M - adj;
  double res = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(diff, k); it; ++it) res = std::max(res, std::abs(it.value()));
  out.hermitian_residual = res;
  out.hermitian = res <= 1e-10;
  return out;
}

}  // namespace

OperatorMatrix operator_matrix(const ClassicalSymbol& op, int K, const EvalOptions& opt) {
  if (K < 1) throw InvalidInput("truncation radius must be positive");
  Expr full;
  if (op.full) {
    full = op.full;
  } else {
    std::vector<Expr> t;
    for (const auto& c : op.components) t.push_back(c.expr);
    full = sym::sum(t);
  }
  const bool exact = op.is_differential();
  // coefficient support must fit in the box
  int support = 0;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e->kind == NodeKind::kScalar) support = std::max(support, e->scalar.support_radius());
    for (const auto& c : e->children) walk(c);
  };
  walk(full);
  if (support >= K) throw InvalidInput("box radius " + std::to_string(K) + " does not exceed the coefficient support " +
                                       std::to_string(support));
  Evaluator ev(opt);
  const int n = op.dim();
  auto out = assemble(op.theta, K, [&](const Index& m) {
    Xi xi{};
    bool origin = true;
    for (int i = 0; i < n; ++i) {
      xi[i] = m[i];
      origin = origin && m[i] == 0;
    }
    if (!exact && !op.full && origin) return NCElement(op.theta);
    return apply(ev.evaluate(full, xi), NCElement::monomial(op.theta, m));
  });
  out.exact = exact;
  return out;
}

OperatorMatrix multiplier_operator(const MultiplierCoefficient& m, int K) {
  auto out = assemble(m.theta(), K, [&](const Index& k) { return apply(m, NCElement::monomial(m.theta(), k)); });
  out.exact = true;
  return out;
}

OperatorMatrix left_operator(const NCElement& a, int K) { return multiplier_operator(MultiplierCoefficient::left(a), K); }

std::vector<int> interior_positions(const OperatorMatrix& M, int margin) {
  std::vector<int> out;
  for (int p = 0; p < M.dim(); ++p)
    if (linf(M.basis[p]) <= M.K - margin) out.push_back(p);
  return out;
}

double column_deviation(const Eigen::SparseMatrix<cplx>& A, const Eigen::SparseMatrix<cplx>& B,
                        const std::vector<int>& cols) {
  double d = 0.0;
  for (int c : cols) {
    Eigen::VectorXcd diff = Eigen::VectorXcd(A.col(c)) - Eigen::VectorXcd(B.col(c));
    if (diff.size()) d = std::max(d, diff.cwiseAbs().maxCoeff());
  }
  return d;
}

double Spectrum::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks)
    if (b.evals.size()) m = std::min(m, b.evals.minCoeff());
  return m;
}

std::vector<double> Spectrum::all_eigenvalues() const {
  std::vector<double> v;
  for (const auto& b : blocks)
    for (int i = 0; i < b.evals.size(); ++i) v.push_back(b.evals(i));
  std::sort(v.begin(), v.end());
  return v;
}

Spectrum hermitian_spectrum(const OperatorMatrix& op) {
  if (!op.hermitian)
    throw InvalidInput("spectrum oracle needs a Hermitian matrix (residual " + std::to_string(op.hermitian_residual) +
                       ")");
  const int N = op.dim();
  // union-find over the sparsity pattern
  std::vector<int> parent(N);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  double norm = 0.0;
  for (int k = 0; k < op.M.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(op.M, k); it; ++it) {
      norm = std::max(norm, std::abs(it.value()));
      if (it.value() == cplx(0.0)) continue;
      int a = find(static_cast<int>(it.row())), b = find(static_cast<int>(it.col()));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < N; ++i) groups[find(i)].push_back(i);
  Spectrum s;
  Eigen::MatrixXcd dense_all;
  for (auto& [root, pos] : groups) {
    const int b = static_cast<int>(pos.size());
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(b, b);
    std::unordered_map<int, int> local;
    for (int i = 0; i < b; ++i) local[pos[i]] = i;
    for (int i = 0; i < b; ++i)
      for (Eigen::SparseMatrix<cplx>::InnerIterator it(op.M, pos[i]); it; ++it)
        B(local.at(static_cast<int>(it.row())), i) = it.value();
    B = 0.5 * (B + B.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B);
    if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver", 0.0);
    SpectralBlock blk;
    blk.positions = std::move(pos);
    blk.evals = es.eigenvalues();
    blk.vecs = es.eigenvectors();
    double r = (B * blk.vecs - blk.vecs * blk.evals.asDiagonal()).colwise().norm().maxCoeff();
    s.max_residual = std::max(s.max_residual, r / std::max(norm, 1e-300));
    s.blocks.push_back(std::move(blk));
  }
  return s;
}

HeatOracle::HeatOracle(const OperatorMatrix& M, double c_min) : op_(&M), spec_(hermitian_spectrum(M)), c_min_(c_min) {
  if (!(c_min > 0.0)) throw InvalidInput("heat oracle needs a positive lower symbol bound");
}

HeatOracle::Weights HeatOracle::unit_weights() const {
  Weights w;
  for (const auto& b : spec_.blocks) w.push_back(Eigen::VectorXcd::Ones(b.evals.size()));
  return w;
}

HeatOracle::Weights HeatOracle::weights(const NCElement& a) const {
  Weights w;
  const ThetaMatrix& th = op_->theta;
  for (const auto& b : spec_.blocks) {
    const int n = static_cast<int>(b.positions.size());
    std::unordered_map<int, int> local;
    for (int i = 0; i < n; ++i) local[b.positions[i]] = i;
    Eigen::MatrixXcd La = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const Index& m = op_->basis[b.positions[i]];
      for (const auto& [k, c] : a.terms()) {
        int p = op_->position(k + m);
        auto it = local.find(p);
        if (p < 0 || it == local.end()) continue;
        La(it->second, i) += c * std::exp(cplx(0.0, -std::numbers::pi * th.pairing(k, m)));
      }
    }
    Eigen::MatrixXcd D = b.vecs.adjoint() * La * b.vecs;
    w.push_back(D.diagonal());
  }
  return w;
}

double HeatOracle::tail_bound(double t) const {
  const int n = op_->theta.dim();
  int inner = op_->K - op_->band;
  if (inner < 1) return std::numeric_limits<double>::infinity();
  return flat_heat_trace(n, t * c_min_, inner).tail;
}

HeatSample HeatOracle::trace(const Weights& w, double a_norm1, double t) const {
  if (!(t > 0.0)) throw InvalidInput("heat trace needs t > 0");
  HeatSample s;
  s.t = t;
  double unit = 0.0;
  for (std::size_t bi = 0; bi < spec_.blocks.size(); ++bi) {
    const auto& b = spec_.blocks[bi];
    for (int i = 0; i < b.evals.size(); ++i) {
      double e = std::exp(-t * b.evals(i));
      s.value += w[bi](i) * e;
      unit += e;
    }
  }
  s.tail = a_norm1 * tail_bound(t);
  s.trusted = s.tail <= 1e-8 * std::max(a_norm1, 1e-300) * unit;
  return s;
}

double HeatOracle::trusted_t_min(double t_hi) const {
  double lo = 1e-6, hi = t_hi;
  if (!trace(hi).trusted) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    double mid = std::sqrt(lo * hi);
    if (trace(mid).trusted)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

cplx FitResult::coefficient(double e) const {
  for (std::size_t i = 0; i < exponents.size(); ++i)
    if (std::abs(exponents[i] - e) < 1e-12) return coefficients[i];
  throw InvalidInput("exponent not in the fit basis");
}

FitResult fit_expansion(const std::vector<std::pair<double, cplx>>& samples, const std::vector<double>& exponents) {
  const int m = static_cast<int>(samples.size()), k = static_cast<int>(exponents.size());
  if (k == 0) throw InvalidInput("fit needs at least one exponent");
  if (m < 2 * k) throw InvalidInput("fit needs at least twice as many samples as exponents");
  FitResult f;
  f.exponents = exponents;
  f.samples = samples.size();
  f.t_min = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd A(m, k);
  Eigen::VectorXcd y(m);
  for (int i = 0; i < m; ++i) {
    double t = samples[i].first;
    f.t_min = std::min(f.t_min, t);
    f.t_max = std::max(f.t_max, t);
    for (int j = 0; j < k; ++j) A(i, j) = std::pow(t, exponents[j]);
    y(i) = samples[i].second;
  }
  // column scaling keeps the reported condition number meaningful
  Eigen::VectorXd sc = A.colwise().norm().cwiseInverse();
  Eigen::MatrixXd As = A * sc.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  f.condition = sv(k - 1) > 0.0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
  if (!(sv(k - 1) > 1e-14 * sv(0))) throw SingularError("fit design matrix is rank deficient", sv(k - 1));
  Eigen::VectorXd re = svd.solve(y.real()), im = svd.solve(y.imag());
  for (int j = 0; j < k; ++j) f.coefficients.emplace_back(re(j) * sc(j), im(j) * sc(j));
  Eigen::VectorXcd c(k);
  for (int j = 0; j < k; ++j) c(j) = f.coefficients[j];
  f.residual = (A.cast<cplx>() * c - y).norm();
  f.trusted = f.condition <= 1e8;
  return f;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}
std::uint64_t get_u(std::istream& is, int bytes) {
  unsigned char b[8] = {};
  if (!is.read(reinterpret_cast<char*>(b), bytes)) throw InvalidInput("truncated matrix container");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
void put_double(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

}  // namespace

void write_matrix(std::ostream& os, const Eigen::MatrixXcd& M) {
  os.write("NCRM", 4);
  put_u32(os, 1);
  put_u64(os, static_cast<std::uint64_t>(M.rows()));
  put_u64(os, static_cast<std::uint64_t>(M.cols()));
  for (Eigen::Index c = 0; c < M.cols(); ++c)
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      put_double(os, M(r, c).real());
      put_double(os, M(r, c).imag());
    }
}

Eigen::MatrixXcd read_matrix(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "NCRM", 4) != 0) throw InvalidInput("not a matrix container");
  if (get_u(is, 4) != 1) throw InvalidInput("unsupported matrix container version");
  auto rows = get_u(is, 8), cols = get_u(is, 8);
  if (rows > (1u << 20) || cols > (1u << 20)) throw InvalidInput("matrix container shape out of range");
  Eigen::MatrixXcd M(rows, cols);
  for (std::uint64_t c = 0; c < cols; ++c)
    for (std::uint64_t r = 0; r < rows; ++r) {
      double re = std::bit_cast<double>(get_u(is, 8));
      double im = std::bit_cast<double>(get_u(is, 8));
      M(r, c) = cplx(re, im);
    }
  return M;
}

void save_matrix(const std::string& path, const Eigen::MatrixXcd& M) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot write " + path);
  write_matrix(os, M);
}

Eigen::MatrixXcd load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot read " + path);
  return read_matrix(is);
}

}  // namespace ncres
