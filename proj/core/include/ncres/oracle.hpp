#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ncres/classical_symbol.hpp"

namespace ncres {

// Op(sigma) on span{U_m : |m|_inf <= K}: column m is sigma(m) applied to U_m.
struct OperatorMatrix {
  ThetaMatrix theta;
  int K = 0;
  std::vector<Index> basis;
  Eigen::SparseMatrix<cplx> M;
  bool exact = false;            // differential input, entries exact
  bool hermitian = false;
  double hermitian_residual = 0.0;
  int band = 0;                  // largest |row - col|_inf of a nonzero entry
  double leaked_mass = 0.0;      // l1 mass of images that left the box

  int dim() const { return static_cast<int>(basis.size()); }
  int position(const Index& k) const;  // -1 outside the box
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(M); }
};

OperatorMatrix operator_matrix(const ClassicalSymbol& op, int K, const EvalOptions& opt = {});
OperatorMatrix multiplier_operator(const MultiplierCoefficient& m, int K);
OperatorMatrix left_operator(const NCElement& a, int K);

// basis positions with |m|_inf <= K - margin
std::vector<int> interior_positions(const OperatorMatrix& M, int margin);

// Max |A - B| over the columns in `cols`.
double column_deviation(const Eigen::SparseMatrix<cplx>& A, const Eigen::SparseMatrix<cplx>& B,
                        const std::vector<int>& cols);

struct SpectralBlock {
  std::vector<int> positions;
  Eigen::VectorXd evals;
  Eigen::MatrixXcd vecs;
};

// Hermitian eigendecomposition by connected components of the sparsity pattern.
struct Spectrum {
  std::vector<SpectralBlock> blocks;
  double max_residual = 0.0;  // max ||Mv - lambda v|| / ||M||
  double min_eigenvalue() const;
  std::vector<double> all_eigenvalues() const;
};

Spectrum hermitian_spectrum(const OperatorMatrix& M);

struct HeatSample {
  double t = 0.0;
  cplx value{};
  double tail = 0.0;     // truncation-tail bound
  bool trusted = false;  // tail <= 1e-8 * scale
};

// Tr(L_a e^{-tM}) from one spectrum; c_min bounds M from below by c_min |m|^2
// away from the box boundary (used for the tail estimate).
class HeatOracle {
 public:
  HeatOracle(const OperatorMatrix& M, double c_min);

  using Weights = std::vector<Eigen::VectorXcd>;  // diag(V^* L_a V) per block
  Weights weights(const NCElement& a) const;
  Weights unit_weights() const;

  HeatSample trace(const Weights& w, double a_norm1, double t) const;
  HeatSample trace(double t) const { return trace(unit_weights(), 1.0, t); }
  // smallest t whose tail bound passes for a = 1
  double trusted_t_min(double t_hi = 10.0) const;

  const Spectrum& spectrum() const { return spec_; }

 private:
  double tail_bound(double t) const;
  const OperatorMatrix* op_;
  Spectrum spec_;
  double c_min_;
};

struct FitResult {
  std::vector<double> exponents;
  std::vector<cplx> coefficients;
  double residual = 0.0;
  double condition = 0.0;
  double t_min = 0.0, t_max = 0.0;
  std::size_t samples = 0;
  bool trusted = false;  // condition <= 1e8
  cplx coefficient(double e) const;
};

FitResult fit_expansion(const std::vector<std::pair<double, cplx>>& samples, const std::vector<double>& exponents);

// Binary container: "NCRM", uint32 version 1, uint64 rows, uint64 cols, then
// rows*cols column-major little-endian (re, im) double pairs.
void write_matrix(std::ostream& os, const Eigen::MatrixXcd& M);
Eigen::MatrixXcd read_matrix(std::istream& is);
void save_matrix(const std::string& path, const Eigen::MatrixXcd& M);
Eigen::MatrixXcd load_matrix(const std::string& path);

}  // namespace ncres
