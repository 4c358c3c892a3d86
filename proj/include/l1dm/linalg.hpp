#ifndef L1DM_LINALG_HPP
#define L1DM_LINALG_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace l1dm {

using Index = Eigen::Index;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class AsymmetryError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Raised when the symmetric eigensolver fails to converge. Carries the
// residual ||A V - V D||_F of the partial result.
class EigenSolverError : public Error {
 public:
  EigenSolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Real symmetric n x n matrix stored densely. Storage is kept exactly
// symmetric: every constructor that accepts a general matrix replaces it by
// (A + A^T) / 2, which is bitwise symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n);

  static SymMatrix zero(Index n) { return SymMatrix(n); }
  static SymMatrix identity(Index n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  // Validates finiteness and symmetry (|a_ij - a_ji| <= 1e-12 max(1, max|a|))
  // and throws NonFiniteError / AsymmetryError / DimensionError otherwise.
  static SymMatrix from_dense(const Eigen::MatrixXd& a);

  // Symmetrizes without checking. For results of kernels that are symmetric
  // up to rounding, e.g. V D V^T.
  static SymMatrix symmetrized(const Eigen::MatrixXd& a);

  Index n() const { return a_.rows(); }
  double operator()(Index i, Index j) const { return a_(i, j); }
  const Eigen::MatrixXd& dense() const { return a_; }

  double trace() const { return a_.trace(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }

  // Exact entrywise comparison.
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.a_.rows() == b.a_.rows() && a.a_ == b.a_;
  }

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd a, Trusted) : a_(std::move(a)) {}

  Eigen::MatrixXd a_;
};

// Eigenvalues in non-decreasing order; column i of `vectors` pairs with
// values(i).
struct SpectralDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  // V diag(f(values)) V^T.
  template <typename F>
  SymMatrix reconstruct(F&& f) const {
    Eigen::VectorXd mapped = values.unaryExpr(std::forward<F>(f));
    return SymMatrix::symmetrized(vectors * mapped.asDiagonal() *
                                  vectors.transpose());
  }
};

SpectralDecomposition sym_eig(const SymMatrix& a);

// Entrywise sign(a) max(|a| - t, 0).
SymMatrix soft_threshold(const SymMatrix& a, double t);

// a - ((tr a - target) / n) I: Frobenius projection onto {tr X = target}.
SymMatrix trace_shift_project(const SymMatrix& a, double target);

// V min(max(D, 0), 1) V^T: projection onto {0 <= X <= I}.
SymMatrix spectral_clamp(const SymMatrix& a);

double frobenius_norm(const SymMatrix& a);
double l1_norm(const SymMatrix& a);
// ||a - b||_F.
double frobenius_distance(const SymMatrix& a, const SymMatrix& b);
// tr(A B) = sum_ij A_ij B_ji.
double trace_product(const SymMatrix& a, const SymMatrix& b);
// Largest |a_ij - a_ji|; zero for every SymMatrix, exposed for raw input.
double max_asymmetry(const Eigen::MatrixXd& a);

// Matrix text format: first line n, then n rows of n values at 17
// significant digits.
void write_matrix(std::ostream& out, const SymMatrix& a);
SymMatrix read_matrix(std::istream& in);

void save_matrix(const std::string& path, const SymMatrix& a);

}  // namespace l1dm

#endif  // L1DM_LINALG_HPP
