#include "l1dm/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

namespace l1dm {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  const Index n = a.rows();
  Eigen::MatrixXd s(n, n);
  for (Index j = 0; j < n; ++j) {
    s(j, j) = a(j, j);
    for (Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

void require_same_size(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.n() != b.n()) {
    std::ostringstream msg;
    msg << op << ": dimension mismatch (" << a.n() << " vs " << b.n() << ")";
    throw DimensionError(msg.str());
  }
}

// Checks A x = V D V^T x and ||V^T x|| = ||x|| for a fixed probe vector, an
// O(n^2) test that catches a corrupted decomposition.
bool passes_probe(const Eigen::MatrixXd& a, const SpectralDecomposition& eig) {
  const Index n = a.rows();
  if (!eig.values.allFinite() || !eig.vectors.allFinite()) return false;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = std::sin(1.0 + 0.7 * static_cast<double>(i));
  const Eigen::VectorXd coeff = eig.vectors.transpose() * x;
  const Eigen::VectorXd ax = a * x;
  const Eigen::VectorXd vdx = eig.vectors * eig.values.cwiseProduct(coeff);
  const double xn = x.norm();
  const double tol = static_cast<double>(n) * 1e-10;
  return (ax - vdx).norm() <= tol * std::max(1.0, a.norm()) * xn &&
         std::abs(coeff.norm() - xn) <= tol * xn &&
         std::is_sorted(eig.values.data(), eig.values.data() + n);
}

void warn_lapack_fallback(int info) {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true)) {
    std::cerr << "warning: LAPACK dsyevd returned an inaccurate decomposition (info "
              << info << "); using the Eigen solver instead. With OpenBLAS, setting "
              << "OPENBLAS_CORETYPE=Haswell avoids this.\n";
  }
}

}  // namespace

SymMatrix::SymMatrix(Index n) : a_(Eigen::MatrixXd::Zero(n, n)) {
  if (n < 0) throw DimensionError("matrix dimension must be non-negative");
}

SymMatrix SymMatrix::identity(Index n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n), Trusted{});
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()), Trusted{});
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << "matrix is not square (" << a.rows() << " x " << a.cols() << ")";
    throw DimensionError(msg.str());
  }
  if (!a.allFinite()) throw NonFiniteError("matrix has non-finite entries");
  const double scale = std::max(1.0, a.size() ? a.cwiseAbs().maxCoeff() : 0.0);
  const double asym = max_asymmetry(a);
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << std::setprecision(3) << "matrix is not symmetric (max |a_ij - a_ji| = "
        << asym << ")";
    throw AsymmetryError(msg.str());
  }
  return SymMatrix(symmetrize(a), Trusted{});
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix is not square");
  return SymMatrix(symmetrize(a), Trusted{});
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  require_same_size(*this, o, "operator+");
  a_ += o.a_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  require_same_size(*this, o, "operator-");
  a_ -= o.a_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  a_ *= s;
  return *this;
}

SpectralDecomposition sym_eig(const SymMatrix& a) {
  const Index n = a.n();
  SpectralDecomposition out{Eigen::VectorXd(n), a.dense()};
  if (n == 0) return out;

  // Divide and conquer on the Householder tridiagonal form (LAPACK dsyevd).
  // Storage is column-major and symmetric, so either triangle is valid.
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                     out.vectors.data(), static_cast<lapack_int>(n), out.values.data());
  if (info == 0 && passes_probe(a.dense(), out)) return out;

  // Some OpenBLAS builds select a faulty kernel on recent Xeons and return a
  // wrong decomposition without an error code. Fall back to Eigen's
  // tridiagonal QR, which caps the QR phase at 30 n iterations.
  warn_lapack_fallback(info);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.dense(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    const Eigen::MatrixXd& v = es.eigenvectors();
    const double residual = (a.dense() * v - v * es.eigenvalues().asDiagonal()).norm();
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge (residual " << residual << ")";
    throw EigenSolverError(msg.str(), residual);
  }
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

SymMatrix soft_threshold(const SymMatrix& a, double t) {
  if (!(t >= 0.0)) throw Error("soft_threshold: threshold must be non-negative");
  // Entrywise, so exact symmetry is inherited.
  Eigen::MatrixXd out = a.dense().unaryExpr([t](double v) {
    const double m = std::abs(v) - t;
    return m > 0.0 ? std::copysign(m, v) : 0.0;
  });
  return SymMatrix::symmetrized(out);
}

SymMatrix trace_shift_project(const SymMatrix& a, double target) {
  const Index n = a.n();
  if (n == 0) throw DimensionError("trace_shift_project: empty matrix");
  const double shift = (a.trace() - target) / static_cast<double>(n);
  Eigen::MatrixXd out = a.dense();
  out.diagonal().array() -= shift;
  return SymMatrix::symmetrized(out);
}

SymMatrix spectral_clamp(const SymMatrix& a) {
  const SpectralDecomposition eig = sym_eig(a);
  return eig.reconstruct([](double v) { return std::clamp(v, 0.0, 1.0); });
}

double frobenius_norm(const SymMatrix& a) { return a.dense().norm(); }

double l1_norm(const SymMatrix& a) { return a.dense().cwiseAbs().sum(); }

double frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
  require_same_size(a, b, "frobenius_distance");
  return (a.dense() - b.dense()).norm();
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  require_same_size(a, b, "trace_product");
  return a.dense().cwiseProduct(b.dense().transpose()).sum();
}

double max_asymmetry(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix is not square");
  return a.size() ? (a - a.transpose()).cwiseAbs().maxCoeff() : 0.0;
}

void write_matrix(std::ostream& out, const SymMatrix& a) {
  const Index n = a.n();
  out << n << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << a(i, j);
    }
    out << '\n';
  }
}

SymMatrix read_matrix(std::istream& in) {
  std::string line;
  long long n = 0;
  // Header: a single positive integer.
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n) || (header >> extra) || n <= 0) {
      throw ParseError("matrix file: first line must be a positive integer n");
    }
  }

  Eigen::MatrixXd a(n, n);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::vector<double> values;
    std::string token;
    while (row >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ParseError("matrix file: row " + std::to_string(rows.size() + 1) +
                         ": invalid number '" + token + "'");
      }
    }
    rows.push_back(std::move(values));
  }

  if (static_cast<long long>(rows.size()) != n) {
    throw DimensionError("matrix file: header says n = " + std::to_string(n) +
                         " but found " + std::to_string(rows.size()) + " rows");
  }
  for (long long i = 0; i < n; ++i) {
    if (static_cast<long long>(rows[i].size()) != n) {
      throw DimensionError("matrix file: row " + std::to_string(i + 1) + " has " +
                           std::to_string(rows[i].size()) + " entries, expected " +
                           std::to_string(n));
    }
    for (long long j = 0; j < n; ++j) a(i, j) = rows[i][j];
  }
  return SymMatrix::from_dense(a);
}

void save_matrix(const std::string& path, const SymMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_matrix(out, a);
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace l1dm
