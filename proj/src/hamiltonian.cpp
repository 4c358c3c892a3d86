#include "l1dm/hamiltonian.hpp"

#include <cmath>
#include <fstream>

namespace l1dm {

namespace {

void validate(const KronigPenneyParams& p, const Grid1D& grid) {
  if (!(p.well_depth >= 0.0)) throw Error("Kronig-Penney well depth must be >= 0");
  if (!(p.width > 0.0)) throw Error("Kronig-Penney well width must be > 0");
  if (p.centers.empty()) throw Error("Kronig-Penney model needs at least one well");
  for (double c : p.centers) {
    if (!(c >= 0.0 && c < grid.length())) {
      throw Error("Kronig-Penney well center " + std::to_string(c) +
                  " outside [0, L)");
    }
  }
}

}  // namespace

Grid1D::Grid1D(double length, Index n) : length_(length), n_(n) {
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("grid length must be > 0");
  if (n < 3) throw Error("grid needs at least 3 points");
}

KronigPenneyParams KronigPenneyParams::evenly_spaced(double length, int n_at,
                                                     double well_depth, double width) {
  KronigPenneyParams p;
  p.well_depth = well_depth;
  p.width = width;
  for (int j = 1; j <= n_at; ++j) {
    p.centers.push_back(length * j / static_cast<double>(n_at + 1));
  }
  return p;
}

SymMatrix build_laplacian_1d(const Grid1D& grid) {
  const Index n = grid.n();
  const double h2 = grid.spacing() * grid.spacing();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 1.0 / h2;
    a(i, (i + 1) % n) = -0.5 / h2;
    a(i, (i + n - 1) % n) = -0.5 / h2;
  }
  return SymMatrix::from_dense(a);
}

Eigen::VectorXd sample_kp_potential(const Grid1D& grid,
                                    const KronigPenneyParams& params) {
  validate(params, grid);
  const double len = grid.length();
  Eigen::VectorXd v(grid.n());
  for (Index i = 0; i < grid.n(); ++i) {
    const double x = grid.point(i);
    double sum = 0.0;
    for (double c : params.centers) {
      double dx = std::fmod(std::abs(x - c), len);
      dx = std::min(dx, len - dx);
      sum += std::exp(-(dx * dx) / (params.width * params.width));
    }
    v(i) = -params.well_depth * sum;
  }
  return v;
}

SymMatrix build_kronig_penney(const Grid1D& grid, const KronigPenneyParams& params) {
  return build_laplacian_1d(grid) + SymMatrix::diagonal(sample_kp_potential(grid, params));
}

SymMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file '" + path + "'");
  try {
    return read_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path + ": " + e.what());
  } catch (const AsymmetryError& e) {
    throw AsymmetryError(path + ": " + e.what());
  } catch (const NonFiniteError& e) {
    throw NonFiniteError(path + ": " + e.what());
  }
}

SymMatrix build_hamiltonian(const HamiltonianSpec& spec, const Grid1D& grid) {
  struct Builder {
    const Grid1D& grid;
    SymMatrix operator()(const FreeLaplacian&) const { return build_laplacian_1d(grid); }
    SymMatrix operator()(const ModifiedKronigPenney& kp) const {
      return build_kronig_penney(grid, kp.params);
    }
    SymMatrix operator()(const FromFile& f) const { return load_matrix(f.path); }
  };
  return std::visit(Builder{grid}, spec);
}

}  // namespace l1dm
