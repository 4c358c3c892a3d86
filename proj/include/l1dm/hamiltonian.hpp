#ifndef L1DM_HAMILTONIAN_HPP
#define L1DM_HAMILTONIAN_HPP

#include <string>
#include <variant>
#include <vector>

#include "l1dm/linalg.hpp"

namespace l1dm {

// Periodic 1D grid on [0, length) with n points, spacing length / n.
class Grid1D {
 public:
  Grid1D(double length, Index n);

  double length() const { return length_; }
  Index n() const { return n_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  double point(Index i) const { return spacing() * static_cast<double>(i); }

 private:
  double length_;
  Index n_;
};

// Inverted Gaussian wells V(x) = -V0 sum_j exp(-(x - x_j)^2 / delta^2), with
// x - x_j taken as the periodic minimum-image distance.
struct KronigPenneyParams {
  double well_depth = 1.0;
  double width = 3.0;
  std::vector<double> centers;

  // n_at wells at x_j = length * j / (n_at + 1), j = 1..n_at.
  static KronigPenneyParams evenly_spaced(double length, int n_at,
                                          double well_depth = 1.0,
                                          double width = 3.0);
};

struct FreeLaplacian {};
struct ModifiedKronigPenney {
  KronigPenneyParams params;
};
struct FromFile {
  std::string path;
};

using HamiltonianSpec = std::variant<FreeLaplacian, ModifiedKronigPenney, FromFile>;

// Central-difference discretization of -1/2 d^2/dx^2 with periodic wraparound.
SymMatrix build_laplacian_1d(const Grid1D& grid);

Eigen::VectorXd sample_kp_potential(const Grid1D& grid,
                                    const KronigPenneyParams& params);

SymMatrix build_kronig_penney(const Grid1D& grid, const KronigPenneyParams& params);

// Reads a matrix text file. Throws ParseError, DimensionError or
// AsymmetryError, each with the path in the message.
SymMatrix load_matrix(const std::string& path);

// FromFile ignores the grid.
SymMatrix build_hamiltonian(const HamiltonianSpec& spec, const Grid1D& grid);

}  // namespace l1dm

#endif  // L1DM_HAMILTONIAN_HPP
