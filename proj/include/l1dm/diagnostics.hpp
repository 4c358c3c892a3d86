#ifndef L1DM_DIAGNOSTICS_HPP
#define L1DM_DIAGNOSTICS_HPP

#include <iosfwd>
#include <vector>

#include "l1dm/hamiltonian.hpp"
#include "l1dm/linalg.hpp"
#include "l1dm/solver.hpp"

namespace l1dm {

// Projector onto the eigenvectors of the n_states lowest eigenvalues of H.
// When eigenvalues n_states and n_states + 1 coincide within 1e-10 the
// choice inside the degenerate level follows the eigensolver and a warning
// is printed to stderr.
SymMatrix exact_density_matrix(const SymMatrix& H, Index n_states);
SymMatrix exact_density_matrix(const SpectralDecomposition& eig_H, Index n_states);

bool has_degenerate_gap(const SpectralDecomposition& eig_H, Index n_states);

struct EnergyMetrics {
  double trace_HP = 0.0;
  double exact_energy = 0.0;  // sum of the n_states lowest eigenvalues of H
};

EnergyMetrics energy_metrics(const SymMatrix& P, const SymMatrix& H, Index n_states);

// sum_{i <= n_states} ||phi_i - P phi_i||^2 over the lowest eigenvectors of H.
double space_approximation(const SymMatrix& P, const SymMatrix& H, Index n_states);
double space_approximation(const SymMatrix& P, const SpectralDecomposition& eig_H,
                           Index n_states);

// Eigenpairs of P sorted by decreasing occupation.
struct OccupationSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd orbitals;
};

OccupationSpectrum occupation_numbers(const SymMatrix& P);

// sum_{i = first..last} f_i phi_i phi_i^T, 1-based inclusive indices into the
// descending occupation order. Throws std::out_of_range on bad indices.
SymMatrix filtered_density_matrix(const OccupationSpectrum& occ, Index first, Index last);

// Columns of P, i.e. P applied to the unit vectors e_site.
std::vector<Eigen::VectorXd> delta_projections(const SymMatrix& P,
                                               const std::vector<Index>& sites);

struct RitzComparison {
  Eigen::VectorXd ritz;   // ascending
  Eigen::VectorXd exact;  // k lowest eigenvalues of H
};

// Eigenvalues of PH, computed as those of the symmetric sqrt(P) H sqrt(P)
// restricted to the natural orbitals with the k largest occupations (never
// splitting a level tied with the k-th within 1e-8). For a projector this is
// the nonzero spectrum of PH exactly. Negative occupations are clamped to 0
// before the square root.
RitzComparison ritz_compare(const SymMatrix& P, const SymMatrix& H, Index k);

// theta_i = v_i^T P v_i for the eigenvectors of H in ascending order.
Eigen::VectorXd band_occupations(const SymMatrix& P, const SymMatrix& H);

// lambda ||b - b*||^2 + r ||d - d*||^2 + lambda ||Q - Q*||^2 + r ||R - R*||^2.
double saddle_distance(const SolverState& state, const SolverState& reference,
                       double lambda, double r);

// Fraction of entries with |P_ij| < rel * max |P_ij|.
double sparsity_fraction(const SymMatrix& P, double rel = 1e-6);

struct SweepRow {
  double mu = 0.0;
  double trace_HP = 0.0;
  double exact_energy = 0.0;
  double l1 = 0.0;
  double space_approx = 0.0;
  double sparsity = 0.0;
};

void write_occupations_csv(std::ostream& out, const Eigen::VectorXd& f);
void write_theta_csv(std::ostream& out, const Eigen::VectorXd& theta);
// Rows x,value with x the grid coordinate of each entry.
void write_projection_csv(std::ostream& out, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& v);
void write_ritz_csv(std::ostream& out, const RitzComparison& ritz);
void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& values);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace l1dm

#endif  // L1DM_DIAGNOSTICS_HPP
