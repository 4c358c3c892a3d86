#include "l1dm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <stdexcept>
#include <string>

namespace l1dm {

namespace {

void require_states(Index n_states, Index n) {
  if (n_states < 0 || n_states > n) {
    throw std::out_of_range("number of states " + std::to_string(n_states) +
                            " outside [0, " + std::to_string(n) + "]");
  }
}

void warn_if_degenerate(const SpectralDecomposition& eig_H, Index n_states) {
  if (has_degenerate_gap(eig_H, n_states)) {
    std::cerr << "warning: eigenvalues " << n_states << " and " << n_states + 1
              << " of H are degenerate; the occupied subspace is not unique\n";
  }
}

void set_precision(std::ostream& out) { out << std::scientific << std::setprecision(16); }

}  // namespace

bool has_degenerate_gap(const SpectralDecomposition& eig_H, Index n_states) {
  const Index n = eig_H.values.size();
  if (n_states <= 0 || n_states >= n) return false;
  return std::abs(eig_H.values(n_states) - eig_H.values(n_states - 1)) <= 1e-10;
}

SymMatrix exact_density_matrix(const SpectralDecomposition& eig_H, Index n_states) {
  const Index n = eig_H.values.size();
  require_states(n_states, n);
  warn_if_degenerate(eig_H, n_states);
  const Eigen::MatrixXd v = eig_H.vectors.leftCols(n_states);
  return SymMatrix::symmetrized(v * v.transpose());
}

SymMatrix exact_density_matrix(const SymMatrix& H, Index n_states) {
  return exact_density_matrix(sym_eig(H), n_states);
}

EnergyMetrics energy_metrics(const SymMatrix& P, const SymMatrix& H, Index n_states) {
  const SpectralDecomposition eig = sym_eig(H);
  require_states(n_states, H.n());
  return {trace_product(H, P), eig.values.head(n_states).sum()};
}

double space_approximation(const SymMatrix& P, const SpectralDecomposition& eig_H,
                           Index n_states) {
  require_states(n_states, P.n());
  warn_if_degenerate(eig_H, n_states);
  const Eigen::MatrixXd phi = eig_H.vectors.leftCols(n_states);
  return (phi - P.dense() * phi).squaredNorm();
}

double space_approximation(const SymMatrix& P, const SymMatrix& H, Index n_states) {
  return space_approximation(P, sym_eig(H), n_states);
}

OccupationSpectrum occupation_numbers(const SymMatrix& P) {
  const SpectralDecomposition eig = sym_eig(P);
  return {eig.values.reverse(), eig.vectors.rowwise().reverse()};
}

SymMatrix filtered_density_matrix(const OccupationSpectrum& occ, Index first, Index last) {
  const Index n = occ.values.size();
  if (first < 1 || first > last || last > n) {
    throw std::out_of_range("occupation range [" + std::to_string(first) + ", " +
                            std::to_string(last) + "] outside [1, " +
                            std::to_string(n) + "]");
  }
  const Index count = last - first + 1;
  const auto phi = occ.orbitals.middleCols(first - 1, count);
  const auto f = occ.values.segment(first - 1, count);
  return SymMatrix::symmetrized(phi * f.asDiagonal() * phi.transpose());
}

std::vector<Eigen::VectorXd> delta_projections(const SymMatrix& P,
                                               const std::vector<Index>& sites) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(sites.size());
  for (Index site : sites) {
    if (site < 0 || site >= P.n()) {
      throw std::out_of_range("site index " + std::to_string(site) + " outside [0, " +
                              std::to_string(P.n()) + ")");
    }
    out.emplace_back(P.dense().col(site));
  }
  return out;
}

RitzComparison ritz_compare(const SymMatrix& P, const SymMatrix& H, Index k) {
  const Index n = P.n();
  if (H.n() != n) throw DimensionError("ritz_compare: P and H differ in size");
  if (k < 1 || k > n) {
    throw std::out_of_range("ritz_compare: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");
  }

  const OccupationSpectrum occ = occupation_numbers(P);
  Index m = k;
  while (m < n && std::abs(occ.values(m) - occ.values(k - 1)) <= 1e-8) ++m;

  const auto phi = occ.orbitals.leftCols(m);
  const Eigen::VectorXd root =
      occ.values.head(m).unaryExpr([](double f) { return std::sqrt(std::max(f, 0.0)); });
  const Eigen::MatrixXd reduced =
      root.asDiagonal() * (phi.transpose() * H.dense() * phi) * root.asDiagonal();
  const SpectralDecomposition ritz = sym_eig(SymMatrix::symmetrized(reduced));

  const SpectralDecomposition eig_H = sym_eig(H);
  return {ritz.values.head(k), eig_H.values.head(k)};
}

Eigen::VectorXd band_occupations(const SymMatrix& P, const SymMatrix& H) {
  if (H.n() != P.n()) throw DimensionError("band_occupations: P and H differ in size");
  const SpectralDecomposition eig = sym_eig(H);
  return (eig.vectors.transpose() * P.dense() * eig.vectors).diagonal();
}

double saddle_distance(const SolverState& state, const SolverState& reference,
                       double lambda, double r) {
  const auto sq = [](const SymMatrix& a, const SymMatrix& b) {
    const double d = frobenius_distance(a, b);
    return d * d;
  };
  return lambda * sq(state.b, reference.b) + r * sq(state.d, reference.d) +
         lambda * sq(state.Q, reference.Q) + r * sq(state.R, reference.R);
}

double sparsity_fraction(const SymMatrix& P, double rel) {
  if (P.n() == 0) return 0.0;
  const Eigen::ArrayXXd a = P.dense().array().abs();
  const double cut = rel * a.maxCoeff();
  return static_cast<double>((a < cut).count()) / static_cast<double>(a.size());
}

void write_occupations_csv(std::ostream& out, const Eigen::VectorXd& f) {
  out << "index,f\n";
  set_precision(out);
  for (Index i = 0; i < f.size(); ++i) out << i + 1 << ',' << f(i) << '\n';
  out << std::defaultfloat;
}

void write_theta_csv(std::ostream& out, const Eigen::VectorXd& theta) {
  out << "index,theta\n";
  set_precision(out);
  for (Index i = 0; i < theta.size(); ++i) out << i + 1 << ',' << theta(i) << '\n';
  out << std::defaultfloat;
}

void write_projection_csv(std::ostream& out, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& v) {
  if (x.size() != v.size()) throw DimensionError("write_projection_csv: size mismatch");
  out << "x,value\n";
  set_precision(out);
  for (Index i = 0; i < v.size(); ++i) out << x(i) << ',' << v(i) << '\n';
  out << std::defaultfloat;
}

void write_ritz_csv(std::ostream& out, const RitzComparison& ritz) {
  out << "index,ritz,exact\n";
  set_precision(out);
  for (Index i = 0; i < ritz.ritz.size(); ++i) {
    out << i + 1 << ',' << ritz.ritz(i) << ',' << ritz.exact(i) << '\n';
  }
  out << std::defaultfloat;
}

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& values) {
  out << "index,eigenvalue\n";
  set_precision(out);
  for (Index i = 0; i < values.size(); ++i) out << i + 1 << ',' << values(i) << '\n';
  out << std::defaultfloat;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "mu,trHP,exact_energy,l1,space_approx,sparsity\n";
  set_precision(out);
  for (const SweepRow& r : rows) {
    out << r.mu << ',' << r.trace_HP << ',' << r.exact_energy << ',' << r.l1 << ','
        << r.space_approx << ',' << r.sparsity << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace l1dm
