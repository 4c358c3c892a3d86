#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "l1dm/diagnostics.hpp"
#include "support/oracles.hpp"

namespace l1dm {
namespace {

// Projector onto the n_states lowest Jacobi eigenvectors, computed without the
// library eigensolver.
Eigen::MatrixXd oracle_projector(const SymMatrix& h, Index n_states) {
  const auto [values, vectors] = testing::jacobi_eig(h.dense());
  const Eigen::MatrixXd v = vectors.leftCols(n_states);
  return v * v.transpose();
}

SymMatrix random_gapped(std::mt19937_64& rng, Index n, Index n_states, double gap) {
  Eigen::VectorXd lam(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index i = 0; i < n; ++i) lam(i) = u(rng) + (i >= n_states ? 1.0 + gap : 0.0);
  const Eigen::MatrixXd q = testing::random_orthogonal(rng, n);
  return SymMatrix::symmetrized(q * lam.asDiagonal() * q.transpose());
}

TEST(ExactDensityMatrix, Examples) {
  const SymMatrix h = SymMatrix::diagonal(Eigen::Vector3d(1, 2, 3));
  EXPECT_LE(frobenius_distance(exact_density_matrix(h, 1),
                               SymMatrix::diagonal(Eigen::Vector3d(1, 0, 0))),
            1e-14);
  EXPECT_LE(frobenius_distance(exact_density_matrix(h, 3), SymMatrix::identity(3)), 1e-14);

  const Index n = 16;
  const SymMatrix lap = build_laplacian_1d(Grid1D(16.0, n));
  const SymMatrix p1 = exact_density_matrix(lap, 1);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  EXPECT_LE((p1.dense() - ones).norm(), 1e-12);
}

TEST(ExactDensityMatrix, ProjectorPropertiesAgainstOracle) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + trial % 12;
    const Index k = 1 + trial % (n - 1);
    const SymMatrix h = random_gapped(rng, n, k, 0.2);
    const SymMatrix p = exact_density_matrix(h, k);
    const double tol = n * 1e-9;
    EXPECT_LE((p.dense() * p.dense() - p.dense()).norm(), tol);
    EXPECT_NEAR(p.trace(), static_cast<double>(k), n * 1e-10);
    EXPECT_LE((p.dense() - oracle_projector(h, k)).norm(), tol);
  }
}

TEST(ExactDensityMatrix, DetectsDegenerateGap) {
  const SpectralDecomposition e = sym_eig(SymMatrix::diagonal(Eigen::Vector3d(1, 2, 2)));
  EXPECT_TRUE(has_degenerate_gap(e, 2));
  EXPECT_FALSE(has_degenerate_gap(e, 1));
  EXPECT_FALSE(has_degenerate_gap(e, 3));
  EXPECT_THROW(exact_density_matrix(e, 4), std::out_of_range);
}

TEST(EnergyMetrics, Examples) {
  std::mt19937_64 rng(73);
  const SymMatrix h = SymMatrix::from_dense(testing::random_symmetric(rng, 10));
  const auto [values, vectors] = testing::jacobi_eig(h.dense());

  const EnergyMetrics exact = energy_metrics(exact_density_matrix(h, 3), h, 3);
  EXPECT_NEAR(exact.exact_energy, values.head(3).sum(), 1e-10);
  EXPECT_NEAR(exact.trace_HP, exact.exact_energy, 10 * 1e-9);

  const EnergyMetrics flat = energy_metrics(SymMatrix::identity(10) * 0.3, h, 3);
  EXPECT_NEAR(flat.trace_HP, 0.3 * h.trace(), 1e-12);
}

TEST(SpaceApproximation, Examples) {
  std::mt19937_64 rng(79);
  const Index n = 12;
  const SymMatrix h = random_gapped(rng, n, 5, 0.5);
  EXPECT_NEAR(space_approximation(exact_density_matrix(h, 5), h, 5), 0.0, n * 1e-9);
  EXPECT_NEAR(space_approximation(SymMatrix::zero(n), h, 5), 5.0, 1e-12);
  // Half-filled identity leaves (1 - 1/2)^2 per vector.
  EXPECT_NEAR(space_approximation(SymMatrix::identity(n) * 0.5, h, 4), 1.0, 1e-12);
}

TEST(OccupationNumbers, Examples) {
  std::mt19937_64 rng(83);
  const SymMatrix h = random_gapped(rng, 8, 3, 0.5);
  const OccupationSpectrum occ = occupation_numbers(exact_density_matrix(h, 3));
  for (Index i = 0; i < 8; ++i) EXPECT_NEAR(occ.values(i), i < 3 ? 1.0 : 0.0, 1e-12);

  const OccupationSpectrum half = occupation_numbers(SymMatrix::identity(4) * 0.5);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(half.values(i), 0.5, 1e-15);
}

TEST(OccupationNumbers, DescendingAndTraceConserving) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + trial;
    const SymMatrix p = SymMatrix::from_dense(testing::random_feasible(rng, n, 2.0));
    const OccupationSpectrum occ = occupation_numbers(p);
    for (Index i = 1; i < n; ++i) EXPECT_GE(occ.values(i - 1), occ.values(i));
    EXPECT_NEAR(occ.values.sum(), p.trace(), n * 1e-10);
    const Eigen::MatrixXd& v = occ.orbitals;
    EXPECT_LE((v * occ.values.asDiagonal() * v.transpose() - p.dense()).norm(), n * 1e-9);
  }
}

TEST(FilteredDensityMatrix, RangesAndErrors) {
  std::mt19937_64 rng(97);
  const Index n = 10;
  const SymMatrix p = SymMatrix::from_dense(testing::random_feasible(rng, n, 3.0));
  const OccupationSpectrum occ = occupation_numbers(p);
  EXPECT_LE(frobenius_distance(filtered_density_matrix(occ, 1, n), p), n * 1e-9);

  const SymMatrix m = filtered_density_matrix(occ, 2, 5);
  EXPECT_NEAR(m.trace(), occ.values.segment(1, 4).sum(), 1e-12);
  EXPECT_EQ(max_asymmetry(m.dense()), 0.0);

  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0).normalized();
  const SymMatrix rank1 = SymMatrix::symmetrized(0.7 * v * v.transpose());
  EXPECT_LE(frobenius_distance(filtered_density_matrix(occupation_numbers(rank1), 1, 1),
                               rank1),
            1e-12);

  EXPECT_THROW(filtered_density_matrix(occ, 0, 3), std::out_of_range);
  EXPECT_THROW(filtered_density_matrix(occ, 4, 3), std::out_of_range);
  EXPECT_THROW(filtered_density_matrix(occ, 1, n + 1), std::out_of_range);
}

TEST(DeltaProjections, Examples) {
  const auto cols = delta_projections(SymMatrix::identity(5), {0, 3});
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[0], Eigen::VectorXd::Unit(5, 0));
  EXPECT_EQ(cols[1], Eigen::VectorXd::Unit(5, 3));
  EXPECT_THROW(delta_projections(SymMatrix::identity(5), {5}), std::out_of_range);

  const Index n = 32;
  const SymMatrix pn = exact_density_matrix(build_laplacian_1d(Grid1D(32.0, n)), 5);
  const auto c = delta_projections(pn, {7});
  const Eigen::VectorXd dense = pn.dense() * Eigen::VectorXd::Unit(n, 7);
  EXPECT_EQ(c[0], dense);
  EXPECT_NEAR(c[0].sum(), pn.dense().row(7).sum(), 1e-14);
}

TEST(DeltaProjections, ColumnNormsBoundedForFeasibleP) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + trial;
    const SymMatrix p = SymMatrix::from_dense(testing::random_feasible(rng, n, 2.0));
    std::vector<Index> sites(n);
    for (Index i = 0; i < n; ++i) sites[i] = i;
    for (const Eigen::VectorXd& c : delta_projections(p, sites)) EXPECT_LE(c.norm(), 1.0 + 1e-9);
  }
}

TEST(RitzCompare, Examples) {
  std::mt19937_64 rng(103);
  const Index n = 14;
  const SymMatrix h = random_gapped(rng, n, 4, 0.3);
  const auto [values, vectors] = testing::jacobi_eig(h.dense());

  const RitzComparison exact = ritz_compare(exact_density_matrix(h, 4), h, 4);
  EXPECT_LE((exact.ritz - values.head(4)).cwiseAbs().maxCoeff(), n * 1e-8);
  EXPECT_LE((exact.exact - values.head(4)).cwiseAbs().maxCoeff(), 1e-10);

  const RitzComparison full = ritz_compare(SymMatrix::identity(n), h, n);
  EXPECT_LE((full.ritz - values).cwiseAbs().maxCoeff(), n * 1e-10);

  EXPECT_THROW(ritz_compare(SymMatrix::identity(n), h, 0), std::out_of_range);
  EXPECT_THROW(ritz_compare(SymMatrix::identity(3), h, 1), DimensionError);
}

TEST(RitzCompare, MatchesNonzeroSpectrumOfPH) {
  // For a projector onto an arbitrary subspace, the nonzero eigenvalues of the
  // non-symmetric PH equal those of the compressed operator.
  std::mt19937_64 rng(107);
  const Index n = 9, k = 3;
  const SymMatrix h = SymMatrix::from_dense(testing::random_symmetric(rng, n));
  const Eigen::MatrixXd q = testing::random_orthogonal(rng, n).leftCols(k);
  const SymMatrix p = SymMatrix::symmetrized(q * q.transpose());
  const RitzComparison rc = ritz_compare(p, h, k);

  Eigen::EigenSolver<Eigen::MatrixXd> es(p.dense() * h.dense());
  std::vector<double> nonzero;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i)) > 1e-8) nonzero.push_back(es.eigenvalues()(i).real());
  }
  std::sort(nonzero.begin(), nonzero.end());
  ASSERT_EQ(nonzero.size(), static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) EXPECT_NEAR(rc.ritz(i), nonzero[i], 1e-9);
}

TEST(BandOccupations, Examples) {
  std::mt19937_64 rng(109);
  const Index n = 10;
  const SymMatrix h = random_gapped(rng, n, 3, 0.5);
  const Eigen::VectorXd theta = band_occupations(exact_density_matrix(h, 3), h);
  for (Index i = 0; i < n; ++i) EXPECT_NEAR(theta(i), i < 3 ? 1.0 : 0.0, 1e-12);

  const Eigen::VectorXd flat = band_occupations(SymMatrix::identity(n) * 0.3, h);
  for (Index i = 0; i < n; ++i) EXPECT_NEAR(flat(i), 0.3, 1e-14);

  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix p = SymMatrix::from_dense(testing::random_feasible(rng, n, 4.0));
    const Eigen::VectorXd t = band_occupations(p, h);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      sum += t(i);
      EXPECT_GE(t(i), -1e-9);
      EXPECT_LE(t(i), 1.0 + 1e-9);
    }
    EXPECT_NEAR(sum, 4.0, 1e-9);
  }
}

TEST(SaddleDistance, Examples) {
  std::mt19937_64 rng(113);
  auto random_state = [&] {
    SolverState s;
    s.P = SymMatrix::from_dense(testing::random_symmetric(rng, 4));
    s.Q = SymMatrix::from_dense(testing::random_symmetric(rng, 4));
    s.R = SymMatrix::from_dense(testing::random_symmetric(rng, 4));
    s.b = SymMatrix::from_dense(testing::random_symmetric(rng, 4));
    s.d = SymMatrix::from_dense(testing::random_symmetric(rng, 4));
    return s;
  };
  const SolverState a = random_state();
  const SolverState b = random_state();
  EXPECT_EQ(saddle_distance(a, a, 1.0, 1.0), 0.0);

  const double sq_b = std::pow(frobenius_distance(a.b, b.b), 2);
  const double sq_q = std::pow(frobenius_distance(a.Q, b.Q), 2);
  const double sq_d = std::pow(frobenius_distance(a.d, b.d), 2);
  const double sq_r = std::pow(frobenius_distance(a.R, b.R), 2);
  EXPECT_NEAR(saddle_distance(a, b, 1.0, 1.0), sq_b + sq_q + sq_d + sq_r, 1e-12);
  EXPECT_NEAR(saddle_distance(a, b, 2.0, 1.0) - saddle_distance(a, b, 1.0, 1.0),
              sq_b + sq_q, 1e-12);
  // P does not enter.
  SolverState c = b;
  c.P = a.P;
  EXPECT_EQ(saddle_distance(a, b, 1.0, 1.0), saddle_distance(a, c, 1.0, 1.0));
}

TEST(SparsityFraction, Examples) {
  EXPECT_DOUBLE_EQ(sparsity_fraction(SymMatrix::identity(4)), 12.0 / 16.0);
  Eigen::Matrix2d a;
  a << 1.0, 1e-7, 1e-7, 1e-5;
  EXPECT_DOUBLE_EQ(sparsity_fraction(SymMatrix::from_dense(a)), 0.5);
  EXPECT_DOUBLE_EQ(sparsity_fraction(SymMatrix::from_dense(a), 1e-4), 0.75);
}

TEST(CsvWriters, HeadersAndRows) {
  std::ostringstream occ;
  write_occupations_csv(occ, Eigen::Vector2d(1.0, 0.5));
  EXPECT_EQ(occ.str(), "index,f\n1,1.0000000000000000e+00\n2,5.0000000000000000e-01\n");

  std::ostringstream theta;
  write_theta_csv(theta, Eigen::VectorXd::Constant(1, 0.25));
  EXPECT_EQ(theta.str(), "index,theta\n1,2.5000000000000000e-01\n");

  std::ostringstream proj;
  write_projection_csv(proj, Eigen::Vector2d(0.0, 0.5), Eigen::Vector2d(1.0, 2.0));
  EXPECT_EQ(proj.str().substr(0, 8), "x,value\n");

  std::ostringstream ritz;
  write_ritz_csv(ritz, RitzComparison{Eigen::VectorXd::Constant(1, 1.0),
                                      Eigen::VectorXd::Constant(1, 2.0)});
  EXPECT_EQ(ritz.str(), "index,ritz,exact\n1,1.0000000000000000e+00,2.0000000000000000e+00\n");

  std::ostringstream spec;
  write_spectrum_csv(spec, Eigen::VectorXd::Constant(1, -1.0));
  EXPECT_EQ(spec.str(), "index,eigenvalue\n1,-1.0000000000000000e+00\n");

  std::ostringstream sweep;
  write_sweep_csv(sweep, {SweepRow{10.0, 1.0, 0.5, 3.0, 0.1, 0.9}});
  const std::string s = sweep.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "mu,trHP,exact_energy,l1,space_approx,sparsity");
}

}  // namespace
}  // namespace l1dm
