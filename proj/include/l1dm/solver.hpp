#ifndef L1DM_SOLVER_HPP
#define L1DM_SOLVER_HPP

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "l1dm/linalg.hpp"

namespace l1dm {

// A parameter outside its valid range. field() names the offending parameter.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A supplied initial density matrix violates one of the constraints of
// {P = P^T, tr P = N, 0 <= P <= I}. constraint() is "symmetry", "trace" or
// "spectrum".
class ConstraintError : public Error {
 public:
  ConstraintError(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

inline constexpr double kInfiniteMu = std::numeric_limits<double>::infinity();

struct SolverParams {
  // Weight of the l1 term is 1/mu. mu = kInfiniteMu drops the term.
  double mu = 10.0;
  // Penalties coupling P to the shrinkage copy Q and the spectral copy R.
  double lambda = 1.0;
  double r = 1.0;
  // Trace target (number of electrons).
  double n_electrons = 1.0;
  long max_iter = 10000;
  double tol = 1e-6;
  long record_every = 1;

  double l1_weight() const;
  // Throws ParameterError naming the first invalid field.
  void validate(Index n) const;
};

struct SolverState {
  SymMatrix P, Q, R, b, d;
  long iteration = 0;
};

struct IterationRecord {
  long iteration = 0;
  double objective = 0.0;
  double residual_Q = 0.0;
  double residual_R = 0.0;
  double delta_P = 0.0;
  std::optional<double> saddle_distance;
};

struct SolverResult {
  SolverState state;
  bool converged = false;
  long iterations = 0;
  std::vector<IterationRecord> history;

  const SymMatrix& P() const { return state.P; }
  const SymMatrix& Q() const { return state.Q; }
  const SymMatrix& R() const { return state.R; }
};

struct SolveOptions {
  std::optional<SymMatrix> initial;
  // Evaluated at every recorded iteration and stored in the history.
  std::function<double(const SolverState&)> monitor;
  // Called after every step, including unrecorded ones.
  std::function<void(const SolverState&)> on_step;
};

// Default P0 = (N/n) I. A supplied initial matrix must lie in the feasible
// set to within 1e-8; it is then used for P0 = Q0 = R0, with b0 = d0 = 0.
SolverState init_state(const SymMatrix& H, const SolverParams& params,
                       const std::optional<SymMatrix>& initial = std::nullopt);

// One sweep of the split Bregman iteration: P by trace-shifted averaging,
// Q by shrinkage, R by spectral clamp, then the b and d updates.
SolverState step(const SolverState& state, const SymMatrix& H, const SolverParams& params);

// Iterates until max(||P-Q||, ||P-R||, ||P^k - P^{k-1}||) <= tol max(1, ||P||)
// or max_iter is reached (converged = false, no exception).
SolverResult solve(const SymMatrix& H, const SolverParams& params,
                   const SolveOptions& options = {});

// tr(HP) + ||P||_1 / mu; the l1 term is dropped for mu = kInfiniteMu.
double objective(const SymMatrix& P, const SymMatrix& H, double mu);

struct Feasibility {
  double asymmetry = 0.0;    // ||P - P^T||_F
  double trace_error = 0.0;  // |tr P - N|
  double eig_low = 0.0;      // max(0, -lambda_min)
  double eig_high = 0.0;     // max(0, lambda_max - 1)

  double worst() const;
};

Feasibility feasibility(const Eigen::MatrixXd& P, double n_electrons);
Feasibility feasibility(const SymMatrix& P, double n_electrons);

// CSV: iter,objective,residual_Q,residual_R,delta_P[,saddle_distance]
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace l1dm

#endif  // L1DM_SOLVER_HPP
