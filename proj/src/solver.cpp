#include "l1dm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace l1dm {

namespace {

std::string fmt_double(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

IterationRecord make_record(const SolverState& s, const SymMatrix& H,
                            const SolverParams& params, double delta_P,
                            const SolveOptions& options) {
  IterationRecord rec;
  rec.iteration = s.iteration;
  rec.objective = objective(s.P, H, params.mu);
  rec.residual_Q = frobenius_distance(s.P, s.Q);
  rec.residual_R = frobenius_distance(s.P, s.R);
  rec.delta_P = delta_P;
  if (options.monitor) rec.saddle_distance = options.monitor(s);
  return rec;
}

}  // namespace

double SolverParams::l1_weight() const { return std::isinf(mu) ? 0.0 : 1.0 / mu; }

void SolverParams::validate(Index n) const {
  if (!(mu > 0.0)) throw ParameterError("mu", "must be > 0, got " + fmt_double(mu));
  if (!(lambda > 0.0) || std::isinf(lambda)) {
    throw ParameterError("lambda", "must be finite and > 0, got " + fmt_double(lambda));
  }
  if (!(r > 0.0) || std::isinf(r)) {
    throw ParameterError("r", "must be finite and > 0, got " + fmt_double(r));
  }
  if (!(n_electrons > 0.0)) {
    throw ParameterError("N", "must be > 0, got " + fmt_double(n_electrons));
  }
  if (n_electrons > static_cast<double>(n)) {
    throw ParameterError("N", "must not exceed the matrix dimension " + std::to_string(n));
  }
  if (!(tol > 0.0)) throw ParameterError("tol", "must be > 0, got " + fmt_double(tol));
  if (max_iter <= 0) throw ParameterError("max_iter", "must be > 0");
  if (record_every <= 0) throw ParameterError("record_every", "must be > 0");
}

SolverState init_state(const SymMatrix& H, const SolverParams& params,
                       const std::optional<SymMatrix>& initial) {
  const Index n = H.n();
  params.validate(n);

  SymMatrix p0 = SymMatrix::identity(n) * (params.n_electrons / static_cast<double>(n));
  if (initial) {
    if (initial->n() != n) {
      throw DimensionError("initial matrix is " + std::to_string(initial->n()) +
                           " x " + std::to_string(initial->n()) + ", H is " +
                           std::to_string(n) + " x " + std::to_string(n));
    }
    const Feasibility f = feasibility(*initial, params.n_electrons);
    constexpr double kTol = 1e-8;
    if (f.asymmetry > kTol) {
      throw ConstraintError("symmetry", "initial matrix is not symmetric");
    }
    if (f.trace_error > kTol) {
      throw ConstraintError("trace", "initial matrix has trace " +
                                         fmt_double(initial->trace()) + ", expected " +
                                         fmt_double(params.n_electrons));
    }
    if (f.eig_low > kTol || f.eig_high > kTol) {
      throw ConstraintError("spectrum", "initial matrix has eigenvalues outside [0, 1]");
    }
    p0 = *initial;
  }

  SolverState s;
  s.P = p0;
  s.Q = p0;
  s.R = p0;
  s.b = SymMatrix::zero(n);
  s.d = SymMatrix::zero(n);
  return s;
}

SolverState step(const SolverState& state, const SymMatrix& H, const SolverParams& params) {
  if (state.P.n() != H.n()) throw DimensionError("step: state and H differ in size");
  const double lr = params.lambda + params.r;

  SolverState next;
  const SymMatrix B = (params.lambda / lr) * (state.Q - state.b) +
                      (params.r / lr) * (state.R - state.d) - (1.0 / lr) * H;
  next.P = trace_shift_project(B, params.n_electrons);
  next.Q = soft_threshold(next.P + state.b, params.l1_weight() / params.lambda);
  next.R = spectral_clamp(next.P + state.d);
  next.b = state.b + next.P - next.Q;
  next.d = state.d + next.P - next.R;
  next.iteration = state.iteration + 1;
  return next;
}

SolverResult solve(const SymMatrix& H, const SolverParams& params,
                   const SolveOptions& options) {
  SolverState s = init_state(H, params, options.initial);

  SolverResult result;
  for (long k = 1; k <= params.max_iter; ++k) {
    SolverState next = step(s, H, params);
    const double delta_P = frobenius_distance(next.P, s.P);
    s = std::move(next);
    if (options.on_step) options.on_step(s);

    const double res_Q = frobenius_distance(s.P, s.Q);
    const double res_R = frobenius_distance(s.P, s.R);
    const double threshold = params.tol * std::max(1.0, frobenius_norm(s.P));
    const bool done = std::max({res_Q, res_R, delta_P}) <= threshold;

    if (done || k == params.max_iter || k % params.record_every == 0) {
      result.history.push_back(make_record(s, H, params, delta_P, options));
    }
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.iterations = s.iteration;
  result.state = std::move(s);
  return result;
}

double objective(const SymMatrix& P, const SymMatrix& H, double mu) {
  const double linear = trace_product(H, P);
  return std::isinf(mu) ? linear : linear + l1_norm(P) / mu;
}

double Feasibility::worst() const {
  return std::max({asymmetry, trace_error, eig_low, eig_high});
}

Feasibility feasibility(const Eigen::MatrixXd& P, double n_electrons) {
  if (P.rows() != P.cols()) throw DimensionError("feasibility: matrix is not square");
  Feasibility f;
  f.asymmetry = (P - P.transpose()).norm();
  f.trace_error = std::abs(P.trace() - n_electrons);
  if (P.size() == 0) return f;
  const SpectralDecomposition eig = sym_eig(SymMatrix::symmetrized(P));
  f.eig_low = std::max(0.0, -eig.values(0));
  f.eig_high = std::max(0.0, eig.values(eig.values.size() - 1) - 1.0);
  return f;
}

Feasibility feasibility(const SymMatrix& P, double n_electrons) {
  return feasibility(P.dense(), n_electrons);
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  const bool with_saddle =
      std::any_of(history.begin(), history.end(),
                  [](const IterationRecord& r) { return r.saddle_distance.has_value(); });
  out << "iter,objective,residual_Q,residual_R,delta_P";
  if (with_saddle) out << ",saddle_distance";
  out << '\n';
  out << std::scientific << std::setprecision(16);
  for (const IterationRecord& r : history) {
    out << r.iteration << ',' << r.objective << ',' << r.residual_Q << ','
        << r.residual_R << ',' << r.delta_P;
    if (with_saddle) out << ',' << r.saddle_distance.value_or(std::nan(""));
    out << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace l1dm
