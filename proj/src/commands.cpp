#include "l1dm/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "l1dm/diagnostics.hpp"

namespace l1dm {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    log << "error: solver." << e.what() << '\n';
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot open '" + p.string() + "' for writing");
  return out;
}

Index occupied_states(double n_electrons) {
  return static_cast<Index>(std::floor(n_electrons + 1e-9));
}

std::string mu_label(double mu) {
  if (std::isinf(mu)) return "mu_inf";
  std::ostringstream s;
  s << "mu_" << std::setprecision(10) << mu;
  return s.str();
}

struct RunOutput {
  SolverResult result;
  Feasibility feas;
};

RunOutput run_and_write(const SymMatrix& H, SolverParams params, const RunConfig& cfg,
                        const fs::path& dir) {
  fs::create_directories(dir);

  SolveOptions options;
  if (cfg.initial) options.initial = load_matrix(cfg.initial->string());
  if (cfg.reference) {
    const SolverState ref = load_reference(*cfg.reference);
    if (ref.P.n() != H.n()) throw DimensionError("reference and H differ in size");
    options.monitor = [ref, params](const SolverState& s) {
      return saddle_distance(s, ref, params.lambda, params.r);
    };
  }

  RunOutput out{solve(H, params, options), {}};
  const SolverState& s = out.result.state;
  out.feas = feasibility(s.P, params.n_electrons);

  save_matrix((dir / "P.mat").string(), s.P);
  save_matrix((dir / "Q.mat").string(), s.Q);
  save_matrix((dir / "R.mat").string(), s.R);
  save_matrix((dir / "b.mat").string(), s.b);
  save_matrix((dir / "d.mat").string(), s.d);
  {
    auto f = open_out(dir / "history.csv");
    write_history_csv(f, out.result.history);
  }
  {
    auto f = open_out(dir / "summary.csv");
    f << "objective,trHP,l1,residual_Q,residual_R,delta_P,asymmetry,trace_err,"
         "eig_lo,eig_hi,converged,iterations\n";
    const IterationRecord& last = out.result.history.back();
    f << std::scientific << std::setprecision(16) << last.objective << ','
      << trace_product(H, s.P) << ',' << l1_norm(s.P) << ',' << last.residual_Q << ','
      << last.residual_R << ',' << last.delta_P << ',' << out.feas.asymmetry << ','
      << out.feas.trace_error << ',' << out.feas.eig_low << ',' << out.feas.eig_high
      << ',' << (out.result.converged ? 1 : 0) << ',' << out.result.iterations << '\n';
  }
  return out;
}

SymMatrix build_checked(const RunConfig& cfg) {
  SymMatrix H = build_hamiltonian(cfg.hamiltonian, cfg.grid());
  try {
    cfg.solver.validate(H.n());
  } catch (const ParameterError& e) {
    throw ConfigError("solver." + e.field(), e.what());
  }
  return H;
}

Eigen::VectorXd coordinates(const RunConfig& cfg, Index n) {
  if (std::holds_alternative<FromFile>(cfg.hamiltonian)) {
    return Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  }
  const Grid1D grid = cfg.grid();
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = grid.point(i);
  return x;
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    if (cfg.mu_values.size() != 1) {
      throw ConfigError("solver.mu", "solve takes a single value; use sweep for a list");
    }
    const SymMatrix H = build_checked(cfg);
    SolverParams params = cfg.solver;
    params.mu = cfg.mu_values.front();
    const RunOutput out = run_and_write(H, params, cfg, cfg.output_dir);
    log << (out.result.converged ? "converged" : "not converged") << " after "
        << out.result.iterations << " iterations, objective "
        << std::setprecision(12) << out.result.history.back().objective << '\n';
    return out.result.converged ? kExitOk : kExitNotConverged;
  });
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const SymMatrix H = build_checked(cfg);
    const SpectralDecomposition eig_H = sym_eig(H);
    const Index n_states = occupied_states(cfg.solver.n_electrons);
    const std::size_t runs = cfg.mu_values.size();

    std::vector<SweepRow> rows(runs);
    std::vector<int> status(runs, kExitOk);
    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
      for (std::size_t i = next++; i < runs; i = next++) {
        const double mu = cfg.mu_values[i];
        SolverParams params = cfg.solver;
        params.mu = mu;
        try {
          const RunOutput out =
              run_and_write(H, params, cfg, cfg.output_dir / mu_label(mu));
          const SymMatrix& P = out.result.P();
          rows[i] = {mu,
                     trace_product(H, P),
                     eig_H.values.head(n_states).sum(),
                     l1_norm(P),
                     space_approximation(P, eig_H, n_states),
                     sparsity_fraction(P)};
          if (!out.result.converged) status[i] = kExitNotConverged;
          std::lock_guard lock(log_mutex);
          log << mu_label(mu) << ": "
              << (out.result.converged ? "converged" : "not converged") << " after "
              << out.result.iterations << " iterations\n";
        } catch (const std::exception& e) {
          status[i] = kExitNotConverged;
          rows[i].mu = mu;
          rows[i].trace_HP = rows[i].exact_energy = rows[i].l1 = rows[i].space_approx =
              rows[i].sparsity = std::nan("");
          std::lock_guard lock(log_mutex);
          log << mu_label(mu) << ": failed: " << e.what() << '\n';
        }
      }
    };

    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("L1DM_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) threads = static_cast<std::size_t>(v);
    }
    threads = std::min(threads, runs);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    fs::create_directories(cfg.output_dir);
    auto f = open_out(cfg.output_dir / "sweep.csv");
    write_sweep_csv(f, rows);

    const bool all_ok = std::all_of(status.begin(), status.end(),
                                    [](int s) { return s == kExitOk; });
    return all_ok ? kExitOk : kExitNotConverged;
  });
}

int cmd_exact(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const SymMatrix H = build_checked(cfg);
    const double n_el = cfg.solver.n_electrons;
    if (std::abs(n_el - std::round(n_el)) > 1e-12) {
      throw ConfigError("solver.N", "exact density matrix needs an integer N");
    }
    const SpectralDecomposition eig = sym_eig(H);
    const SymMatrix P = exact_density_matrix(eig, static_cast<Index>(std::llround(n_el)));
    fs::create_directories(cfg.output_dir);
    save_matrix((cfg.output_dir / "P_exact.mat").string(), P);
    auto f = open_out(cfg.output_dir / "spectrum.csv");
    write_spectrum_csv(f, eig.values);
    log << "wrote " << (cfg.output_dir / "P_exact.mat").string() << '\n';
    return kExitOk;
  });
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const fs::path p_path = cfg.output_dir / "P.mat";
    if (!fs::exists(p_path)) {
      throw Error("no solution in '" + cfg.output_dir.string() + "' (P.mat missing)");
    }
    const SymMatrix P = load_matrix(p_path.string());
    const SymMatrix H = build_checked(cfg);
    if (H.n() != P.n()) throw DimensionError("P.mat and H differ in size");
    const Index n = H.n();

    const OccupationSpectrum occ = occupation_numbers(P);
    {
      auto f = open_out(cfg.output_dir / "occupations.csv");
      write_occupations_csv(f, occ.values);
    }
    {
      auto f = open_out(cfg.output_dir / "theta.csv");
      write_theta_csv(f, band_occupations(P, H));
    }

    std::vector<Index> sites = cfg.sites;
    if (sites.empty()) sites.push_back(n / 2);
    for (Index s : sites) {
      if (s >= n) throw ConfigError("diagnose.sites", "site out of range");
    }
    const auto columns = delta_projections(P, sites);
    const Eigen::VectorXd x = coordinates(cfg, n);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      auto f = open_out(cfg.output_dir / ("projection_" + std::to_string(sites[i]) + ".csv"));
      write_projection_csv(f, x, columns[i]);
    }

    Index k = cfg.ritz_count;
    if (k == 0) k = std::max<Index>(1, static_cast<Index>(std::ceil(cfg.solver.n_electrons - 1e-9)));
    k = std::min(k, n);
    {
      auto f = open_out(cfg.output_dir / "ritz.csv");
      write_ritz_csv(f, ritz_compare(P, H, k));
    }

    if (cfg.reference) {
      // Replays the run from the same config, which is deterministic, to
      // record the distance at every iteration.
      const SolverState ref = load_reference(*cfg.reference);
      if (ref.P.n() != n) throw DimensionError("reference and H differ in size");
      SolverParams params = cfg.solver;
      params.mu = cfg.mu_values.front();
      SolveOptions options;
      if (cfg.initial) options.initial = load_matrix(cfg.initial->string());
      std::vector<std::pair<long, double>> trace;
      const SolverState start = init_state(H, params, options.initial);
      trace.emplace_back(0, saddle_distance(start, ref, params.lambda, params.r));
      options.on_step = [&](const SolverState& s) {
        trace.emplace_back(s.iteration, saddle_distance(s, ref, params.lambda, params.r));
      };
      solve(H, params, options);
      auto f = open_out(cfg.output_dir / "saddle_distance.csv");
      f << "iter,saddle_distance\n" << std::scientific << std::setprecision(16);
      for (const auto& [it, dist] : trace) f << it << ',' << dist << '\n';
    }
    log << "diagnostics written to " << cfg.output_dir.string() << '\n';
    return kExitOk;
  });
}

}  // namespace l1dm
