#ifndef L1DM_COMMANDS_HPP
#define L1DM_COMMANDS_HPP

#include <iosfwd>

#include "l1dm/config.hpp"

namespace l1dm {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

// Writes P.mat, Q.mat, R.mat, b.mat, d.mat, history.csv and summary.csv
// into cfg.output_dir.
int cmd_solve(const RunConfig& cfg, std::ostream& log);

// One subdirectory mu_<value> per entry of cfg.mu_values plus sweep.csv.
// Worker count: $L1DM_THREADS, default min(#mu, hardware threads).
int cmd_sweep(const RunConfig& cfg, std::ostream& log);

// Writes P_exact.mat and spectrum.csv.
int cmd_exact(const RunConfig& cfg, std::ostream& log);

// Reads P.mat from cfg.output_dir and writes occupations.csv, theta.csv,
// ritz.csv, projection_<site>.csv and, with a saddle reference,
// saddle_distance.csv.
int cmd_diagnose(const RunConfig& cfg, std::ostream& log);

}  // namespace l1dm

#endif  // L1DM_COMMANDS_HPP
