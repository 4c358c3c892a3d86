#ifndef L1DM_CONFIG_HPP
#define L1DM_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l1dm/hamiltonian.hpp"
#include "l1dm/linalg.hpp"
#include "l1dm/solver.hpp"

namespace l1dm {

// Invalid or missing configuration entry. field() is the dotted key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Paths of the five matrices (P*, Q*, R*, b*, d*) of a saddle point.
struct SaddleReferencePaths {
  std::filesystem::path P, Q, R, b, d;
};

struct RunConfig {
  HamiltonianSpec hamiltonian = FreeLaplacian{};
  double grid_length = 100.0;
  Index grid_n = 256;

  // One run per entry; `solve` requires exactly one.
  std::vector<double> mu_values{10.0};
  SolverParams solver;  // solver.mu is overwritten per run

  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> initial;
  std::optional<SaddleReferencePaths> reference;

  // Diagnose: grid indices for delta projections and Ritz count (0 = N).
  std::vector<Index> sites;
  Index ritz_count = 0;

  Grid1D grid() const { return Grid1D(grid_length, grid_n); }
};

// Parses flat `key = value` text. Blank lines and `#` comments are ignored;
// relative paths are resolved against base_dir.
RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Reads the five reference matrices.
SolverState load_reference(const SaddleReferencePaths& paths);

}  // namespace l1dm

#endif  // L1DM_CONFIG_HPP
