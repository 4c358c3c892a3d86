#include "l1dm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace l1dm {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf" || v == "+inf" || v == "infinity") return kInfiniteMu;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size() && !std::isnan(d)) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected a number, got '" + v + "'");
}

long parse_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t used = 0;
    const long i = std::stol(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected an integer, got '" + v + "'");
}

class Entries {
 public:
  Entries(std::map<std::string, std::string> kv, fs::path base)
      : kv_(std::move(kv)), base_(std::move(base)) {}

  std::optional<std::string> take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  double number(const std::string& key, double fallback) {
    auto v = take(key);
    return v ? parse_double(key, *v) : fallback;
  }

  long integer(const std::string& key, long fallback) {
    auto v = take(key);
    return v ? parse_integer(key, *v) : fallback;
  }

  std::optional<fs::path> existing_path(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    fs::path p = *v;
    if (p.is_relative()) p = base_ / p;
    if (!fs::exists(p)) throw ConfigError(key, "file '" + p.string() + "' does not exist");
    return p;
  }

  std::optional<fs::path> path(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    fs::path p = *v;
    return p.is_relative() ? base_ / p : p;
  }

  void reject_leftovers() const {
    if (!kv_.empty()) throw ConfigError(kv_.begin()->first, "unknown key");
  }

 private:
  std::map<std::string, std::string> kv_;
  fs::path base_;
};

void check_params(const SolverParams& p, Index n) {
  try {
    p.validate(n);
  } catch (const ParameterError& e) {
    const std::string key = e.field() == "N" ? "solver.N" : "solver." + e.field();
    throw ConfigError(key, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
    if (kv.count(key)) throw ConfigError(key, "given more than once");
    kv[key] = trim(line.substr(eq + 1));
  }

  Entries e(std::move(kv), base_dir);
  RunConfig cfg;

  cfg.grid_length = e.number("grid.length", cfg.grid_length);
  cfg.grid_n = e.integer("grid.n", cfg.grid_n);
  if (!(cfg.grid_length > 0.0) || std::isinf(cfg.grid_length)) {
    throw ConfigError("grid.length", "must be finite and > 0");
  }
  if (cfg.grid_n < 3) throw ConfigError("grid.n", "must be >= 3");

  const std::string type = e.take("hamiltonian.type").value_or("free");
  Index dimension = cfg.grid_n;
  if (type == "free") {
    cfg.hamiltonian = FreeLaplacian{};
  } else if (type == "kronig_penney") {
    const double v0 = e.number("hamiltonian.v0", 1.0);
    const double delta = e.number("hamiltonian.delta", 3.0);
    const long n_at = e.integer("hamiltonian.n_at", 10);
    if (!(v0 >= 0.0)) throw ConfigError("hamiltonian.v0", "must be >= 0");
    if (!(delta > 0.0)) throw ConfigError("hamiltonian.delta", "must be > 0");
    if (n_at < 1) throw ConfigError("hamiltonian.n_at", "must be >= 1");
    KronigPenneyParams kp =
        KronigPenneyParams::evenly_spaced(cfg.grid_length, static_cast<int>(n_at), v0, delta);
    if (auto centers = e.take("hamiltonian.centers")) {
      kp.centers.clear();
      for (const std::string& c : split_list(*centers)) {
        const double x = parse_double("hamiltonian.centers", c);
        if (!(x >= 0.0 && x < cfg.grid_length)) {
          throw ConfigError("hamiltonian.centers", "center " + c + " outside [0, L)");
        }
        kp.centers.push_back(x);
      }
      if (kp.centers.empty()) throw ConfigError("hamiltonian.centers", "empty list");
    }
    cfg.hamiltonian = ModifiedKronigPenney{std::move(kp)};
  } else if (type == "file") {
    auto p = e.existing_path("hamiltonian.path");
    if (!p) throw ConfigError("hamiltonian.path", "required for hamiltonian.type = file");
    cfg.hamiltonian = FromFile{p->string()};
    dimension = -1;
  } else {
    throw ConfigError("hamiltonian.type",
                      "expected free, kronig_penney or file, got '" + type + "'");
  }

  if (auto mu = e.take("solver.mu")) {
    cfg.mu_values.clear();
    for (const std::string& m : split_list(*mu)) {
      cfg.mu_values.push_back(parse_double("solver.mu", m));
    }
    if (cfg.mu_values.empty()) throw ConfigError("solver.mu", "empty list");
  }
  for (double mu : cfg.mu_values) {
    if (!(mu > 0.0)) throw ConfigError("solver.mu", "must be > 0");
  }

  SolverParams& sp = cfg.solver;
  sp.mu = cfg.mu_values.front();
  sp.lambda = e.number("solver.lambda", sp.lambda);
  sp.r = e.number("solver.r", sp.r);
  sp.n_electrons = e.number("solver.N", sp.n_electrons);
  sp.tol = e.number("solver.tol", sp.tol);
  sp.max_iter = e.integer("solver.max_iter", sp.max_iter);
  sp.record_every = e.integer("solver.record_every", sp.record_every);
  check_params(sp, dimension > 0 ? dimension : static_cast<Index>(1) << 40);

  if (auto out = e.path("output.dir")) cfg.output_dir = *out;
  cfg.initial = e.existing_path("solver.initial");

  const char* ref_keys[] = {"reference.P", "reference.Q", "reference.R", "reference.b",
                            "reference.d"};
  std::optional<fs::path> ref[5];
  int given = 0;
  for (int i = 0; i < 5; ++i) {
    ref[i] = e.existing_path(ref_keys[i]);
    given += ref[i].has_value();
  }
  if (given != 0 && given != 5) {
    for (int i = 0; i < 5; ++i) {
      if (!ref[i]) throw ConfigError(ref_keys[i], "all five reference matrices are required");
    }
  }
  if (given == 5) cfg.reference = SaddleReferencePaths{*ref[0], *ref[1], *ref[2], *ref[3], *ref[4]};

  if (auto sites = e.take("diagnose.sites")) {
    for (const std::string& s : split_list(*sites)) {
      const long site = parse_integer("diagnose.sites", s);
      if (site < 0 || (dimension > 0 && site >= dimension)) {
        throw ConfigError("diagnose.sites", "site " + s + " out of range");
      }
      cfg.sites.push_back(site);
    }
  }
  cfg.ritz_count = e.integer("diagnose.ritz_k", 0);
  if (cfg.ritz_count < 0) throw ConfigError("diagnose.ritz_k", "must be >= 0");

  e.reject_leftovers();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? fs::path(".")
                                                            : path.parent_path());
}

SolverState load_reference(const SaddleReferencePaths& paths) {
  SolverState s;
  s.P = load_matrix(paths.P.string());
  s.Q = load_matrix(paths.Q.string());
  s.R = load_matrix(paths.R.string());
  s.b = load_matrix(paths.b.string());
  s.d = load_matrix(paths.d.string());
  const Index n = s.P.n();
  if (s.Q.n() != n || s.R.n() != n || s.b.n() != n || s.d.n() != n) {
    throw DimensionError("reference matrices differ in size");
  }
  return s;
}

}  // namespace l1dm
