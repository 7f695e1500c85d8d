#include "gibbslim/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gibbslim/errors.hpp"

namespace gibbslim::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

Real to_real(const std::string& key, const std::string& s) {
  char* end = nullptr;
  const Real v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    bad(key, "expected a finite number, got '" + s + "'");
  return v;
}

long long to_ll(const std::string& key, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    bad(key, "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  if (!s.empty() && s[0] == '-') bad(key, "expected a nonnegative integer");
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    bad(key, "expected a nonnegative integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  bad(key, "expected true or false, got '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

RealVector to_real_list(const std::string& key, const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.empty()) bad(key, "expected a comma-separated list");
  RealVector v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Index>(i)) = to_real(key, parts[i]);
  return v;
}

bool is_model_key(const std::string& k) { return k.rfind("model.", 0) == 0; }
bool is_truncation_key(const std::string& k) { return k.rfind("truncation.", 0) == 0; }
bool is_interaction_key(const std::string& k) { return k.rfind("interaction.", 0) == 0; }
bool is_scf_key(const std::string& k) { return k.rfind("scf.", 0) == 0; }

bool known_key(const std::string& k) {
  static const char* keys[] = {
      "mode", "seed", "output.basename",
      "model.eigenvalues", "model.modes", "model.nu",
      "model.grid.half_width", "model.grid.points", "model.grid.exponent_a",
      "model.grid.tol",
      "interaction.rank1.weights", "interaction.rank1.vectors",
      "interaction.kernel.type", "interaction.kernel.amplitude",
      "interaction.kernel.width",
      "sweep.temperatures", "sweep.particles",
      "coupling.lambda", "coupling.non_paper_regime",
      "mc.samples",
      "truncation.eps", "truncation.max_dim",
      "scf.tol", "scf.max_iter", "scf.damping",
      "boltzon.k_max"};
  for (const char* s : keys)
    if (k == s) return true;
  return false;
}

bool allowed_for_mode(const std::string& mode, const std::string& k) {
  if (k == "mode" || k == "seed" || k == "output.basename" || is_model_key(k))
    return true;
  if (mode == "onebody") return false;
  if (is_interaction_key(k))
    return mode == "bosonic" || mode == "boltzon" || mode == "measure-check";
  if (k == "sweep.temperatures")
    return mode == "bosonic" || mode == "boltzon" || mode == "free-check";
  if (k == "sweep.particles") return mode == "boltzon";
  if (k == "coupling.lambda")
    return mode == "bosonic" || mode == "boltzon" || mode == "measure-check";
  if (k == "coupling.non_paper_regime") return mode == "bosonic";
  if (k == "mc.samples") return mode == "bosonic" || mode == "measure-check";
  if (is_truncation_key(k)) return mode == "bosonic" || mode == "free-check";
  if (is_scf_key(k) || k == "boltzon.k_max") return mode == "boltzon";
  return false;
}

}  // namespace

StudyConfig parse_config(const std::string& text) {
  StudyConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line is not 'key = value': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line with empty key");
    if (value.empty()) bad(key, "empty value");
    if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
    if (!cfg.raw.emplace(key, value).second)
      throw ConfigError("duplicate config key '" + key + "'");
  }

  const auto get = [&](const std::string& k) -> const std::string* {
    const auto it = cfg.raw.find(k);
    return it == cfg.raw.end() ? nullptr : &it->second;
  };

  const std::string* mode = get("mode");
  if (!mode) throw ConfigError("config key 'mode' is required");
  cfg.mode = *mode;
  if (cfg.mode != "onebody" && cfg.mode != "bosonic" && cfg.mode != "boltzon" &&
      cfg.mode != "measure-check" && cfg.mode != "free-check")
    bad("mode", "must be one of onebody, bosonic, boltzon, measure-check, free-check");

  for (const auto& [k, v] : cfg.raw)
    if (!allowed_for_mode(cfg.mode, k))
      throw ConfigError("config key '" + k + "' is not used in mode '" + cfg.mode + "'");

  if (const auto* v = get("seed")) cfg.seed = to_u64("seed", *v);
  if (const auto* v = get("output.basename")) cfg.basename = *v;
  if (cfg.basename.empty()) cfg.basename = cfg.mode;

  // model: explicit eigenvalues or a grid problem, never both
  const bool has_eigs = get("model.eigenvalues") != nullptr;
  const bool has_grid = get("model.grid.half_width") || get("model.grid.points") ||
                        get("model.grid.exponent_a") || get("model.grid.tol");
  if (has_eigs == has_grid)
    throw ConfigError("give exactly one of model.eigenvalues or model.grid.*");
  if (has_eigs) {
    cfg.eigenvalues = to_real_list("model.eigenvalues", *get("model.eigenvalues"));
    for (Index j = 0; j < cfg.eigenvalues.size(); ++j) {
      if (cfg.eigenvalues(j) <= 0) bad("model.eigenvalues", "entries must be positive");
      if (j > 0 && cfg.eigenvalues(j) < cfg.eigenvalues(j - 1))
        bad("model.eigenvalues", "entries must be ascending");
    }
    cfg.modes = static_cast<int>(cfg.eigenvalues.size());
    if (const auto* v = get("model.modes"))
      if (to_ll("model.modes", *v) != cfg.modes)
        bad("model.modes", "does not match the eigenvalue count");
    if (get("model.nu")) bad("model.nu", "needs a grid model");
  } else {
    const auto* hw = get("model.grid.half_width");
    const auto* pts = get("model.grid.points");
    const auto* ea = get("model.grid.exponent_a");
    const auto* km = get("model.modes");
    if (!hw || !pts || !ea || !km)
      throw ConfigError(
          "grid model needs model.grid.half_width, model.grid.points, "
          "model.grid.exponent_a and model.modes");
    model::GridSpec g;
    g.half_width = to_real("model.grid.half_width", *hw);
    g.points = static_cast<int>(to_ll("model.grid.points", *pts));
    g.exponent_a = to_real("model.grid.exponent_a", *ea);
    cfg.grid = g;
    cfg.modes = static_cast<int>(to_ll("model.modes", *km));
    if (const auto* v = get("model.grid.tol")) {
      cfg.grid_tol = to_real("model.grid.tol", *v);
      if (cfg.grid_tol <= 0) bad("model.grid.tol", "must be positive");
    }
    if (const auto* v = get("model.nu")) cfg.nu = to_real("model.nu", *v);
  }
  if (cfg.modes < 1) bad("model.modes", "need at least one mode");

  // interaction
  const bool r1w = get("interaction.rank1.weights") != nullptr;
  const bool r1v = get("interaction.rank1.vectors") != nullptr;
  if (r1w != r1v)
    throw ConfigError("interaction.rank1.weights and .vectors go together");
  const bool kernel = get("interaction.kernel.type") != nullptr;
  if (r1w && kernel) throw ConfigError("give one interaction spec, not two");
  if (r1w) {
    cfg.has_rank1 = true;
    cfg.rank1_weights = to_real_list("interaction.rank1.weights",
                                     *get("interaction.rank1.weights"));
    if (cfg.rank1_weights.minCoeff() < 0)
      bad("interaction.rank1.weights", "weights must be nonnegative");
    for (const std::string& part :
         split(*get("interaction.rank1.vectors"), ';')) {
      const RealVector v = to_real_list("interaction.rank1.vectors", part);
      if (v.size() != cfg.modes)
        bad("interaction.rank1.vectors", "each vector needs one entry per mode");
      cfg.rank1_vectors.push_back(v.cast<Complex>());
    }
    if (static_cast<Index>(cfg.rank1_vectors.size()) != cfg.rank1_weights.size())
      bad("interaction.rank1.vectors", "vector count must match weight count");
  } else if (kernel) {
    cfg.kernel_type = *get("interaction.kernel.type");
    if (cfg.kernel_type != "gaussian" && cfg.kernel_type != "constant")
      bad("interaction.kernel.type", "must be gaussian or constant");
    const auto* amp = get("interaction.kernel.amplitude");
    if (!amp) throw ConfigError("interaction.kernel.amplitude is required");
    cfg.kernel_amplitude = to_real("interaction.kernel.amplitude", *amp);
    const auto* width = get("interaction.kernel.width");
    if (cfg.kernel_type == "gaussian") {
      if (!width) throw ConfigError("gaussian kernel needs interaction.kernel.width");
      cfg.kernel_width = to_real("interaction.kernel.width", *width);
      if (cfg.kernel_width <= 0) bad("interaction.kernel.width", "must be positive");
    } else if (width) {
      bad("interaction.kernel.width", "only the gaussian kernel has a width");
    }
    if (!cfg.grid) throw ConfigError("kernel interactions need a grid model");
  } else {
    if (get("interaction.kernel.amplitude") || get("interaction.kernel.width"))
      throw ConfigError("kernel parameters without interaction.kernel.type");
  }

  // sweeps
  if (const auto* v = get("sweep.temperatures")) {
    cfg.temperatures = to_real_list("sweep.temperatures", *v);
    for (Index i = 0; i < cfg.temperatures.size(); ++i) {
      if (cfg.temperatures(i) <= 0) bad("sweep.temperatures", "must be positive");
      if (i > 0 && cfg.temperatures(i) <= cfg.temperatures(i - 1))
        bad("sweep.temperatures", "must be strictly increasing");
    }
  }
  if (const auto* v = get("sweep.particles")) {
    for (const std::string& part : split(*v, ',')) {
      const long long n = to_ll("sweep.particles", part);
      if (n < 1) bad("sweep.particles", "particle counts must be at least 1");
      cfg.particles.push_back(static_cast<int>(n));
    }
  }

  // coupling and samples
  if (const auto* v = get("coupling.lambda")) {
    cfg.lambda = to_real("coupling.lambda", *v);
    cfg.lambda_set = true;
    if (cfg.lambda < 0) bad("coupling.lambda", "must be nonnegative");
  }
  if (const auto* v = get("coupling.non_paper_regime"))
    cfg.non_paper_regime = to_bool("coupling.non_paper_regime", *v);
  if (const auto* v = get("mc.samples")) cfg.samples = to_u64("mc.samples", *v);

  if (const auto* v = get("truncation.eps")) {
    cfg.eps = to_real("truncation.eps", *v);
    if (cfg.eps <= 0) bad("truncation.eps", "must be positive");
  }
  if (const auto* v = get("truncation.max_dim")) {
    const long long d = to_ll("truncation.max_dim", *v);
    if (d < 1) bad("truncation.max_dim", "must be positive");
    cfg.max_dim = static_cast<Index>(d);
  }

  if (const auto* v = get("scf.tol")) {
    cfg.scf_tol = to_real("scf.tol", *v);
    if (cfg.scf_tol <= 0) bad("scf.tol", "must be positive");
  }
  if (const auto* v = get("scf.max_iter")) {
    cfg.scf_max_iter = static_cast<int>(to_ll("scf.max_iter", *v));
    if (cfg.scf_max_iter < 1) bad("scf.max_iter", "must be at least 1");
  }
  if (const auto* v = get("scf.damping")) {
    cfg.scf_damping = to_real("scf.damping", *v);
    if (!(cfg.scf_damping > 0 && cfg.scf_damping <= 1))
      bad("scf.damping", "must lie in (0, 1]");
  }
  if (const auto* v = get("boltzon.k_max")) {
    cfg.k_max = static_cast<int>(to_ll("boltzon.k_max", *v));
    if (cfg.k_max < 1) bad("boltzon.k_max", "must be at least 1");
  }

  // per-mode requirements
  if (cfg.mode == "onebody" && !cfg.grid)
    throw ConfigError("onebody mode needs a grid model");
  if (cfg.mode == "bosonic" || cfg.mode == "free-check") {
    if (cfg.temperatures.size() == 0)
      throw ConfigError("sweep.temperatures is required");
  }
  if (cfg.mode == "bosonic" || cfg.mode == "measure-check") {
    if (cfg.samples == 0) throw ConfigError("mc.samples is required");
    if (cfg.samples < 1000) bad("mc.samples", "need at least 1000 samples");
  }
  if (cfg.mode == "bosonic") {
    if (cfg.lambda_set && !cfg.non_paper_regime)
      throw ConfigError(
          "fixed coupling.lambda requires coupling.non_paper_regime = true; "
          "the default scaling is lambda = 1/T");
    if (cfg.non_paper_regime && !cfg.lambda_set)
      throw ConfigError("coupling.non_paper_regime = true needs coupling.lambda");
  }
  if (cfg.mode == "boltzon") {
    if (cfg.temperatures.size() != 1)
      throw ConfigError("boltzon mode needs exactly one temperature");
    if (cfg.particles.empty()) throw ConfigError("sweep.particles is required");
    if (cfg.nu != 0) bad("model.nu", "boltzon mode has no chemical potential");
  }
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

model::SpectralModel StudyConfig::build_model() const {
  if (grid) return model::solve_onebody_spectrum(*grid, nu, modes, grid_tol);
  model::SpectralModel m;
  m.eigenvalues = eigenvalues;
  m.nu = 0;
  m.validate();
  return m;
}

model::TwoBodyOperator StudyConfig::build_interaction(const model::SpectralModel& m) const {
  if (has_rank1) return model::build_finite_rank_interaction(rank1_vectors, rank1_weights);
  if (kernel_type.empty()) return model::TwoBodyOperator{};
  if (!m.has_eigenfunctions() || !m.grid)
    throw ConfigError("kernel interactions need grid eigenfunctions");
  const int p = m.grid->points;
  const Real h = m.grid->spacing();
  RealVector samples(2 * p - 1);
  for (int d = 0; d < 2 * p - 1; ++d) {
    const Real r = (d - (p - 1)) * h;
    samples(d) = kernel_type == "gaussian"
                     ? kernel_amplitude * std::exp(-r * r / (2 * kernel_width * kernel_width))
                     : kernel_amplitude;
  }
  return model::project_multiplication_kernel(m, samples);
}

}  // namespace gibbslim::config
