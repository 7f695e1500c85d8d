#include "gibbslim/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "gibbslim/boltzon.hpp"
#include "gibbslim/cfield.hpp"
#include "gibbslim/dense.hpp"
#include "gibbslim/fock.hpp"
#include "gibbslim/qgibbs.hpp"

namespace gibbslim::study {

namespace {

using Clock = std::chrono::steady_clock;

Real ms_since(Clock::time_point t0) {
  return std::chrono::duration<Real, std::milli>(Clock::now() - t0).count();
}

// C(n_max + modes, modes) without building anything, good enough to test a cap
Real basis_dim_estimate(int modes, Index n_max) {
  const Real lg = std::lgamma(Real(n_max + modes + 1)) -
                  std::lgamma(Real(n_max + 1)) - std::lgamma(Real(modes + 1));
  return std::exp(lg);
}

void expect_mode(const config::StudyConfig& cfg, const char* mode) {
  if (cfg.mode != mode)
    throw ConfigError(std::string("config mode '") + cfg.mode + "' does not match '" +
                      mode + "'");
}

CheckRow basic_check(std::string name, Real value, Real reference, Real se) {
  CheckRow r;
  r.name = std::move(name);
  r.value = value;
  r.reference = reference;
  r.std_error = se;
  const Real diff = std::abs(value - reference);
  if (se > 0)
    r.sigma = diff / se;
  else
    r.sigma = diff == 0 ? 0 : std::numeric_limits<Real>::infinity();
  r.pass = r.sigma <= 4;
  return r;
}

// entrywise comparison, reported at the entry with the worst z-score
CheckRow moment_check(std::string name, const cfield::MomentEstimate& est,
                      const Matrix& exact) {
  CheckRow r;
  r.name = std::move(name);
  Real worst = 0;
  for (Index i = 0; i < exact.rows(); ++i)
    for (Index j = 0; j < exact.cols(); ++j) {
      const Real diff = std::abs(est.matrix(i, j) - exact(i, j));
      const Real se = est.std_error(i, j);
      const Real sigma =
          se > 0 ? diff / se : (diff == 0 ? 0 : std::numeric_limits<Real>::infinity());
      if (sigma >= worst) {
        worst = sigma;
        r.value = diff;
        r.reference = 0;
        r.std_error = se;
      }
    }
  r.sigma = worst;
  r.pass = worst <= 4;
  return r;
}

// single-mode quadrature oracle: |alpha|^2 is exponential with rate lambda,
// reweighted by exp(-c2 u^2); returns the normalization and mean of u
std::pair<Real, Real> single_mode_reference(Real lambda, Real c2) {
  const Real upper = 60.0 / lambda;
  const int n = 40000;  // even
  const Real h = upper / n;
  auto f = [&](Real u) { return lambda * std::exp(-lambda * u - c2 * u * u); };
  Real z = f(0) + f(upper);
  Real g = upper * f(upper);
  for (int i = 1; i < n; ++i) {
    const Real u = i * h;
    const Real c = (i % 2 == 1) ? 4.0 : 2.0;
    z += c * f(u);
    g += c * u * f(u);
  }
  z *= h / 3;
  g *= h / 3;
  return {z, g / z};
}

std::vector<serialize::Cell> cells(std::initializer_list<Real> vs) {
  std::vector<serialize::Cell> row;
  for (Real v : vs) row.emplace_back(v);
  return row;
}

serialize::Report report_shell(const config::StudyConfig& cfg) {
  serialize::Report r;
  r.config_echo = cfg.raw;
  r.seed = cfg.seed;
  return r;
}

}  // namespace

RealVector free_sector_weights(const RealVector& eigenvalues, Real temperature,
                               Index n_max) {
  if (!(temperature > 0)) throw ConfigError("temperature must be positive");
  if (eigenvalues.size() == 0 || eigenvalues.minCoeff() <= 0)
    throw NonPositiveOperator("free weights need positive eigenvalues");
  if (n_max < 0) throw ConfigError("cutoff must be nonnegative");
  RealVector z = RealVector::Zero(n_max + 1);
  z(0) = 1;
  for (Index j = 0; j < eigenvalues.size(); ++j) {
    const Real x = std::exp(-eigenvalues(j) / temperature);
    RealVector nz(n_max + 1);
    for (Index t = 0; t <= n_max; ++t) {
      Real acc = 0, xp = 1;
      for (Index n = 0; n <= t; ++n) {
        acc += z(t - n) * xp;
        xp *= x;
      }
      nz(t) = acc;
    }
    z = nz;
  }
  return z;
}

Real truncated_free_energy(const RealVector& eigenvalues, Real temperature,
                           Index n_max) {
  return -temperature *
         std::log(free_sector_weights(eigenvalues, temperature, n_max).sum());
}

RealVector truncated_occupancies(const RealVector& eigenvalues, Real temperature,
                                 Index n_max) {
  const Index k = eigenvalues.size();
  const Real z_total = free_sector_weights(eigenvalues, temperature, n_max).sum();
  RealVector occ(k);
  for (Index mark = 0; mark < k; ++mark) {
    RealVector z = RealVector::Zero(n_max + 1);
    z(0) = 1;
    for (Index j = 0; j < k; ++j) {
      const Real x = std::exp(-eigenvalues(j) / temperature);
      RealVector nz(n_max + 1);
      for (Index t = 0; t <= n_max; ++t) {
        Real acc = 0, xp = 1;
        for (Index n = 0; n <= t; ++n) {
          acc += z(t - n) * (j == mark ? n * xp : xp);
          xp *= x;
        }
        nz(t) = acc;
      }
      z = nz;
    }
    occ(mark) = z.sum() / z_total;
  }
  return occ;
}

Index choose_truncation(const model::SpectralModel& m, Real temperature, Real eps,
                        Index dim_cap) {
  if (!(eps > 0)) throw ConfigError("truncation tolerance must be positive");
  if (!(temperature > 0)) throw ConfigError("temperature must be positive");
  m.validate();
  const Real ts = temperature * m.eigenvalues.cwiseInverse().sum();
  Index n = static_cast<Index>(std::ceil(ts + 6 * std::sqrt(ts) + 10));
  for (;;) {
    if (basis_dim_estimate(m.modes(), n) > Real(dim_cap) * (1 + 1e-9))
      throw DimensionOverflow("adequate cutoff exceeds the dimension cap");
    const RealVector z = free_sector_weights(m.eigenvalues, temperature, n);
    if (z(n) / z.sum() < eps) return n;
    n *= 2;
  }
}

std::vector<BosonicRow> run_bosonic_convergence(const config::StudyConfig& cfg) {
  expect_mode(cfg, "bosonic");
  const model::SpectralModel m = cfg.build_model();
  const model::TwoBodyOperator w = cfg.build_interaction(m);
  std::vector<BosonicRow> rows;
  for (Index ti = 0; ti < cfg.temperatures.size(); ++ti) {
    const auto t0 = Clock::now();
    BosonicRow row;
    row.temperature = cfg.temperatures(ti);
    const Real t = row.temperature;
    row.lambda = cfg.non_paper_regime ? cfg.lambda : 1.0 / t;
    row.n_max = choose_truncation(m, t, cfg.eps, cfg.max_dim);
    const fock::BasisPtr basis =
        fock::enumerate_basis(m.modes(), static_cast<int>(row.n_max), cfg.max_dim);
    const fock::FockOperator h0 = fock::assemble_H0(basis, m);
    const qgibbs::ThermalResult free_state = qgibbs::thermal_state(h0, t, 0);

    const bool interacting = !w.is_zero() && row.lambda != 0;
    std::optional<qgibbs::ThermalResult> inter_store;
    if (interacting) {
      const fock::FockOperator hw = fock::assemble_W(basis, w);
      const fock::FockOperator h{basis,
                                 h0.entries + hw.entries * Complex(row.lambda)};
      inter_store = qgibbs::thermal_state(h, t, row.lambda);
    }
    const qgibbs::ThermalResult& inter = inter_store ? *inter_store : free_state;

    row.tail_mass = std::max(qgibbs::truncation_adequacy(free_state),
                             qgibbs::truncation_adequacy(inter));
    if (!(row.tail_mass < cfg.eps))
      throw TailTooLarge("top-sector mass did not drop below truncation.eps");
    row.gap_over_t = (inter.free_energy - free_state.free_energy) / t;

    const Real c_cl = row.lambda * t;  // exactly 1 under the default scaling
    const std::uint32_t sid = static_cast<std::uint32_t>(4 * ti);
    const auto zr = cfield::estimate_partition(m.eigenvalues, w, c_cl,
                                               {cfg.seed, sid}, cfg.samples);
    const auto m1 = cfield::estimate_moment(m.eigenvalues, w, c_cl, 1,
                                            {cfg.seed, sid + 1}, cfg.samples);
    const auto m2 = cfield::estimate_moment(m.eigenvalues, w, c_cl, 2,
                                            {cfg.seed, sid + 2}, cfg.samples);
    row.neg_log_zr = -std::log(zr.value);
    row.neg_log_zr_stderr = zr.std_error / zr.value;
    row.e = std::abs(row.gap_over_t - row.neg_log_zr);
    row.e_err = row.neg_log_zr_stderr + 2 * row.tail_mass;

    const qgibbs::DensityMatrix g1 = qgibbs::reduced_density_matrix(inter, 1);
    row.d1 = schatten_distance(g1.matrix / t, m1.matrix, 1);
    row.d1_err = m1.std_error.sum() + row.tail_mass;
    const qgibbs::DensityMatrix g2 = qgibbs::reduced_density_matrix(inter, 2);
    row.d2 = schatten_distance(2.0 * g2.matrix / (t * t), m2.matrix, 1);
    row.d2_err = m2.std_error.sum() + row.tail_mass;

    row.wall_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BoltzonRow> run_boltzon_convergence(const config::StudyConfig& cfg) {
  expect_mode(cfg, "boltzon");
  const model::SpectralModel m = cfg.build_model();
  boltzon::MeanFieldProblem prob;
  prob.h0 = m.eigenvalues.cast<Complex>().asDiagonal();
  prob.w = cfg.build_interaction(m);
  prob.coupling = cfg.lambda;
  prob.temperature = cfg.temperatures(0);
  const boltzon::SCFResult scf =
      boltzon::scf_minimize(prob, cfg.scf_damping, cfg.scf_tol, cfg.scf_max_iter);

  const Index dense_cap = std::min<Index>(cfg.max_dim, 4096);
  std::vector<BoltzonRow> rows;
  for (int n : cfg.particles) {
    const auto t0 = Clock::now();
    const boltzon::ExactBoltzonResult ex = boltzon::exact_gibbs_distinguishable(
        prob, n, std::min(cfg.k_max, n), dense_cap);
    BoltzonRow row;
    row.n = n;
    row.free_energy_per_particle = ex.free_energy / n;
    row.mean_field_free_energy = scf.free_energy;
    row.gap = scf.free_energy - row.free_energy_per_particle;
    if (row.gap < -1e-9)
      throw NumericalError("mean-field upper bound violated beyond slack");
    row.trace_distance = schatten_distance(ex.reduced[0].matrix, scf.gamma, 1);
    row.wall_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<FreeRow> run_free_check(const config::StudyConfig& cfg) {
  expect_mode(cfg, "free-check");
  const model::SpectralModel m = cfg.build_model();
  std::vector<FreeRow> rows;
  for (Index ti = 0; ti < cfg.temperatures.size(); ++ti) {
    const auto t0 = Clock::now();
    FreeRow row;
    row.temperature = cfg.temperatures(ti);
    const Real t = row.temperature;
    row.n_max = choose_truncation(m, t, cfg.eps, cfg.max_dim);
    const fock::BasisPtr basis =
        fock::enumerate_basis(m.modes(), static_cast<int>(row.n_max), cfg.max_dim);
    const qgibbs::ThermalResult state =
        qgibbs::thermal_state(fock::assemble_H0(basis, m), t, 0);
    row.tail_mass = qgibbs::truncation_adequacy(state);
    row.free_energy = state.free_energy;
    row.closed_form = truncated_free_energy(m.eigenvalues, t, row.n_max);
    row.free_energy_err = std::abs(row.free_energy - row.closed_form);

    const qgibbs::DensityMatrix g1 = qgibbs::reduced_density_matrix(state, 1);
    const RealVector occ = truncated_occupancies(m.eigenvalues, t, row.n_max);
    Real worst = 0;
    for (Index i = 0; i < occ.size(); ++i)
      for (Index j = 0; j < occ.size(); ++j) {
        const Real ref = i == j ? occ(i) : 0.0;
        worst = std::max(worst, std::abs(g1.matrix(i, j) - Complex(ref)));
      }
    row.occupancy_err = worst;
    row.pass = row.free_energy_err <= 1e-10 * std::max(Real(1), std::abs(row.free_energy)) &&
               row.occupancy_err <= 1e-10 * std::max(Real(1), occ.maxCoeff());
    row.wall_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<CheckRow> run_measure_check(const config::StudyConfig& cfg) {
  expect_mode(cfg, "measure-check");
  const model::SpectralModel m = cfg.build_model();
  const model::TwoBodyOperator w = cfg.build_interaction(m);
  const RealVector& eigs = m.eigenvalues;
  const std::uint64_t n = cfg.samples;
  std::vector<CheckRow> rows;

  const model::TwoBodyOperator none;
  const auto zf = cfield::estimate_partition(eigs, none, 0, {cfg.seed, 0}, n);
  rows.push_back(basic_check("free_partition", zf.value, 1.0, zf.std_error));
  for (int k = 1; k <= 2; ++k) {
    const auto est = cfield::estimate_moment(
        eigs, none, 0, k, {cfg.seed, static_cast<std::uint32_t>(k)}, n);
    rows.push_back(moment_check("free_moment_" + std::to_string(k), est,
                                cfield::free_moment_exact(eigs, k)));
  }

  if (!w.is_zero()) {
    const Real c = cfg.lambda_set ? cfg.lambda : 1.0;
    const auto zi = cfield::estimate_partition(eigs, w, c, {cfg.seed, 3}, n);
    CheckRow range;
    range.name = "partition_at_most_one";
    range.value = zi.value;
    range.reference = 1.0;
    range.std_error = zi.std_error;
    range.sigma = zi.std_error > 0 ? (zi.value - 1.0) / zi.std_error : 0;
    range.pass = zi.value > 0 && range.sigma <= 4;
    rows.push_back(range);

    const auto mi = cfield::estimate_moment(eigs, w, c, 1, {cfg.seed, 4}, n);
    CheckRow herm;
    herm.name = "moment_hermitian";
    herm.value = (mi.matrix - mi.matrix.adjoint()).cwiseAbs().maxCoeff();
    herm.pass = herm.value <= 1e-12;
    rows.push_back(herm);

    if (m.modes() == 1) {
      const Real c2 = 0.5 * c * w.matrix(0, 0).real();
      const auto [z_ref, u_ref] = single_mode_reference(eigs(0), c2);
      rows.push_back(basic_check("partition_quadrature", zi.value, z_ref, zi.std_error));
      rows.push_back(basic_check("moment_quadrature", mi.matrix(0, 0).real(), u_ref,
                                 mi.std_error(0, 0)));
    }
  }
  return rows;
}

std::vector<OnebodyRow> run_onebody(const config::StudyConfig& cfg) {
  expect_mode(cfg, "onebody");
  const model::SpectralModel m = cfg.build_model();
  std::vector<OnebodyRow> rows;
  for (int j = 0; j < m.modes(); ++j)
    rows.push_back(OnebodyRow{j + 1, m.eigenvalues(j)});
  return rows;
}

serialize::Report make_report(const config::StudyConfig& cfg,
                              const std::vector<BosonicRow>& rows) {
  serialize::Report r = report_shell(cfg);
  r.columns = {"T",  "lambda", "n_max", "tail_mass", "free_energy_gap_over_T",
               "neg_log_zr", "neg_log_zr_stderr", "e", "e_err", "d1", "d1_err",
               "d2", "d2_err"};
  for (const auto& row : rows) {
    r.rows.push_back(cells({row.temperature, row.lambda, Real(row.n_max),
                            row.tail_mass, row.gap_over_t, row.neg_log_zr,
                            row.neg_log_zr_stderr, row.e, row.e_err, row.d1,
                            row.d1_err, row.d2, row.d2_err}));
    r.wall_times_ms.push_back(row.wall_ms);
  }
  return r;
}

serialize::Report make_report(const config::StudyConfig& cfg,
                              const std::vector<BoltzonRow>& rows) {
  serialize::Report r = report_shell(cfg);
  r.columns = {"N", "free_energy_per_particle", "mean_field_free_energy", "gap",
               "trace_distance"};
  for (const auto& row : rows) {
    r.rows.push_back(cells({Real(row.n), row.free_energy_per_particle,
                            row.mean_field_free_energy, row.gap,
                            row.trace_distance}));
    r.wall_times_ms.push_back(row.wall_ms);
  }
  return r;
}

serialize::Report make_report(const config::StudyConfig& cfg,
                              const std::vector<FreeRow>& rows) {
  serialize::Report r = report_shell(cfg);
  r.columns = {"T", "n_max", "tail_mass", "free_energy", "free_energy_closed_form",
               "free_energy_abs_err", "occupancy_max_abs_err", "pass"};
  for (const auto& row : rows) {
    auto c = cells({row.temperature, Real(row.n_max), row.tail_mass,
                    row.free_energy, row.closed_form, row.free_energy_err,
                    row.occupancy_err});
    c.emplace_back(std::string(row.pass ? "yes" : "no"));
    r.rows.push_back(std::move(c));
    r.wall_times_ms.push_back(row.wall_ms);
  }
  return r;
}

serialize::Report make_report(const config::StudyConfig& cfg,
                              const std::vector<CheckRow>& rows) {
  serialize::Report r = report_shell(cfg);
  r.columns = {"check", "value", "reference", "stderr", "sigma", "pass"};
  for (const auto& row : rows) {
    std::vector<serialize::Cell> c;
    c.emplace_back(row.name);
    c.emplace_back(row.value);
    c.emplace_back(row.reference);
    c.emplace_back(row.std_error);
    c.emplace_back(row.sigma);
    c.emplace_back(std::string(row.pass ? "yes" : "no"));
    r.rows.push_back(std::move(c));
  }
  return r;
}

serialize::Report make_report(const config::StudyConfig& cfg,
                              const std::vector<OnebodyRow>& rows) {
  serialize::Report r = report_shell(cfg);
  r.columns = {"j", "eigenvalue"};
  for (const auto& row : rows) r.rows.push_back(cells({Real(row.j), row.eigenvalue}));
  return r;
}

StudyOutput run_study(const config::StudyConfig& cfg) {
  StudyOutput out;
  if (cfg.mode == "bosonic") {
    out.report = make_report(cfg, run_bosonic_convergence(cfg));
  } else if (cfg.mode == "boltzon") {
    out.report = make_report(cfg, run_boltzon_convergence(cfg));
  } else if (cfg.mode == "free-check") {
    const auto rows = run_free_check(cfg);
    out.report = make_report(cfg, rows);
    for (const auto& row : rows) out.ok = out.ok && row.pass;
  } else if (cfg.mode == "measure-check") {
    const auto rows = run_measure_check(cfg);
    out.report = make_report(cfg, rows);
    for (const auto& row : rows) out.ok = out.ok && row.pass;
  } else if (cfg.mode == "onebody") {
    out.report = make_report(cfg, run_onebody(cfg));
  } else {
    throw ConfigError("unknown mode '" + cfg.mode + "'");
  }
  return out;
}

}  // namespace gibbslim::study
