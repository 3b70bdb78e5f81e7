/// @file experiments.hpp
/// @brief Experiment drivers: spatial/temporal convergence, pressure
///        robustness, Rayleigh sweep, element study, and the Marsigli
///        lock-exchange run. Each driver writes a CSV (and VTK snapshots
///        where applicable) and returns its data for programmatic checks.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bouss/boussinesq.hpp"
#include "bouss/errors.hpp"
#include "bouss/io.hpp"
#include "bouss/manufactured.hpp"

namespace bouss {

struct ExperimentOptions {
  std::string out_dir = "out";
  bool full = false;
  Config config;
};

/// Appends to <out>/run.log and mirrors to stdout.
class RunLog {
 public:
  explicit RunLog(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    file_.open(out_dir + "/run.log", std::ios::app);
  }
  void line(const std::string& s) {
    std::cout << s << "\n";
    if (file_) file_ << s << "\n";
  }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------
// Shared manufactured-solution run
// ---------------------------------------------------------------------------

struct MmsCase {
  int n = 4;  // unit-square subdivisions per side
  bool barycentric = false;
  double dt = 1e-4, T = 1e-3;
  double nu = 1.0, kappa = 1.0, Ri = 1.0;
  double gamma = 1.0, beta = 1.0;
  double init_graddiv_penalty = 0.0;
  StabMode mode = StabMode::modular;
  ElementPair pair = ElementPair::P2P1;
  ManufacturedSolution ms;
};

struct MmsResult {
  double u_linf_l2 = 0, div_linf = 0, div_l2 = 0;
  double grad_utilde_l2 = 0, grad_u_l2 = 0, theta_linf_l2 = 0, final_div = 0;
  double max_energy_residual = 0, max_div_constraint = 0;
};

/// Time-steps one manufactured-solution configuration and accumulates the
/// space-time error norms online.
inline MmsResult run_mms(const MmsCase& mc) {
  Mesh mesh = build_rect_mesh({0.0, 1.0, 0.0, 1.0, mc.n, mc.n});
  if (mc.barycentric) mesh = barycentric_refine(mesh);

  SolverConfig cfg;
  cfg.nu = mc.nu;
  cfg.kappa = mc.kappa;
  cfg.Ri = mc.Ri;
  cfg.gamma = mc.gamma;
  cfg.beta = mc.beta;
  cfg.dt = mc.dt;
  cfg.T = mc.T;
  cfg.mode = mc.mode;
  cfg.pair = mc.pair;
  cfg.init_graddiv_penalty = mc.init_graddiv_penalty;
  const ManufacturedSolution ms = mc.ms;
  cfg.velocity_bc_x = [ms](double x, double y, double t) { return ms.u1(x, y, t); };
  cfg.velocity_bc_y = [ms](double x, double y, double t) { return ms.u2(x, y, t); };
  cfg.temperature_dirichlet = true;
  cfg.temperature_bc = [ms](double x, double y, double t) { return ms.theta(x, y, t); };
  // inhomogeneous trace: keep the correction step unconstrained so the
  // discrete energy identity holds to solver precision
  cfg.step2_impose_bc = false;

  BoussinesqSolver solver(mesh, cfg);
  solver.initialize([ms](double x, double y) { return ms.u1(x, y, 0.0); },
                    [ms](double x, double y) { return ms.u2(x, y, 0.0); },
                    [ms](double x, double y) { return ms.theta(x, y, 0.0); });

  const auto f = forcing_f(ms, cfg.nu, cfg.Ri);
  const auto psi = forcing_psi(ms, cfg.kappa);
  const int N = cfg.num_steps();
  SpaceTimeErrorAccumulator acc(ms, cfg.dt, N);
  acc.observe(0, solver.state().u, solver.state().u_tilde, solver.state().theta,
              solver.velocity_dofmap(), solver.temperature_dofmap());

  MmsResult res;
  for (int n = 0; n < N; ++n) {
    const StepReport rep = solver.advance(f[0], f[1], psi);
    res.max_energy_residual = std::max(res.max_energy_residual, rep.energy_residual);
    res.max_div_constraint = std::max(res.max_div_constraint, rep.div_constraint);
    acc.observe(n + 1, solver.state().u, solver.state().u_tilde, solver.state().theta,
                solver.velocity_dofmap(), solver.temperature_dofmap());
  }
  res.u_linf_l2 = acc.u_linf_l2();
  res.div_linf = acc.div_linf();
  res.div_l2 = acc.div_l2();
  res.grad_utilde_l2 = acc.grad_utilde_l2();
  res.grad_u_l2 = acc.grad_u_l2();
  res.theta_linf_l2 = acc.theta_linf_l2();
  res.final_div = acc.final_div();
  return res;
}

/// The forcing residual oracle must pass before any convergence run.
inline void preflight_forcing_oracle(const ManufacturedSolution& ms, double nu, double kappa,
                                     double Ri, RunLog& log) {
  const double r = forcing_residual_fd(ms, nu, kappa, Ri);
  log.line("forcing oracle: max finite-difference residual = " + format_full(r));
  if (!(r <= 1e-6))
    throw std::runtime_error("forcing oracle failed: residual " + format_full(r) + " > 1e-6");
}

// ---------------------------------------------------------------------------
// Experiment drivers
// ---------------------------------------------------------------------------

struct RateStudyResult {
  std::vector<double> params;  // h or dt
  std::vector<MmsResult> rows;
  std::vector<double> rates_u, rates_grad;
};

inline std::string rate_cell(const std::vector<double>& errs, std::size_t i) {
  if (i == 0) return "-";
  return format_full(std::log2(errs[i - 1] / errs[i]));
}

/// Spatial convergence on meshes h = 1/4 .. 1/32 (1/64 with full).
inline RateStudyResult run_spatial_rates(const ExperimentOptions& opt) {
  RunLog log(opt.out_dir);
  log.line("experiment spatial-rates: spatial velocity errors and convergence rates");
  ManufacturedSolution ms;
  preflight_forcing_oracle(ms, 1.0, 1.0, 1.0, log);

  std::vector<double> divisions = opt.config.get_list("meshes", {4, 8, 16, 32});
  if (opt.full && !opt.config.has("meshes")) divisions.push_back(64);

  RateStudyResult out;
  CsvTable csv;
  csv.header = {"h", "|||u-u_h|||_{inf,0}", "rate", "|||div(u-u_h)|||_{inf,0}", "rate",
                "|||div(u-u_h)|||_{2,0}", "rate", "|||grad(u-u~_h)|||_{2,0}", "rate"};
  std::vector<double> ue, de_inf, de_2, ge;
  for (double d : divisions) {
    MmsCase mc;
    mc.n = static_cast<int>(d);
    mc.dt = opt.config.get_double("dt", 1e-4);
    mc.T = opt.config.get_double("T", 1e-3);
    mc.gamma = opt.config.get_double("gamma", 1.0);
    mc.beta = opt.config.get_double("beta", 1.0);
    const MmsResult r = run_mms(mc);
    out.params.push_back(1.0 / d);
    out.rows.push_back(r);
    ue.push_back(r.u_linf_l2);
    de_inf.push_back(r.div_linf);
    de_2.push_back(r.div_l2);
    ge.push_back(r.grad_utilde_l2);
    csv.rows.push_back({"1/" + std::to_string(static_cast<int>(d)), format_full(r.u_linf_l2),
                        rate_cell(ue, ue.size() - 1), format_full(r.div_linf),
                        rate_cell(de_inf, de_inf.size() - 1), format_full(r.div_l2),
                        rate_cell(de_2, de_2.size() - 1), format_full(r.grad_utilde_l2),
                        rate_cell(ge, ge.size() - 1)});
    log.line("h=1/" + std::to_string(static_cast<int>(d)) +
             "  u_err=" + format_full(r.u_linf_l2) +
             "  grad_err=" + format_full(r.grad_utilde_l2) +
             "  energy_res=" + format_full(r.max_energy_residual));
  }
  if (ue.size() >= 2) {
    out.rates_u = fit_rates(ue);
    out.rates_grad = fit_rates(ge);
  }
  write_csv(csv, opt.out_dir + "/spatial-rates.csv");
  return out;
}

/// Temporal convergence on a fixed mesh, dt = 1/4 .. 1/64.
inline RateStudyResult run_temporal_rates(const ExperimentOptions& opt) {
  RunLog log(opt.out_dir);
  log.line("experiment temporal-rates: temporal velocity errors and convergence rates");
  ManufacturedSolution ms;
  preflight_forcing_oracle(ms, 1.0, 1.0, 1.0, log);

  const int mesh_n = opt.config.get_int("mesh", opt.full ? 64 : 32);
  const std::vector<double> dts = opt.config.get_list("dts", {0.25, 0.125, 0.0625, 0.03125, 0.015625});

  RateStudyResult out;
  CsvTable csv;
  csv.header = {"dt", "|||u-u_h|||_{inf,0}", "rate", "|||div(u-u_h)|||_{inf,0}",
                "|||div(u-u_h)|||_{2,0}", "|||grad(u-u~_h)|||_{2,0}", "rate"};
  std::vector<double> ue, ge;
  for (double dt : dts) {
    MmsCase mc;
    mc.n = mesh_n;
    mc.dt = dt;
    mc.T = opt.config.get_double("T", 1.0);
    // fresh strong penalty each step (no memory term) and a div-penalized
    // initial projection: the divergence columns then sit at the
    // stabilization noise floor instead of carrying the plain projection's
    // O(h^2) divergence, at level 0 through the time-quadrature norm and
    // at later levels through the memory term
    mc.gamma = opt.config.get_double("gamma", 1e3);
    mc.beta = opt.config.get_double("beta", 0.0);
    mc.init_graddiv_penalty = opt.config.get_double("init_penalty", 1.0);
    const MmsResult r = run_mms(mc);
    out.params.push_back(dt);
    out.rows.push_back(r);
    ue.push_back(r.u_linf_l2);
    ge.push_back(r.grad_utilde_l2);
    // divergence columns sit at the solver-noise floor: no rate is claimed
    csv.rows.push_back({format_full(dt), format_full(r.u_linf_l2), rate_cell(ue, ue.size() - 1),
                        format_full(r.div_linf), format_full(r.div_l2),
                        format_full(r.grad_utilde_l2), rate_cell(ge, ge.size() - 1)});
    log.line("dt=" + format_full(dt) + "  u_err=" + format_full(r.u_linf_l2) +
             "  div_inf=" + format_full(r.div_linf));
  }
  if (ue.size() >= 2) {
    out.rates_u = fit_rates(ue);
    out.rates_grad = fit_rates(ge);
  }
  write_csv(csv, opt.out_dir + "/temporal-rates.csv");
  return out;
}

struct ComparisonRow {
  double param = 0;  // h or Ra
  MmsResult none, standard, modular;
};

/// Large-pressure robustness comparison of the three modes.
inline std::vector<ComparisonRow> run_pressure_robust(const ExperimentOptions& opt) {
  RunLog log(opt.out_dir);
  log.line("experiment pressure-robust: velocity errors under a large pressure gradient");
  ManufacturedSolution ms;
  ms.pressure = ManufacturedSolution::Pressure::steep;
  ms.pressure_amplitude = opt.config.get_double("pressure_amplitude", 1000.0);
  const double Ra = opt.config.get_double("Ra", 100.0);  // Ri = Ra with Re = Pr = 1
  preflight_forcing_oracle(ms, 1.0, 1.0, Ra, log);

  std::vector<double> divisions = opt.config.get_list("meshes", {2, 4, 8, 16});
  if (opt.full && !opt.config.has("meshes")) divisions.push_back(32);

  CsvTable csv;
  csv.header = {"h",
                "|||grad(u-u_h)|||_{2,0} no-stab", "|||grad(u-u_h)|||_{2,0} standard",
                "|||grad(u-u_h)|||_{2,0} modular",
                "|||div(u-u_h)|||_{2,0} no-stab", "|||div(u-u_h)|||_{2,0} standard",
                "|||div(u-u_h)|||_{2,0} modular",
                "||div u_h^N|| no-stab", "||div u_h^N|| standard", "||div u_h^N|| modular"};
  std::vector<ComparisonRow> out;
  for (double d : divisions) {
    ComparisonRow row;
    row.param = 1.0 / d;
    for (StabMode mode : {StabMode::none, StabMode::standard, StabMode::modular}) {
      MmsCase mc;
      mc.ms = ms;
      mc.n = static_cast<int>(d);
      mc.T = opt.config.get_double("T", 0.01);
      mc.dt = opt.config.get_double("dt", mc.T / 8.0);
      mc.Ri = Ra;
      mc.gamma = mode == StabMode::none ? 0.0 : opt.config.get_double("gamma", 1e5);
      mc.beta = 0.0;
      mc.mode = mode;
      const MmsResult r = run_mms(mc);
      (mode == StabMode::none ? row.none : mode == StabMode::standard ? row.standard : row.modular) = r;
    }
    out.push_back(row);
    csv.rows.push_back({"1/" + std::to_string(static_cast<int>(d)),
                        format_full(row.none.grad_u_l2), format_full(row.standard.grad_u_l2),
                        format_full(row.modular.grad_u_l2), format_full(row.none.div_l2),
                        format_full(row.standard.div_l2), format_full(row.modular.div_l2),
                        format_full(row.none.final_div), format_full(row.standard.final_div),
                        format_full(row.modular.final_div)});
    log.line("h=1/" + std::to_string(static_cast<int>(d)) +
             "  div^N none=" + format_full(row.none.final_div) +
             "  standard=" + format_full(row.standard.final_div) +
             "  modular=" + format_full(row.modular.final_div));
  }
  write_csv(csv, opt.out_dir + "/pressure-robust.csv");
  return out;
}

/// Fixed-mesh comparison across Rayleigh numbers.
inline std::vector<ComparisonRow> run_rayleigh_sweep(const ExperimentOptions& opt) {
  RunLog log(opt.out_dir);
  log.line("experiment rayleigh-sweep: velocity errors across Rayleigh numbers");
  ManufacturedSolution ms;
  const std::vector<double> ras =
      opt.config.get_list("Ra", {1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0});
  if (ras.empty()) throw std::invalid_argument("rayleigh-sweep: empty Ra list");
  preflight_forcing_oracle(ms, 1.0, 1.0, ras.front(), log);

  const int mesh_n = opt.config.get_int("mesh", 32);
  CsvTable csv;
  csv.header = {"Ra",
                "|||grad(u-u_h)|||_{2,0} no-stab", "|||grad(u-u_h)|||_{2,0} standard",
                "|||grad(u-u_h)|||_{2,0} modular",
                "|||div(u-u_h)|||_{2,0} no-stab", "|||div(u-u_h)|||_{2,0} standard",
                "|||div(u-u_h)|||_{2,0} modular",
                "||div u_h^N|| no-stab", "||div u_h^N|| standard", "||div u_h^N|| modular"};
  std::vector<ComparisonRow> out;
  for (double Ra : ras) {
    ComparisonRow row;
    row.param = Ra;
    for (StabMode mode : {StabMode::none, StabMode::standard, StabMode::modular}) {
      MmsCase mc;
      mc.n = mesh_n;
      mc.dt = opt.config.get_double("dt", 0.1 / 32.0);
      mc.T = opt.config.get_double("T", 0.1);
      mc.Ri = Ra;  // Ra = Ri Re^2 Pr with Re = Pr = 1
      mc.gamma = mode == StabMode::none ? 0.0 : opt.config.get_double("gamma", 1e5);
      mc.beta = 0.0;
      mc.mode = mode;
      const MmsResult r = run_mms(mc);
      (mode == StabMode::none ? row.none : mode == StabMode::standard ? row.standard : row.modular) = r;
    }
    out.push_back(row);
    csv.rows.push_back({format_full(Ra), format_full(row.none.grad_u_l2),
                        format_full(row.standard.grad_u_l2), format_full(row.modular.grad_u_l2),
                        format_full(row.none.div_l2), format_full(row.standard.div_l2),
                        format_full(row.modular.div_l2), format_full(row.none.final_div),
                        format_full(row.standard.final_div), format_full(row.modular.final_div)});
    log.line("Ra=" + format_full(Ra) + "  div^N standard=" + format_full(row.standard.final_div) +
             "  modular=" + format_full(row.modular.final_div));
  }
  write_csv(csv, opt.out_dir + "/rayleigh-sweep.csv");
  return out;
}

struct ElementStudyRow {
  ElementPair pair;
  bool barycentric;
  double gamma;
  std::optional<MmsResult> standard, modular;  // modular absent for gamma = 0
};

/// Element/mesh/gamma grid at Ra = 1e6: P2/P1 and P2/P0 on barycentric and
/// plain 8x8 meshes.
inline std::vector<ElementStudyRow> run_element_study(const ExperimentOptions& opt) {
  RunLog log(opt.out_dir);
  log.line("experiment element-study: errors for element choices with varying gamma");
  ManufacturedSolution ms;
  const double Ra = opt.config.get_double("Ra", 1e6);
  preflight_forcing_oracle(ms, 1.0, 1.0, Ra, log);

  const std::vector<double> gammas =
      opt.config.get_list("gamma", {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0});
  const int mesh_n = opt.config.get_int("mesh", 8);

  CsvTable csv;
  csv.header = {"element", "mesh", "gamma",
                "|||grad(u-u_h)|||_{2,0} standard", "|||grad(u-u_h)|||_{2,0} modular",
                "|||div(u-u_h)|||_{2,0} standard", "|||div(u-u_h)|||_{2,0} modular",
                "||div u_h^N|| standard", "||div u_h^N|| modular"};
  std::vector<ElementStudyRow> out;
  for (ElementPair pair : {ElementPair::P2P1, ElementPair::P2P0})
    for (bool bc : {true, false}) {
      if (pair == ElementPair::P2P0 && !bc)
        log.line("warning: P2/P0 on a non-barycentric mesh does not satisfy the discrete "
                 "inf-sup condition; results reported as-is");
      for (double gamma : gammas) {
        ElementStudyRow row{pair, bc, gamma, std::nullopt, std::nullopt};
        MmsCase mc;
        mc.n = mesh_n;
        mc.barycentric = bc;
        mc.pair = pair;
        mc.dt = opt.config.get_double("dt", 0.1 / 32.0);
        mc.T = opt.config.get_double("T", 0.1);
        mc.Ri = Ra;
        mc.gamma = gamma;
        mc.beta = 0.0;
        mc.mode = StabMode::standard;
        row.standard = run_mms(mc);
        if (gamma > 0.0) {
          mc.mode = StabMode::modular;
          row.modular = run_mms(mc);
        }
        out.push_back(row);
        const std::string elem = pair == ElementPair::P2P1 ? "P2/P1" : "P2/P0";
        const std::string meshname = bc ? "bc" : "nbc";
        auto cell = [](const std::optional<MmsResult>& r, double MmsResult::* f) {
          return r ? format_full((*r).*f) : std::string("-");
        };
        csv.rows.push_back({elem, meshname, format_full(gamma),
                            cell(row.standard, &MmsResult::grad_u_l2),
                            cell(row.modular, &MmsResult::grad_u_l2),
                            cell(row.standard, &MmsResult::div_l2),
                            cell(row.modular, &MmsResult::div_l2),
                            cell(row.standard, &MmsResult::final_div),
                            cell(row.modular, &MmsResult::final_div)});
        log.line(elem + " " + meshname + " gamma=" + format_full(gamma) + "  div^N std=" +
                 cell(row.standard, &MmsResult::final_div) + "  mod=" +
                 cell(row.modular, &MmsResult::final_div));
      }
    }
  write_csv(csv, opt.out_dir + "/element-study.csv");
  return out;
}

struct MarsigliSeries {
  StabMode mode;
  double gamma = 0, beta = 0;
  std::vector<double> t, div_u, theta_l2, kinetic_energy, theta_min, theta_max;
  double max_energy_residual = 0;
  bool completed = false;
  int last_step = 0;
};

/// Lock-exchange gravity current in [0,8]x[0,1]: hot fluid (1.5) left of
/// x = 4, cold (1.0) right, no-slip walls, insulated temperature.
inline std::vector<MarsigliSeries> run_marsigli(const ExperimentOptions& opt) {
  RunLog log(opt.out_dir);
  log.line("experiment marsigli (lock-exchange benchmark; qualitative comparison)");
  std::filesystem::create_directories(opt.out_dir + "/snapshots");

  const int ny = opt.config.get_int("ny", opt.full ? 20 : 12);
  const double dt = opt.config.get_double("dt", 0.025);
  const double T = opt.config.get_double("T", 8.0);
  const double Re = opt.config.get_double("Re", 1000.0);
  const double Ri = opt.config.get_double("Ri", 4.0);
  const double Pr = opt.config.get_double("Pr", 1.0);

  const Mesh mesh = build_rect_mesh({0.0, 8.0, 0.0, 1.0, 8 * ny, ny});
  const std::vector<double> snapshot_times = opt.config.get_list("snapshots", {2.0, 4.0, 8.0});

  std::vector<MarsigliSeries> out;
  for (StabMode mode : {StabMode::none, StabMode::standard, StabMode::modular}) {
    MarsigliSeries series;
    series.mode = mode;
    series.gamma = mode == StabMode::none ? 0.0 : opt.config.get_double("gamma", 1.0);
    series.beta = mode == StabMode::modular ? opt.config.get_double("beta", 1.0) : 0.0;

    SolverConfig cfg;
    cfg.nu = 1.0 / Re;
    cfg.kappa = 1.0 / (Pr * Re);
    cfg.Ri = Ri;
    cfg.gamma = series.gamma;
    cfg.beta = series.beta;
    cfg.dt = dt;
    cfg.T = T;
    cfg.mode = mode;
    cfg.temperature_dirichlet = false;  // adiabatic walls

    BoussinesqSolver solver(mesh, cfg);
    solver.initialize({}, {}, [](double x, double) {
      return x < 4.0 ? 1.5 : (x > 4.0 ? 1.0 : 1.25);
    });

    const std::string tag = std::string(to_string(mode));
    auto snapshot = [&](double t) {
      std::ostringstream name;
      name << opt.out_dir << "/snapshots/marsigli_" << tag << "_t" << t << ".vtk";
      write_vtk(mesh, solver.velocity_dofmap(), solver.state().u,
                solver.temperature_dofmap(), solver.state().theta, name.str());
    };
    snapshot(0.0);

    const int N = cfg.num_steps();
    auto record = [&](int n, const StepReport* rep) {
      series.t.push_back(n * dt);
      const auto& st = solver.state();
      const double div = rep ? rep->div_u_l2
                             : std::sqrt(std::max(0.0, st.u.dot(solver.graddiv_matrix() * st.u)));
      const double unorm = rep ? rep->u_l2
                               : std::sqrt(std::max(0.0, st.u.dot(solver.velocity_mass() * st.u)));
      const double thnorm =
          rep ? rep->theta_l2
              : std::sqrt(std::max(0.0, st.theta.dot(solver.temperature_mass() * st.theta)));
      series.div_u.push_back(div);
      series.kinetic_energy.push_back(0.5 * unorm * unorm);
      series.theta_l2.push_back(thnorm);
      series.theta_min.push_back(st.theta.minCoeff());
      series.theta_max.push_back(st.theta.maxCoeff());
    };
    record(0, nullptr);

    try {
      for (int n = 0; n < N; ++n) {
        const StepReport rep = solver.advance();
        record(n + 1, &rep);
        series.max_energy_residual = std::max(series.max_energy_residual, rep.energy_residual);
        series.last_step = n + 1;
        for (double ts : snapshot_times)
          if (std::abs((n + 1) * dt - ts) < 0.5 * dt) snapshot(ts);
      }
      series.completed = true;
    } catch (const DivergedError& e) {
      log.line(tag + ": diverged at step " + std::to_string(e.step) + " (" + e.what() + ")");
      snapshot(series.last_step * dt);  // last good state
    }

    CsvTable csv;
    csv.header = {"t", "||div u_h||", "||theta_h||", "kinetic_energy", "theta_min", "theta_max"};
    for (std::size_t i = 0; i < series.t.size(); ++i)
      csv.rows.push_back({format_full(series.t[i]), format_full(series.div_u[i]),
                          format_full(series.theta_l2[i]), format_full(series.kinetic_energy[i]),
                          format_full(series.theta_min[i]), format_full(series.theta_max[i])});
    write_csv(csv, opt.out_dir + "/marsigli_" + tag + ".csv");
    log.line(tag + ": " + (series.completed ? "completed" : "stopped") + " at t=" +
             format_full(series.last_step * dt) +
             "  max ||div u||=" + format_full(*std::max_element(series.div_u.begin(),
                                                                series.div_u.end())));
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace bouss
