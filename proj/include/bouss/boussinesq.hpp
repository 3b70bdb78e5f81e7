/// @file boussinesq.hpp
/// @brief Semi-implicit backward-Euler time stepper for the incompressible
///        Boussinesq system, with three stabilization modes:
///          none     - plain BE-FEM,
///          standard - grad-div penalty gamma (div u, div v) inside the
///                     momentum system,
///          modular  - untouched momentum system plus a decoupled grad-div
///                     post-processing solve each step.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bouss/assemble.hpp"
#include "bouss/dofmap.hpp"
#include "bouss/mesh.hpp"
#include "bouss/sparse.hpp"

namespace bouss {

enum class StabMode { none, standard, modular };

inline const char* to_string(StabMode m) {
  switch (m) {
    case StabMode::none: return "none";
    case StabMode::standard: return "standard";
    case StabMode::modular: return "modular";
  }
  return "?";
}

enum class ElementPair { P2P1, P2P0 };

using TimeFunc = std::function<double(double, double, double)>;  // (x, y, t)

struct SolverConfig {
  double nu = 1.0;      // kinematic viscosity, Re^-1
  double kappa = 1.0;   // thermal diffusivity, 1/(Pr Re)
  double Ri = 1.0;      // Richardson number
  double gamma = 0.0;   // grad-div penalty
  double beta = 0.0;    // modular-step memory parameter
  double dt = 0.1;
  double T = 1.0;
  StabMode mode = StabMode::modular;
  ElementPair pair = ElementPair::P2P1;

  // Dirichlet data on all boundary markers; empty function = homogeneous.
  TimeFunc velocity_bc_x, velocity_bc_y;
  bool temperature_dirichlet = false;  // false = adiabatic (natural Neumann)
  TimeFunc temperature_bc;

  // Impose the velocity Dirichlet data on the correction step. With
  // homogeneous data this is exact and keeps the corrected field in the
  // constrained space. With inhomogeneous data the constrained rows leave
  // a boundary defect in the discrete energy identity, so runs that need
  // the identity to hold to solver precision should disable this and let
  // the correction act on the full space (the intermediate velocity
  // already carries the physical trace).
  bool step2_impose_bc = true;

  // optional grad-div penalty on the initial velocity projection: minimizes
  // ||u_h - u_0||^2 + lambda ||div u_h||^2 instead of the plain L2 distance,
  // so the discrete initial field starts near the divergence noise floor
  // instead of carrying O(h^2) pointwise divergence into the run
  double init_graddiv_penalty = 0.0;

  double solve_tol = 1e-10;

  void check() const {
    if (!(nu > 0.0) || !(kappa > 0.0))
      throw std::invalid_argument("SolverConfig: nu and kappa must be positive");
    if (gamma < 0.0 || beta < 0.0)
      throw std::invalid_argument("SolverConfig: gamma and beta must be nonnegative");
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
    const double steps = T / dt;
    if (!(T > 0.0) || std::abs(steps - std::round(steps)) > 1e-8 * std::max(1.0, steps))
      throw std::invalid_argument("SolverConfig: T/dt must be a positive integer");
  }
  int num_steps() const { return static_cast<int>(std::round(T / dt)); }
};

struct StepReport {
  int step = 0;
  double t = 0.0;
  double u_l2 = 0.0;         // ||u_h||_L2
  double div_u_l2 = 0.0;     // ||div u_h||_L2
  double theta_l2 = 0.0;     // ||theta_h||_L2
  double energy_residual = 0.0;        // Step-2 energy identity, relative
  double div_constraint = 0.0;         // ||B u~|| / ||u~||, Step-1 constraint
  LinearSolveReport momentum_solve, temperature_solve, graddiv_solve;
};

struct State {
  int n = 0;
  Vector u;       // corrected velocity, component-blocked
  Vector u_tilde; // Step-1 intermediate velocity
  Vector p;
  Vector theta;
};

struct DivergedError : std::runtime_error {
  int step;
  DivergedError(int s, const std::string& what) : std::runtime_error(what), step(s) {}
};

class BoussinesqSolver {
 public:
  BoussinesqSolver(const Mesh& mesh, SolverConfig config)
      : mesh_(mesh), cfg_(std::move(config)) {
    cfg_.check();
    vel_ = build_dofmap(mesh_, ElementKind::P2);
    pres_ = build_dofmap(mesh_, cfg_.pair == ElementPair::P2P1 ? ElementKind::P1
                                                               : ElementKind::P0);
    temp_ = build_dofmap(mesh_, ElementKind::P2);

    Ms_ = assemble_mass(vel_);
    Ks_ = assemble_stiffness(vel_, 1.0);
    Mv_ = block_diag2(Ms_);
    Kv_ = block_diag2(Ks_);
    G_ = assemble_graddiv(vel_);
    B_ = assemble_divergence(vel_, pres_);
    Mt_ = assemble_mass(temp_);
    Kt_ = assemble_stiffness(temp_, 1.0);
    mass_lu_.emplace(Ms_);
    temp_mass_lu_.emplace(Mt_);

    pressure_weight_ = assemble_load([](double, double) { return 1.0; }, pres_);
    domain_area_ = pressure_weight_.sum();

    vel_bdofs_ = all_boundary_dofs(vel_);
    temp_bdofs_ = cfg_.temperature_dirichlet ? all_boundary_dofs(temp_) : std::vector<int>{};

    if (cfg_.mode == StabMode::modular) {
      SparseMatrix S = Mv_ + (cfg_.beta + cfg_.gamma * cfg_.dt) * G_;
      if (cfg_.step2_impose_bc && !vel_bdofs_.empty()) {
        Vector dummy = Vector::Zero(S.rows());
        std::vector<int> dofs;
        std::vector<double> vals;
        velocity_constraints(0.0, dofs, vals);  // pattern only; values redone per step
        std::vector<double> zeros(dofs.size(), 0.0);
        apply_dirichlet(S, dummy, dofs, zeros);
      }
      step2_lu_.emplace(std::move(S));
    }
  }

  const DofMap& velocity_dofmap() const { return vel_; }
  const DofMap& pressure_dofmap() const { return pres_; }
  const DofMap& temperature_dofmap() const { return temp_; }
  const SparseMatrix& velocity_mass() const { return Mv_; }
  const SparseMatrix& graddiv_matrix() const { return G_; }
  const SparseMatrix& divergence_matrix() const { return B_; }
  const SparseMatrix& temperature_mass() const { return Mt_; }
  const SolverConfig& config() const { return cfg_; }
  const State& state() const { return state_; }
  State& mutable_state() { return state_; }

  /// L2-orthogonal projection of the initial data.
  void initialize(const ScalarFunc& u0x, const ScalarFunc& u0y, const ScalarFunc& theta0) {
    const int n = vel_.n_dofs;
    state_.n = 0;
    state_.u = Vector::Zero(2 * n);
    auto project = [&](const LuOperator& lu, const ScalarFunc& f, const DofMap& dm) {
      auto [x, rep] = lu.solve(assemble_load(f, dm), 1e-12);
      return x;
    };
    if (cfg_.init_graddiv_penalty > 0.0 && (u0x || u0y)) {
      // the penalty couples the components, so solve the blocked system
      Vector load = Vector::Zero(2 * n);
      if (u0x) load.head(n) = assemble_load(u0x, vel_);
      if (u0y) load.tail(n) = assemble_load(u0y, vel_);
      const LuOperator lu(SparseMatrix(Mv_ + cfg_.init_graddiv_penalty * G_));
      auto [x, rep] = lu.solve(load, 1e-10);
      state_.u = std::move(x);
    } else {
      if (u0x) state_.u.head(n) = project(*mass_lu_, u0x, vel_);
      if (u0y) state_.u.tail(n) = project(*mass_lu_, u0y, vel_);
    }
    state_.u_tilde = state_.u;
    state_.p = Vector::Zero(pres_.n_dofs);
    state_.theta = theta0 ? project(*temp_mass_lu_, theta0, temp_)
                          : Vector::Zero(temp_.n_dofs);
  }

  /// One full time step: Step-1 velocity/pressure, Step-1 temperature,
  /// then the modular grad-div correction. Forcings are evaluated at t^{n+1}.
  StepReport advance(const TimeFunc& fx = {}, const TimeFunc& fy = {},
                     const TimeFunc& psi = {}) {
    const double t1 = (state_.n + 1) * cfg_.dt;
    StepReport rep;
    rep.step = state_.n + 1;
    rep.t = t1;

    const Vector u_old = state_.u;
    const Vector theta_old = state_.theta;

    step1_velocity_pressure(u_old, theta_old, fx, fy, t1, rep);
    step1_temperature(u_old, psi, t1, rep);
    if (cfg_.mode == StabMode::modular)
      step2_graddiv(u_old, t1, rep);
    else
      state_.u = state_.u_tilde;

    ++state_.n;
    rep.u_l2 = std::sqrt(std::max(0.0, state_.u.dot(Mv_ * state_.u)));
    rep.div_u_l2 = std::sqrt(std::max(0.0, state_.u.dot(G_ * state_.u)));
    rep.theta_l2 = std::sqrt(std::max(0.0, state_.theta.dot(Mt_ * state_.theta)));
    if (!std::isfinite(rep.u_l2) || !std::isfinite(rep.div_u_l2) || !std::isfinite(rep.theta_l2))
      throw DivergedError(state_.n, "non-finite norm at step " + std::to_string(state_.n));
    return rep;
  }

  /// Step-2 energy identity residual for given fields, relative to ||u~||^2.
  double energy_identity_residual(const Vector& u_tilde, const Vector& u_new,
                                  const Vector& u_old) const {
    const double lhs = u_tilde.dot(Mv_ * u_tilde);
    const Vector d = u_tilde - u_new;
    const Vector du = u_new - u_old;
    const double rhs = u_new.dot(Mv_ * u_new) + d.dot(Mv_ * d) +
                       2.0 * cfg_.gamma * cfg_.dt * u_new.dot(G_ * u_new) +
                       cfg_.beta * (u_new.dot(G_ * u_new) - u_old.dot(G_ * u_old) +
                                    du.dot(G_ * du));
    // normalize by the magnitude of the terms, not the (possibly tiny) lhs,
    // so cancellation among O(1) divergence terms is not misread as a defect
    const double scale = lhs + u_new.dot(Mv_ * u_new) + d.dot(Mv_ * d) +
                         2.0 * cfg_.gamma * cfg_.dt * u_new.dot(G_ * u_new) +
                         cfg_.beta * (u_new.dot(G_ * u_new) + u_old.dot(G_ * u_old) +
                                      du.dot(G_ * du));
    return std::abs(lhs - rhs) / std::max(scale, 1e-300);
  }

  /// Apply only the grad-div correction to a given intermediate field,
  /// leaving the rest of the state untouched (modular mode only).
  StepReport correction_only(const Vector& u_tilde, const Vector& u_old) {
    if (cfg_.mode != StabMode::modular)
      throw std::logic_error("correction_only: solver is not in modular mode");
    state_.u_tilde = u_tilde;
    StepReport rep;
    step2_graddiv(u_old, 0.0, rep);
    return rep;
  }

 private:
  void velocity_constraints(double t, std::vector<int>& dofs, std::vector<double>& vals) const {
    const int n = vel_.n_dofs;
    dofs.clear();
    vals.clear();
    for (int d : vel_bdofs_) {
      const auto& x = vel_.dof_coords[d];
      dofs.push_back(d);
      vals.push_back(cfg_.velocity_bc_x ? cfg_.velocity_bc_x(x[0], x[1], t) : 0.0);
      dofs.push_back(n + d);
      vals.push_back(cfg_.velocity_bc_y ? cfg_.velocity_bc_y(x[0], x[1], t) : 0.0);
    }
  }

  void step1_velocity_pressure(const Vector& u_old, const Vector& theta_old,
                               const TimeFunc& fx, const TimeFunc& fy, double t1,
                               StepReport& rep) {
    const int n = vel_.n_dofs;
    const int nu2 = 2 * n;
    const int np = pres_.n_dofs;

    DiscreteField adv(vel_, 2);
    for (int i = 0; i < nu2; ++i) adv.coefficients[i] = u_old[i];
    const SparseMatrix Cv = block_diag2(assemble_convection_skew(adv, vel_, vel_));

    SparseMatrix A = (1.0 / cfg_.dt) * Mv_ + cfg_.nu * Kv_ + Cv;
    if (cfg_.mode == StabMode::standard) A = A + cfg_.gamma * G_;

    Vector rhs = Vector::Zero(nu2 + np);
    rhs.head(nu2) = (1.0 / cfg_.dt) * (Mv_ * u_old);
    {
      DiscreteField th(temp_, 1);
      for (int i = 0; i < temp_.n_dofs; ++i) th.coefficients[i] = theta_old[i];
      rhs.head(nu2) += assemble_buoyancy(th, vel_, cfg_.Ri);
    }
    if (fx) rhs.head(n) += assemble_load([&](double x, double y) { return fx(x, y, t1); }, vel_);
    if (fy) rhs.segment(n, n) +=
        assemble_load([&](double x, double y) { return fy(x, y, t1); }, vel_);

    SparseMatrix saddle = compose_saddle(A, B_);
    std::vector<int> dofs;
    std::vector<double> vals;
    velocity_constraints(t1, dofs, vals);
    dofs.push_back(nu2 + pressure_pin_);  // fix one pressure dof, mean-correct after
    vals.push_back(0.0);
    apply_dirichlet(saddle, rhs, dofs, vals);

    auto [x, srep] = solve(saddle, rhs, cfg_.solve_tol);
    rep.momentum_solve = srep;
    state_.u_tilde = x.head(nu2);
    state_.p = x.tail(np);
    state_.p.array() -= pressure_weight_.dot(state_.p) / domain_area_;

    const double un = state_.u_tilde.norm();
    rep.div_constraint = (B_ * state_.u_tilde).norm() / std::max(un, 1e-300);
  }

  void step1_temperature(const Vector& u_old, const TimeFunc& psi, double t1,
                         StepReport& rep) {
    DiscreteField adv(vel_, 2);
    for (int i = 0; i < 2 * vel_.n_dofs; ++i) adv.coefficients[i] = u_old[i];
    SparseMatrix At = (1.0 / cfg_.dt) * Mt_ + cfg_.kappa * Kt_ +
                      assemble_convection_skew(adv, temp_, temp_);
    Vector rhs = (1.0 / cfg_.dt) * (Mt_ * state_.theta);
    if (psi)
      rhs += assemble_load([&](double x, double y) { return psi(x, y, t1); }, temp_);
    if (cfg_.temperature_dirichlet) {
      std::vector<int> dofs = temp_bdofs_;
      std::vector<double> vals;
      vals.reserve(dofs.size());
      for (int d : dofs) {
        const auto& x = temp_.dof_coords[d];
        vals.push_back(cfg_.temperature_bc ? cfg_.temperature_bc(x[0], x[1], t1) : 0.0);
      }
      apply_dirichlet(At, rhs, dofs, vals);
    }
    auto [th, srep] = solve(At, rhs, cfg_.solve_tol);
    rep.temperature_solve = srep;
    state_.theta = std::move(th);
  }

  void step2_graddiv(const Vector& u_old, double, StepReport& rep) {
    // solve for the increment delta = u - u~. The mass contributions of the
    // full right-hand side cancel analytically against S u~, leaving a
    // right-hand side on the scale of the penalty term; this keeps the
    // relative solve residual meaningful for large gamma, where the full
    // formulation hits the conditioning floor of double precision.
    Vector r = cfg_.beta * (G_ * (u_old - state_.u_tilde)) -
               cfg_.gamma * cfg_.dt * (G_ * state_.u_tilde);
    if (cfg_.step2_impose_bc && !vel_bdofs_.empty()) {
      // u~ already carries the Dirichlet trace, so the increment vanishes
      // on the boundary; the eliminated rows just need zero data
      std::vector<int> dofs;
      std::vector<double> vals;
      velocity_constraints(0.0, dofs, vals);
      for (std::size_t k = 0; k < dofs.size(); ++k) r[dofs[k]] = 0.0;
    }
    auto [delta, srep] = step2_lu_->solve(r, cfg_.solve_tol);
    rep.graddiv_solve = srep;
    state_.u = state_.u_tilde + delta;
    rep.energy_residual = energy_identity_residual(state_.u_tilde, state_.u, u_old);
  }

  const Mesh& mesh_;
  SolverConfig cfg_;
  DofMap vel_, pres_, temp_;
  SparseMatrix Ms_, Ks_, Mv_, Kv_, G_, B_, Mt_, Kt_;
  std::optional<LuOperator> mass_lu_, temp_mass_lu_, step2_lu_;
  Vector pressure_weight_;
  double domain_area_ = 0.0;
  std::vector<int> vel_bdofs_, temp_bdofs_;
  int pressure_pin_ = 0;
  State state_;
};

}  // namespace bouss
