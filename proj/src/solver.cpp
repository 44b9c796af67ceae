#include "kmn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "kmn/stencil.hpp"

namespace kmn::solver {
namespace {

void check_order(int order) {
  if (order != 2 && order != 4)
    throw DomainError("derivative order must be 2 or 4, got " + std::to_string(order));
}

// Work buffers for repeated evaluation of the conservative right-hand side.
class RhsWorkspace {
 public:
  RhsWorkspace(std::size_t n, const KmnParams& p, double dx, int order)
      : p_(p), dx_(dx), order_(order), um_(n), un_(n), dum_(n), dun_(n) {}

  void eval(std::span<const double> u, std::span<double> out) {
    const bool conv = p_.kappa != 0.0;
    const bool disp = p_.delta != 0.0;
    if (conv) powers(u, p_.m, um_);
    if (disp) powers(u, p_.n, un_);
    if (conv) fd::periodic_derivative(um_, dx_, 1, order_, dum_);
    if (disp) fd::periodic_derivative(un_, dx_, 3, order_, dun_);
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = -(conv ? p_.kappa * dum_[i] : 0.0) - (disp ? p_.delta * dun_[i] : 0.0);
  }

 private:
  // Small positive integer exponents are unrolled; they cover every catalog case.
  static void powers(std::span<const double> u, double e, std::vector<double>& out) {
    const std::size_t n = u.size();
    if (e == 1.0) {
      for (std::size_t i = 0; i < n; ++i) out[i] = u[i];
    } else if (e == 2.0) {
      for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * u[i];
    } else if (e == 3.0) {
      for (std::size_t i = 0; i < n; ++i) out[i] = u[i] * u[i] * u[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        try {
          out[i] = spow(u[i], e);
        } catch (const DomainError& err) {
          throw SingularNodeError(i, err.what());
        }
      }
    }
  }

  KmnParams p_;
  double dx_;
  int order_;
  std::vector<double> um_, un_, dum_, dun_;
};

class Rk4 {
 public:
  Rk4(std::size_t n, const KmnParams& p, double dx, int order)
      : rhs_(n, p, dx, order), k1_(n), k2_(n), k3_(n), k4_(n), stage_(n) {}

  // Advances u in place.
  void step(std::vector<double>& u, double dt, long step_index, double t) {
    const std::size_t n = u.size();
    rhs_.eval(u, k1_);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = u[i] + 0.5 * dt * k1_[i];
    rhs_.eval(stage_, k2_);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = u[i] + 0.5 * dt * k2_[i];
    rhs_.eval(stage_, k3_);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = u[i] + dt * k3_[i];
    rhs_.eval(stage_, k4_);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
      finite = finite && std::isfinite(u[i]);
    }
    if (!finite) throw BlowUpError(step_index, t + dt, "non-finite value after RK4 step");
  }

 private:
  RhsWorkspace rhs_;
  std::vector<double> k1_, k2_, k3_, k4_, stage_;
};

// max |u|^e, from the extreme |u| so pow runs once.
double max_power(std::span<const double> u, double e) {
  if (e == 0.0) return 1.0;
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (double v : u) {
    const double a = std::abs(v);
    hi = std::max(hi, a);
    lo = std::min(lo, a);
  }
  if (e > 0.0) return e == 1.0 ? hi : std::pow(hi, e);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(lo, e);
}

double stable_dt(std::span<const double> u, double dx, const KmnParams& p, double cfl_limit) {
  constexpr double kFloor = 1e-12;
  const double disp = std::abs(p.delta * p.n);
  if (disp > 0.0) {
    const double amp = std::max(max_power(u, p.n - 1.0), kFloor);
    return cfl_limit * dx * dx * dx / (disp * amp);
  }
  const double conv = std::abs(p.kappa * p.m);
  if (conv > 0.0) {
    const double amp = std::max(max_power(u, p.m - 1.0), kFloor);
    return cfl_limit * dx / (conv * amp);
  }
  throw DomainError("equation has no active terms; dt cannot be chosen automatically");
}

}  // namespace

CentralDifferences::CentralDifferences(int order) : order_(order) { check_order(order); }

std::vector<double> CentralDifferences::d1(const Field& u) const {
  return fd::periodic_derivative(u.values(), u.grid().dx(), 1, order_);
}
std::vector<double> CentralDifferences::d2(const Field& u) const {
  return fd::periodic_derivative(u.values(), u.grid().dx(), 2, order_);
}
std::vector<double> CentralDifferences::d3(const Field& u) const {
  return fd::periodic_derivative(u.values(), u.grid().dx(), 3, order_);
}

Field d1(const Field& u, int order) { return u.with_values(CentralDifferences(order).d1(u)); }
Field d3(const Field& u, int order) { return u.with_values(CentralDifferences(order).d3(u)); }

void validate(const SolverConfig& cfg) {
  check_order(cfg.derivative_order);
  if (cfg.dt && !(*cfg.dt > 0.0)) throw DomainError("dt must be positive");
  if (cfg.record_every < 1) throw DomainError("record_every must be a positive integer");
  if (!(cfg.cfl_limit > 0.0)) throw DomainError("cfl_limit must be positive");
  if (!std::isfinite(cfg.t_end)) throw DomainError("t_end must be finite");
}

double auto_dt(const Field& u, const KmnParams& p, double cfl_limit) {
  return stable_dt(u.values(), u.grid().dx(), p, cfl_limit);
}

Field step_rk4(const Field& u, double dt, const KmnParams& p, int order, long step_index) {
  check_order(order);
  Rk4 rk(u.size(), p, u.grid().dx(), order);
  std::vector<double> v(u.values().begin(), u.values().end());
  rk.step(v, dt, step_index, u.time());
  return Field(u.grid(), std::move(v), u.time() + dt);
}

double rhs_cross_check(const Field& u, const KmnParams& p, int order) {
  const CentralDifferences deriv(order);
  const Field a = pde_rhs_conservative(u, p, deriv);
  const Field b = pde_rhs(u, p, deriv);
  double mx = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

Trajectory simulate(const Field& u0, const KmnParams& p, const SolverConfig& cfg) {
  validate(p);
  validate(cfg);
  const CentralDifferences deriv(cfg.derivative_order);
  const bool with_energy = p.n == 1.0;

  Trajectory traj;
  auto record = [&](const Field& f) {
    traj.snapshots.push_back(f);
    traj.conserved.push_back(conserved_quantities(f, p, deriv, with_energy));
  };

  Rk4 rk(u0.size(), p, u0.grid().dx(), cfg.derivative_order);
  std::vector<double> u(u0.values().begin(), u0.values().end());
  double t = u0.time();
  record(u0);

  // Steps shorter than this relative to t_end are absorbed into the previous one.
  const double t_eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
  long step = 0;
  std::vector<double> before(u.size());
  while (cfg.t_end - t > t_eps) {
    double dt = cfg.dt ? *cfg.dt : stable_dt(u, u0.grid().dx(), p, cfg.cfl_limit);
    if (t + dt > cfg.t_end - t_eps) dt = cfg.t_end - t;
    before.assign(u.begin(), u.end());
    try {
      rk.step(u, dt, step, t);
    } catch (const BlowUpError& e) {
      throw SimulationBlowUp(e, std::move(traj), Field(u0.grid(), before, t));
    }
    ++step;
    t = (cfg.t_end - (t + dt) <= t_eps) ? cfg.t_end : t + dt;
    const bool last = cfg.t_end - t <= t_eps;
    if (last || step % cfg.record_every == 0) record(Field(u0.grid(), u, t));
  }
  traj.steps = step;
  return traj;
}

}  // namespace kmn::solver
