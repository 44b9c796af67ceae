#ifndef KMN_SOLVER_HPP
#define KMN_SOLVER_HPP

#include <optional>
#include <vector>

#include "kmn/model.hpp"

// Method-of-lines integration of the K(m,n) equation on a periodic grid:
// central differences in x, classical RK4 in t.
namespace kmn::solver {

/// Periodic central differences of accuracy 2 or 4.
class CentralDifferences final : public Differentiator {
 public:
  explicit CentralDifferences(int order = 4);
  int order() const noexcept { return order_; }
  std::vector<double> d1(const Field& u) const override;
  std::vector<double> d2(const Field& u) const override;
  std::vector<double> d3(const Field& u) const override;

 private:
  int order_;
};

Field d1(const Field& u, int order);
Field d3(const Field& u, int order);

struct SolverConfig {
  std::optional<double> dt;  // empty: choose from the dispersive stability bound each step
  double t_end = 1.0;
  int record_every = 1;
  int derivative_order = 4;
  double cfl_limit = 0.1;
};

void validate(const SolverConfig& cfg);

/// cfl_limit * dx^3 / (delta * n * max(|u|^{n-1}, eps)). Falls back to the
/// convective bound cfl_limit * dx / (kappa * m * max|u|^{m-1}) when the
/// dispersive term is absent.
double auto_dt(const Field& u, const KmnParams& p, double cfl_limit);

/// One classical RK4 step of u_t = pde_rhs_conservative(u). A negative dt
/// steps backwards. Non-finite output raises BlowUpError carrying step_index.
Field step_rk4(const Field& u, double dt, const KmnParams& p, int order = 4, long step_index = 0);

/// max |conservative rhs - expanded rhs| over the grid.
double rhs_cross_check(const Field& u, const KmnParams& p, int order = 4);

struct Trajectory {
  std::vector<Field> snapshots;
  std::vector<ConservedSet> conserved;
  long steps = 0;
};

/// Raised by simulate() when a step produces non-finite values. Holds the
/// trajectory recorded so far and the last finite state.
class SimulationBlowUp : public BlowUpError {
 public:
  SimulationBlowUp(const BlowUpError& cause, Trajectory partial, Field last_finite)
      : BlowUpError(cause), partial_(std::move(partial)), last_finite_(std::move(last_finite)) {}
  const Trajectory& partial() const noexcept { return partial_; }
  const Field& last_finite() const noexcept { return last_finite_; }

 private:
  Trajectory partial_;
  Field last_finite_;
};

/// Integrates from u0.time() to cfg.t_end. The last step is shortened to land
/// on t_end, and the final state is always recorded. The energy column is
/// filled only for n = 1.
Trajectory simulate(const Field& u0, const KmnParams& p, const SolverConfig& cfg);

}  // namespace kmn::solver

#endif  // KMN_SOLVER_HPP
