#ifndef SADDLE23_FLOW_HPP
#define SADDLE23_FLOW_HPP

#include <functional>
#include <optional>
#include <vector>

#include "saddle23/models.hpp"
#include "saddle23/phase.hpp"

namespace s23::flow {

struct IntegratorConfig {
  enum class Method { AdaptiveHighOrder, FixedRK4 };
  Method method = Method::AdaptiveHighOrder;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double max_step = 0.25;
  double symplectic_residual_tol = 1e-8;
};

/// A time-parameterized solution with dense-output queries and, optionally,
/// the variational matrices D(psi_t). Node states are stored at the adaptive
/// steps; queries between nodes re-step the integrator from the bracketing
/// node, so interpolation carries the integrator's own accuracy.
class Trajectory {
public:
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  bool backward() const { return times_.back() < times_.front(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec4>& states() const { return states_; }
  bool has_variational() const { return !variational_.empty(); }
  const std::vector<Mat4>& variational() const { return variational_; }

  Chart chart() const { return chart_; }
  const models::HamiltonianModel& model() const { return *model_; }
  double energy() const { return energy_; }
  double max_energy_drift() const { return max_drift_; }
  bool energy_drift_flagged() const { return drift_flagged_; }
  /// Max over nodes of ||Dpsi^T J Dpsi - J||_inf (variational runs only).
  double max_symplectic_residual() const { return max_sympl_residual_; }

  PhasePoint state_at(double t) const;
  Mat4 variational_at(double t) const;

private:
  friend Trajectory integrate_impl(const models::HamiltonianModel&,
                                   const PhasePoint&, double, double,
                                   const IntegratorConfig&, bool);
  void locate(double t, int& node, double& dt) const;

  const models::HamiltonianModel* model_ = nullptr;
  IntegratorConfig cfg_;
  Chart chart_ = Chart::Global;
  std::vector<double> times_;
  std::vector<Vec4> states_;
  std::vector<Mat4> variational_;
  double energy_ = 0.0;
  double max_drift_ = 0.0;
  bool drift_flagged_ = false;
  double max_sympl_residual_ = 0.0;
};

/// Integrate the Hamiltonian flow from z0 over [t0, t1] (either direction).
Trajectory integrate(const models::HamiltonianModel& model,
                     const PhasePoint& z0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

/// Integrate the flow together with the linearized (variational) flow,
/// dU/dt = J H_ww(w(t)) U, U(t0) = Id, as one 20-dimensional system.
Trajectory integrate_variational(const models::HamiltonianModel& model,
                                 const PhasePoint& z0, double t0, double t1,
                                 const IntegratorConfig& cfg = {});

enum class Direction { Up, Down, Both };

struct Crossing {
  double t;
  PhasePoint state;
  double dgdt;
};

/// Scalar event function along a trajectory; gradient optional (used for the
/// Newton polish, finite differences otherwise).
struct Event {
  std::function<double(const Vec4&)> g;
  std::function<Vec4(const Vec4&)> grad;  // may be empty
};

/// All crossings g(w(t)) = 0 with the requested sign of dg/dt, refined on the
/// dense output to |g| < g_tol. A node that starts exactly on the section is
/// reported iff its dg/dt matches the direction filter.
std::vector<Crossing> event_crossing(const Trajectory& traj, const Event& ev,
                                     Direction dir, double g_tol = 1e-11);

}  // namespace s23::flow

#endif
