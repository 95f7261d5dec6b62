#ifndef SADDLE23_ORBITS_HPP
#define SADDLE23_ORBITS_HPP

#include <optional>
#include <string>
#include <vector>

#include "saddle23/flow.hpp"
#include "saddle23/frame_index.hpp"
#include "saddle23/models.hpp"
#include "saddle23/util.hpp"

namespace s23::orbits {

struct PeriodicOrbit {
  std::string model_id;
  std::string label;  // "P2", "P3", "other"
  PhasePoint initial_state{Vec4::Zero(), Chart::Global};
  double period = 0.0;      // Hamiltonian period T^H
  double energy = 0.0;      // H value (absolute)
  double action = 0.0;      // circulation of lambda0 along the orbit
  bool action_caveat = false;
  double residual = 0.0;    // |psi_T(z0) - z0|
  std::optional<frame::CZResult> cz;
  std::optional<frame::Stability> stability;
  Mat2 monodromy = Mat2::Identity();
};

/// Integrator settings used for orbit work (tighter than the defaults).
flow::IntegratorConfig orbit_integrator();

/// The Lyapunov orbit P_{2,E} on the center manifold, at excess energy
/// e > 0 above the critical level. Exact circle for normal-form models;
/// for ham1 the planar orbit {x2 = y2 = 0} with the period from quadrature;
/// for ham2 a brake-orbit shooting near the saddle neck.
PeriodicOrbit lyapunov_p2(const models::HamiltonianModel& model, double e,
                          double residual_tol = 1e-10);

/// Period of the ham1 planar orbit by quadrature of dt = dx/y around
/// {y^2 + x^2 + x^4 = 2E} (independent oracle for the shooting route).
double ham1_p2_period_quadrature(double e, double k);

struct SymmetricSearch {
  /// Seed arc: Hill-boundary points seen from `center` at angles
  /// [angle_lo, angle_hi] (radians, in the configuration plane).
  Eigen::Vector2d center{0.0, 0.0};
  double angle_lo = 0.0;
  double angle_hi = 0.0;
  int scan_points = 80;
  /// Section {x1 = 0} crossing index at which y2 must vanish.
  int crossing_index = 1;
  double max_time = 40.0;
  double residual_tol = 1e-10;
};

/// Reversible-model brake-orbit search: scan seeds (x(sigma), y=0) on the
/// Hill boundary, shoot to the k-th crossing of {x1 = 0, dx1/dt < 0} and
/// drive y2 there to zero (Newton with the variational Jacobian, damped).
/// The returned orbit is symmetric under (x,y,t) -> (x,-y,-t) and closes to
/// `residual_tol`.
PeriodicOrbit find_symmetric_orbit(const models::HamiltonianModel& model,
                                   double e, const SymmetricSearch& search);

/// P_{3,E} for ham1: brake seeds on the x2 > 0 lobe of the Hill boundary.
PeriodicOrbit find_p3_ham1(const models::Ham1Model& model, double e);

/// Action (circulation of lambda0 = 1/2 sum (y dx - x dy)) along a periodic
/// orbit, by composite Gauss-Legendre over the dense trajectory. Throws when
/// lambda0(X_H) changes sign along the orbit (star-shape violation).
double action(const models::HamiltonianModel& model, const PeriodicOrbit& orbit);

/// Attach CZ index, transverse monodromy and stability to an orbit.
void attach_index_data(const models::HamiltonianModel& model,
                       PeriodicOrbit& orbit, int n_directions = 16);

enum class ManifoldBranch { StablePlus, StableMinus, UnstablePlus, UnstableMinus };

struct ManifoldSeed {
  ManifoldBranch branch;
  double displacement = 0.0;
  std::vector<double> phases;      // orbit phases of the fibers
  std::vector<Vec4> points;        // seeds, on the energy level to 1e-10
};

/// Linear local invariant manifolds of a transversally hyperbolic orbit:
/// monodromy eigenvectors transported around the orbit, displaced, and
/// Newton-projected back to the energy level. Normal-form models use the
/// exact manifolds {q1 = 0} / {p1 = 0}.
std::vector<ManifoldSeed> local_invariant_manifolds(
    const models::HamiltonianModel& model, const PeriodicOrbit& p2,
    double displacement, int n_fibers = 32);

struct HomoclinicConfig {
  double displacement = 1e-5;
  int scan_points = 120;
  int crossing_index = 1;
  double max_time = 60.0;
  double root_tol = 1e-12;
  flow::IntegratorConfig integrator;

  HomoclinicConfig();
};

struct HomoclinicOrbit {
  double fiber_phase = 0.0;   // phase of the unstable-fiber seed
  Vec4 seed = Vec4::Zero();
  double crossing_time = 0.0; // time from the seed to the symmetry plane
  double symmetry_residual = 0.0;  // |y1| at the y2 = 0 hit
  double match_residual = 0.0;     // endpoint distance from P2 after mirroring
  double min_x2 = 0.0;             // lobe membership indicator
  std::vector<double> times;
  std::vector<Vec4> states;        // the symmetric orbit, brake point centered
};

/// Symmetric homoclinic to P_{2,E} for reversible models: flow the unstable
/// fiber forward to {y2 = 0} and root-solve the fiber phase for y1 = 0
/// there; the reflected continuation is the stable half.
HomoclinicOrbit find_homoclinic(const models::HamiltonianModel& model,
                                double e, const HomoclinicConfig& cfg = {});

struct SpanningDisk {
  /// Zero set of g contains the disk; crossings are counted against it.
  std::function<double(const Vec4&)> g;
  /// Positive on the open disk; the margin to 0 is the distance proxy to the
  /// boundary orbit.
  std::function<double(const Vec4&)> membership;
};

/// Disk bounded by P_{2,E}: {x2 = 0, y2 > 0} for ham1 (its closure is the
/// hemisphere U_{1,E}); {q1 + p1 = 0, q1 < 0} for normal-form models.
SpanningDisk p2_spanning_disk(const models::HamiltonianModel& model);

/// Signed count of transverse crossings of a closed polyline with a spanning
/// disk. The curve must close to 1e-9 and stay clear of the disk boundary.
int linking_number(const std::vector<Vec4>& closed_curve,
                   const SpanningDisk& disk, double boundary_margin = 1e-6);

}  // namespace s23::orbits

#endif
