#ifndef SADDLE23_FRAME_INDEX_HPP
#define SADDLE23_FRAME_INDEX_HPP

#include <functional>
#include <vector>

#include "saddle23/flow.hpp"
#include "saddle23/models.hpp"
#include "saddle23/phase.hpp"

namespace s23::frame {

/// The quaternionic linear maps j0..j3 acting on (a1,a2,b1,b2):
///   j0 = Id
///   j1 (a1,a2,b1,b2) = ( b2,-b1, a2,-a1)
///   j2 (a1,a2,b1,b2) = ( a2,-a1,-b2, b1)
///   j3 (a1,a2,b1,b2) = ( b1, b2,-a1,-a2)
/// They satisfy j_i^2 = -Id (i=1,2,3) and j1 j2 = j3.
Vec4 quaternion_map(int i, const Vec4& v);
Mat4 quaternion_matrix(int i);

/// Orthonormal moving frame at a regular point: X_i = j_i(grad H/|grad H|).
/// X0 is the level-set normal, X3 is parallel to X_H, and {X1,X2} spans the
/// transverse symplectic plane inside the tangent space.
struct TransverseFrame {
  Vec4 x0, x1, x2, x3;
};

TransverseFrame frame_at(const models::HamiltonianModel& model, const Vec4& w,
                         double gradient_floor = 1e-10);

/// The 2x2 symmetric matrix M(w) driving the transverse linearized flow,
/// assembled from kappa_ij = <H_ww X_i, X_j>:  M = [kappa_11 kappa_12;
/// kappa_21 kappa_22] + kappa_33 I. Positive definite wherever the Hessian
/// restricted to the tangent space is.
Mat2 m_matrix(const models::HamiltonianModel& model, const Vec4& w,
              double gradient_floor = 1e-10);

/// Sampled transverse linearized solution along a trajectory: frame
/// components (alpha1, alpha2) of the projected linearized flow and the
/// continuous argument lift eta. Sampling is dense enough that consecutive
/// eta values differ by less than pi/2.
struct RotationRecord {
  std::vector<double> times;
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  std::vector<double> eta;
};

using StatePath = std::function<Vec4(double)>;

/// Integrate (alpha1, alpha2)' = -J M(w(t)) (alpha1, alpha2) along w(t),
/// t from t0 to t1, starting from the frame components of v0 at w(t0).
/// Requires pi_12 v0 != 0; reports direction loss if |alpha| collapses.
RotationRecord transverse_linearized(const models::HamiltonianModel& model,
                                     const StatePath& path, double t0,
                                     double t1, const Vec4& v0);

RotationRecord transverse_linearized(const models::HamiltonianModel& model,
                                     const flow::Trajectory& traj,
                                     const Vec4& v0);

/// eta(end) - eta(start) of a record.
double delta_eta(const RotationRecord& record);

struct CZResult {
  double interval_lo = 0.0;  // min over directions of (delta eta)/2pi
  double interval_hi = 0.0;  // max over directions
  int index = 0;
  int directions_sampled = 0;
  bool degenerate = false;
};

/// Conley-Zehnder index of a periodic solution by the rotation-interval
/// rule: collect (delta eta)/2pi over sampled transverse directions; with
/// I_eps = I + eps (eps < 0 small), CZ = 2k when k lies in the interior of
/// I_eps and CZ = 2k+1 when I_eps fits inside (k, k+1). The degenerate flag
/// is raised when an interval endpoint sits within `integer_tol` of an
/// integer.
CZResult cz_index_path(const models::HamiltonianModel& model,
                       const StatePath& path, double period,
                       int n_directions = 16, double eps = -1e-6,
                       double integer_tol = 1e-4);

enum class Stability { Hyperbolic, Elliptic, Parabolic };

inline const char* stability_name(Stability s) {
  switch (s) {
    case Stability::Hyperbolic: return "hyperbolic";
    case Stability::Elliptic: return "elliptic";
    case Stability::Parabolic: return "parabolic";
  }
  return "?";
}

struct TransverseMonodromy {
  Mat2 matrix;
  Stability stability;
};

/// Period map of the transverse linearized flow in the moving frame.
/// The determinant is checked against 1 (the flow of -JM is area
/// preserving); stability follows from |trace| versus 2.
TransverseMonodromy monodromy_transverse_path(
    const models::HamiltonianModel& model, const StatePath& path,
    double period, double det_tol = 1e-8);

/// State path backed by a trajectory's dense output.
StatePath path_of(const flow::Trajectory& traj);

/// State path from the closed-form normal-form flow.
StatePath path_of(const models::NormalFormParams& params, const Vec4& z0);

}  // namespace s23::frame

#endif
