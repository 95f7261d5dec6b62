#ifndef SADDLE23_GEOMETRY_HPP
#define SADDLE23_GEOMETRY_HPP

#include <array>
#include <vector>

#include "saddle23/models.hpp"
#include "saddle23/sampling.hpp"

namespace s23::geom {

struct Window2 {
  double x_lo, x_hi, y_lo, y_hi;
};

/// Hill region {U(x) <= E} of a kinetic+potential model: marching-squares
/// boundary polylines on a grid plus the connected-component count of the
/// sublevel mask (4-connectivity flood fill).
struct HillRegion {
  double energy = 0.0;  // absolute potential level
  Window2 window{};
  int resolution = 0;
  std::vector<std::vector<Eigen::Vector2d>> boundary;
  int component_count = 0;
  /// Set when the level sits at the model's critical energy, where the
  /// component count is not a stable quantity.
  bool near_critical = false;
};

HillRegion hill_region(const models::HamiltonianModel& model, double energy,
                       const Window2& window, int resolution);

/// One sample batch of the sphere N^delta_E = {q1+p1 = delta} n K^-1(E).
struct SphereSamples {
  std::vector<Vec4> points;
  /// Scale k^2 = E + alpha delta^2/4 of the rescaled sphere equation.
  double k_squared = 0.0;
  /// max |K - E| / k^2 over raw (unprojected) parameterization points.
  double max_raw_residual = 0.0;
  /// max |K - E| after Newton projection.
  double max_projected_residual = 0.0;
  /// max |q1 + p1 - delta| after projection (held exactly by construction).
  double max_plane_residual = 0.0;
};

/// Produce `n_samples` points of N^delta_E from the rescaled unit-sphere
/// parameterization, Newton-projected onto the constraint set. Requires
/// E, delta >= 0 with (E, delta) != (0, 0).
SphereSamples sphere_NdeltaE(const models::NormalFormParams& params, double e,
                             double delta, int n_samples, Rng& rng);

struct ConvexityScan {
  double min_eigenvalue = 0.0;
  Vec4 argmin = Vec4::Zero();
  int samples_used = 0;
  int samples_excluded = 0;
};

/// Least eigenvalue of the Hessian restricted to the level-set tangent space
/// (frame {X1,X2,X3}) over a sample set, skipping points within
/// `exclusion_radius` of the equilibrium. Ties in the reduction go to the
/// lowest sample index.
ConvexityScan convexity_scan(const models::HamiltonianModel& model,
                             const std::vector<Vec4>& level_samples,
                             double exclusion_radius);

/// Planar projection data for the (q1,p1) picture: projected points plus
/// I1-level annotations.
struct QpProjection {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> i1_levels;
};

QpProjection qp_projection(const std::vector<PhasePoint>& samples);

}  // namespace s23::geom

#endif
