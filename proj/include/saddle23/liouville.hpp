#ifndef SADDLE23_LIOUVILLE_HPP
#define SADDLE23_LIOUVILLE_HPP

#include <optional>
#include <vector>

#include "saddle23/models.hpp"
#include "saddle23/sampling.hpp"

namespace s23::liouville {

/// Cutoff f: [0,inf) -> [0,1] with f = 1 on [0, delta1/3], f = 0 on
/// [2 delta1/3, inf) and a quintic-smoothstep transition, which keeps
/// -6/delta1 < f' <= 0 everywhere.
struct CutoffSpec {
  double delta1 = 0.0;

  double value(double t) const;
  double derivative(double t) const;
};

CutoffSpec make_cutoff(double delta1);

/// The stage-two primitive G_{z0} = (q1 - p1) delta0 / (2 sqrt 2), the
/// Hamiltonian function of the constant field -z0/2.
double g_z0_stage2(const PhasePoint& z, double delta0);

enum class Stage { One, Two };

/// An interpolated Liouville vector field on {q1+p1 >= 0} near the origin,
/// extended to {q1+p1 <= 0} by the T-reflection. Stage one interpolates
/// (z-z0)/2 + R_{z0} down to (z-z0)/2; stage two interpolates (z-z0)/2 into
/// the radial field z/2 near the sphere {q1+p1=0}.
///
/// The coordinate-change remainder R_{z0} is not computable here, so stage
/// one takes a synthetic stand-in: the Hamiltonian vector field of
/// G(z) = (c/3)|z-z0|^3, which satisfies |R(z)| = c|z-z0|^2 exactly.
class LiouvilleField {
public:
  Stage stage;
  models::NormalFormParams params;
  double delta0 = 0.0;
  double delta1 = 0.0;  // delta0 / c2
  double delta2 = 0.0;  // delta1 / 6
  double c2 = 0.0;      // 4 / sqrt(min(omega/alpha, 1))
  double synthetic_c = 0.0;
  double eps_ebar = 0.0;  // stage-two cutoff scale
  Vec4 z0 = Vec4::Zero();
  CutoffSpec cutoff;

  /// Field value. Stage two extends to {q1+p1 < 0} by the T-reflection
  /// (it is radial near the seam, so the extension is smooth); stage one
  /// is a half-space construction and its formula is continued as-is.
  Vec4 eval(const Vec4& z) const;

  /// Pieces of the stage-one decomposition
  ///   dK.Y = (1-K_f) dK.R_{z0} + dK.Y_0 - G_{z0} dK.Y_f.
  Vec4 y_zero(const Vec4& z) const { return 0.5 * (z - z0); }
  Vec4 r_synthetic(const Vec4& z) const;
  /// G_{z0} by Gauss-Legendre quadrature of the line integral from z0.
  double g_line_integral(const Vec4& z) const;
  /// Closed form (c/3)|z-z0|^3 of the same primitive.
  double g_closed_form(const Vec4& z) const;

private:
  Vec4 eval_upper(const Vec4& z) const;
};

/// Assemble a field. For stage two, eps_ebar <= 0 requests the automatic
/// scan (largest cutoff window that stays inside the validated ball around
/// the boundary sphere of the given energy).
LiouvilleField build_field(const models::NormalFormParams& params, Stage stage,
                           double delta0, double synthetic_c = 0.0,
                           double ebar = 1e-6, double eps_ebar = -1.0);

/// Largest eps so that {0 <= q1+p1 <= eps} n K^-1(ebar) stays inside
/// B_{delta2}(0) with -alpha_bar I1 + omega_bar I2 > 0 throughout.
double choose_eps_ebar(const models::NormalFormParams& params, double ebar,
                       double delta2);

/// Max residual of d(i_Y omega0) - omega0 over the given points, assembled
/// from Richardson-extrapolated central differences of the 1-form
/// coefficients.
double verify_liouville_identity(const LiouvilleField& field,
                                 const std::vector<Vec4>& points,
                                 double fd_step = 1e-5);

struct TransversalityReport {
  double min_dky = 0.0;
  Vec4 argmin = Vec4::Zero();
  /// min over samples with q1+p1 > 0 of (dK.Y)/(q1+p1).
  double min_ratio = 0.0;
  /// Reference slope delta0 alpha / (8 sqrt 2) - (A1+A3) delta0^2 from the
  /// transversality bound.
  double bound_slope = 0.0;
  double c0_measured = 0.0;
  double a1 = 0.0;
  double a3 = 0.0;
  /// min over samples of (bound - |term|), nonnegative when the lemma bound
  /// holds on every sample.
  double termo1_margin = 0.0;
  double termo2_margin = 0.0;
  double termo3_margin = 0.0;
  double decomposition_max_residual = 0.0;
  int samples = 0;
};

/// Sample the stage-appropriate region of K^-1(E) and evaluate dK.Y together
/// with the term-by-term lemma bounds.
TransversalityReport verify_transversality(const LiouvilleField& field,
                                           double energy, int n_samples,
                                           Rng& rng);

}  // namespace s23::liouville

#endif
