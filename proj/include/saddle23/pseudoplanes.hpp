#ifndef SADDLE23_PSEUDOPLANES_HPP
#define SADDLE23_PSEUDOPLANES_HPP

#include <functional>
#include <vector>

#include "saddle23/models.hpp"
#include "saddle23/util.hpp"

namespace s23::planes {

/// f(s)^2 from the level constraint K(-h^2, f^2/2) = E (closed form
/// 2(E - alpha h^2)/omega when the remainder vanishes, 1-D Newton otherwise).
double f_squared(const models::NormalFormParams& params, double h, double e);

/// Right-hand side of the profile equation
///   h' = -2 pi ab ob h f^2 / (ob^2 f^2 + 2 ab^2 h^2),
/// with ab, ob evaluated at the actions (-h^2, f^2/2) of the profile point.
double rhs_G(const models::NormalFormParams& params, double h, double e);

enum class Branch { PositiveH, NegativeH };

/// Discretized solution of the profile equation together with
/// a(s) = pi int_0^s f^2, plus the asymptotic metadata.
struct PlaneProfile {
  models::NormalFormParams params;
  double energy = 0.0;
  Branch branch = Branch::PositiveH;
  double h_star = 0.0;  // sqrt(-I1^-(E))
  double r_e = 0.0;     // sqrt(2 I2(0,E))
  double t2e = 0.0;     // pi r_e^2

  std::vector<double> s;  // increasing
  std::vector<double> h;
  std::vector<double> f;
  std::vector<double> a;

  double h_at(double s_query) const;
  double f_at(double s_query) const;
};

/// Integrate the profile from h(0) = h0 until |h| drops below
/// `h_plus_frac * h_star` (forward) and |h| reaches (1 - h_minus_frac) h_star
/// (backward). Both ends are hyperbolic zeros of G, so the tails switch to
/// log-distance coordinates below `switch_frac * h_star`.
PlaneProfile solve_profile(const models::NormalFormParams& params, double e,
                           double h0, double h_plus_frac = 1e-5,
                           double h_minus_frac = 1e-9,
                           double switch_frac = 1e-3);

/// Map samples u(s,t) = (-h, f cos 2 pi t, h, -f sin 2 pi t) on the given
/// s-nodes and `n_t` uniform angles.
struct PlaneGrid {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<Vec4> points;  // row-major over (s, t)
};

PlaneGrid assemble_plane(const PlaneProfile& profile, int n_t = 256);

/// Max |K o u - E| over grid samples.
double verify_on_level(const PlaneGrid& grid,
                       const models::NormalFormParams& params, double e);

struct CrReport {
  double max_residual = 0.0;         // second equation, projected CR system
  double max_exact_form_residual = 0.0;  // first equation, Laplacian form
  int samples = 0;
};

/// Residuals of the Cauchy-Riemann system pi u_s + J pi u_t = 0 on the
/// cylinder, evaluated with second-order finite differences on the
/// angle-normalized grid (sigma, tau) = (2 pi s, 2 pi t). The frame formulas
/// hold on the boundary sphere {q1+p1=0}, which the ansatz satisfies
/// identically.
CrReport verify_cr_equation(const models::NormalFormParams& params, double e,
                            const std::function<double(double)>& h_of_s,
                            double s_lo, double s_hi, double grid_step = 1e-3,
                            int n_tau = 64);

CrReport verify_cr_equation(const PlaneProfile& profile,
                            double grid_step = 1e-3, int n_tau = 64);

struct HemisphereTransversality {
  double min_rate_u1 = 0.0;  // min of d(q1+p1)/dt over U1 samples
  double max_rate_u2 = 0.0;  // max over U2 samples
  double min_abs_rate = 0.0;
  bool signs_correct = false;
  int samples = 0;
};

/// Crossing rate d(q1+p1)/dt of the Hamiltonian field on the hemispheres:
/// positive (inward) on U1 = {q1 < 0}, negative (outward) on U2.
HemisphereTransversality hemisphere_transversality(
    const models::NormalFormParams& params, double e, int n_samples, Rng& rng);

/// lim pi f(s)^2 at the positive end of the profile; the plane's energy,
/// which must match the boundary-orbit action.
double plane_energy(const PlaneProfile& profile, double tol_frac = 1e-4);

}  // namespace s23::planes

#endif
