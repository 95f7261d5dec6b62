#include "saddle23/liouville.hpp"

#include <cmath>

#include "saddle23/util.hpp"

namespace s23::liouville {

namespace {

double smoothstep5(double x) {
  // Quintic smoothstep: C^2, s(0)=0, s(1)=1, max slope 15/8 at x=1/2.
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep5_prime(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

Vec4 j3(const Vec4& v) { return Vec4(v[2], v[3], -v[0], -v[1]); }

Vec4 t_reflect(const Vec4& z) { return Vec4(-z[0], z[1], -z[2], z[3]); }

}  // namespace

double CutoffSpec::value(double t) const {
  double a = delta1 / 3.0, b = 2.0 * delta1 / 3.0;
  if (t <= a) return 1.0;
  if (t >= b) return 0.0;
  return 1.0 - smoothstep5((t - a) / (b - a));
}

double CutoffSpec::derivative(double t) const {
  double a = delta1 / 3.0, b = 2.0 * delta1 / 3.0;
  if (t <= a || t >= b) return 0.0;
  return -smoothstep5_prime((t - a) / (b - a)) / (b - a);
}

CutoffSpec make_cutoff(double delta1) {
  if (!(delta1 > 0.0)) throw UsageError("make_cutoff: requires delta1 > 0");
  return CutoffSpec{delta1};
}

double g_z0_stage2(const PhasePoint& z, double delta0) {
  require_chart(z, Chart::NormalForm, "g_z0_stage2");
  return (z[0] - z[2]) * delta0 / (2.0 * std::sqrt(2.0));
}

Vec4 LiouvilleField::r_synthetic(const Vec4& z) const {
  if (synthetic_c == 0.0) return Vec4::Zero();
  Vec4 d = z - z0;
  // Hamiltonian field of (c/3)|z-z0|^3: grad = c |z-z0| (z-z0).
  return synthetic_c * d.norm() * j3(d);
}

double LiouvilleField::g_closed_form(const Vec4& z) const {
  double r = (z - z0).norm();
  return synthetic_c / 3.0 * r * r * r;
}

double LiouvilleField::g_line_integral(const Vec4& z) const {
  if (synthetic_c == 0.0) return 0.0;
  Vec4 d = z - z0;
  // dG along the segment z0 + s d: grad G = c |.| (.), so the integrand is
  // c s^2 |d|^2 . d = c s^2 |d|^3.
  auto integrand = [&](double s) {
    Vec4 p = s * d;
    return synthetic_c * p.norm() * p.dot(d);
  };
  return integrate_gl(integrand, 0.0, 1.0, 4, 16);
}

Vec4 LiouvilleField::eval_upper(const Vec4& z) const {
  double t = z[0] + z[2];
  if (stage == Stage::One) {
    double f = cutoff.value(t);
    double fp = cutoff.derivative(t);
    Vec4 y = y_zero(z) + (1.0 - f) * r_synthetic(z);
    if (fp != 0.0) {
      double g = g_line_integral(z);
      y -= g * fp * Vec4(1.0, 0.0, -1.0, 0.0);
    }
    return y;
  }
  // Stage two: cutoff on the scale eps_ebar, primitive (q1-p1) delta0/(2√2).
  double a = eps_ebar / 4.0, b = eps_ebar / 2.0;
  double f, fp;
  if (t <= a) {
    f = 1.0;
    fp = 0.0;
  } else if (t >= b) {
    f = 0.0;
    fp = 0.0;
  } else {
    f = 1.0 - smoothstep5((t - a) / (b - a));
    fp = -smoothstep5_prime((t - a) / (b - a)) / (b - a);
  }
  double g = (z[0] - z[2]) * delta0 / (2.0 * std::sqrt(2.0));
  return y_zero(z) + f * (0.5 * z0) - g * fp * Vec4(1.0, 0.0, -1.0, 0.0);
}

Vec4 LiouvilleField::eval(const Vec4& z) const {
  // Stage two is T-equivariant (it is radial near the seam), so the
  // reflected extension to {q1+p1 < 0} is smooth. Stage one lives on the
  // half-space only; its formula is simply continued.
  if (stage == Stage::Two && z[0] + z[2] < 0.0)
    return t_reflect(eval_upper(t_reflect(z)));
  return eval_upper(z);
}

LiouvilleField build_field(const models::NormalFormParams& params, Stage stage,
                           double delta0, double synthetic_c, double ebar,
                           double eps_ebar) {
  if (!(delta0 > 0.0)) throw UsageError("build_field: requires delta0 > 0");
  LiouvilleField f;
  f.stage = stage;
  f.params = params;
  f.delta0 = delta0;
  f.c2 = 4.0 / std::sqrt(std::min(params.omega / params.alpha, 1.0));
  f.delta1 = delta0 / f.c2;
  f.delta2 = f.delta1 / 6.0;
  f.synthetic_c = synthetic_c;
  f.z0 = (delta0 / std::sqrt(2.0)) * Vec4(1.0, 0.0, 1.0, 0.0);
  f.cutoff = make_cutoff(f.delta1);
  if (stage == Stage::Two) {
    f.synthetic_c = 0.0;
    f.eps_ebar =
        eps_ebar > 0.0 ? eps_ebar : choose_eps_ebar(params, ebar, f.delta2);
  }
  return f;
}

double choose_eps_ebar(const models::NormalFormParams& params, double ebar,
                       double delta2) {
  if (!(ebar > 0.0)) throw UsageError("choose_eps_ebar: requires E > 0");
  models::NormalFormModel model(params);
  // The boundary sphere itself must fit in the validated ball.
  double i2_boundary = models::i2_of_i1(params, 0.0, ebar);
  if (2.0 * i2_boundary >= delta2 * delta2)
    throw NumericalError(
        "choose_eps_ebar: boundary sphere leaves B_{delta2}; lower E");

  auto set_ok = [&](double eps) {
    // Walk the band q1+p1 = t in [0, eps], I1 in [I1^-(E), t^2/4]; check the
    // extreme |z| and the sign of -alpha_bar I1 + omega_bar I2.
    double i1_lo = models::i1_minus(params, ebar);
    for (int kt = 0; kt <= 20; ++kt) {
      double t = eps * kt / 20.0;
      for (int ki = 0; ki <= 20; ++ki) {
        double i1 = i1_lo + (t * t / 4.0 - i1_lo) * ki / 20.0;
        double i2;
        try {
          i2 = models::i2_of_i1(params, i1, ebar);
        } catch (const NumericalError&) {
          return false;
        }
        if (i2 < -1e-15) continue;
        double q1p1_sq = t * t - 2.0 * i1;  // q1^2 + p1^2
        double z2 = q1p1_sq + 2.0 * std::max(i2, 0.0);
        if (z2 > delta2 * delta2) return false;
        if (-params.alpha_bar(i1, i2) * i1 + params.omega_bar(i1, i2) * i2 <=
            0.0)
          return false;
      }
    }
    return true;
  };

  for (double eps = delta2; eps > 1e-9 * delta2; eps *= 0.9)
    if (set_ok(eps)) return eps;
  throw NumericalError("choose_eps_ebar: no admissible cutoff window found");
}

double verify_liouville_identity(const LiouvilleField& field,
                                 const std::vector<Vec4>& points,
                                 double fd_step) {
  // lambda = i_Y omega0 has coefficients (Y_p1, Y_p2, -Y_q1, -Y_q2) in the
  // coordinate order (q1, q2, p1, p2).
  auto lambda_coeff = [&](const Vec4& z, int c) {
    Vec4 y = field.eval(z);
    switch (c) {
      case 0: return y[2];
      case 1: return y[3];
      case 2: return -y[0];
      case 3: return -y[1];
    }
    return 0.0;
  };
  Mat4 omega = symplectic_form_matrix();

  double max_resid = 0.0;
  for (const Vec4& z : points) {
    auto d_coeff = [&](int c, int j, double h) {
      Vec4 zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      return (lambda_coeff(zp, c) - lambda_coeff(zm, c)) / (2.0 * h);
    };
    for (int j = 0; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        auto curl = [&](double h) {
          return d_coeff(k, j, h) - d_coeff(j, k, h);
        };
        double d1 = curl(fd_step);
        double d2 = curl(fd_step / 2.0);
        double richardson = (4.0 * d2 - d1) / 3.0;
        max_resid = std::max(max_resid, std::abs(richardson - omega(j, k)));
      }
    }
  }
  return max_resid;
}

TransversalityReport verify_transversality(const LiouvilleField& field,
                                           double energy, int n_samples,
                                           Rng& rng) {
  const auto& params = field.params;
  models::NormalFormModel model(params);
  TransversalityReport rep;
  rep.samples = n_samples;

  // Sampling region: stage one uses the full ball cap, stage two the thin
  // band 0 <= q1+p1 <= eps_ebar around the boundary sphere.
  sampling::Box4 box;
  std::function<bool(const Vec4&)> accept;
  if (field.stage == Stage::One) {
    box.lo = Vec4::Constant(-field.delta0);
    box.hi = Vec4::Constant(field.delta0);
    double d0 = field.delta0;
    accept = [d0](const Vec4& z) {
      return z.norm() <= d0 && z[0] + z[2] >= 0.0;
    };
  } else {
    double eps = field.eps_ebar;
    double i1_lo = models::i1_minus(params, energy);
    double qp_max = 1.2 * std::sqrt(eps * eps - 2.0 * i1_lo);
    double i2_max = models::i2_of_i1(params, eps * eps / 4.0, energy);
    double cr = 1.2 * std::sqrt(2.0 * std::max(i2_max, 0.0));
    box.lo = Vec4(-qp_max, -cr, -qp_max, -cr);
    box.hi = Vec4(qp_max, cr, qp_max, cr);
    accept = [eps](const Vec4& z) {
      double t = z[0] + z[2];
      return t >= 0.0 && t <= eps;
    };
  }
  auto samples =
      sampling::sample_level_set(model, energy, box, n_samples, rng, accept);

  // Measured constant c0 = sup |dK(z)| / |z| over the sampled region.
  rep.c0_measured = 0.0;
  for (const Vec4& z : samples) {
    double n = z.norm();
    if (n > 1e-12)
      rep.c0_measured =
          std::max(rep.c0_measured, model.gradient(z).norm() / n);
  }
  rep.a1 = 24.0 * rep.c0_measured * field.synthetic_c * field.c2;
  rep.a3 = 768.0 * field.synthetic_c * field.c2 * field.c2 * params.alpha;
  rep.bound_slope =
      field.delta0 * params.alpha / (8.0 * std::sqrt(2.0)) -
      (rep.a1 + rep.a3) * field.delta0 * field.delta0;

  rep.min_dky = std::numeric_limits<double>::infinity();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.termo1_margin = std::numeric_limits<double>::infinity();
  rep.termo2_margin = std::numeric_limits<double>::infinity();
  rep.termo3_margin = std::numeric_limits<double>::infinity();

  for (const Vec4& z : samples) {
    Vec4 dk = model.gradient(z);
    double t = z[0] + z[2];
    double dky = dk.dot(field.eval(z));
    if (dky < rep.min_dky) {
      rep.min_dky = dky;
      rep.argmin = z;
    }
    if (t > 1e-7 * field.delta0)
      rep.min_ratio = std::min(rep.min_ratio, dky / t);

    if (field.stage == Stage::One) {
      double f = field.cutoff.value(t);
      double fp = field.cutoff.derivative(t);
      double term1 = (1.0 - f) * dk.dot(field.r_synthetic(z));
      double term2 = dk.dot(field.y_zero(z));
      double g = field.g_line_integral(z);
      double dk_yf = fp * (dk[0] - dk[2]);
      double term3 = -g * dk_yf;
      double d0sq = field.delta0 * field.delta0;
      rep.termo1_margin =
          std::min(rep.termo1_margin, rep.a1 * d0sq * t - std::abs(term1));
      rep.termo2_margin =
          std::min(rep.termo2_margin,
                   term2 - t * field.delta0 * params.alpha /
                               (8.0 * std::sqrt(2.0)));
      rep.termo3_margin =
          std::min(rep.termo3_margin, rep.a3 * d0sq * t - std::abs(term3));
      rep.decomposition_max_residual =
          std::max(rep.decomposition_max_residual,
                   std::abs(dky - (term1 + term2 + term3)));
    }
  }
  return rep;
}

}  // namespace s23::liouville
