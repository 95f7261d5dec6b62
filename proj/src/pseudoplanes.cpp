#include "saddle23/pseudoplanes.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace ode = boost::numeric::odeint;

namespace s23::planes {

double f_squared(const models::NormalFormParams& params, double h, double e) {
  if (params.remainder.zero()) {
    double f2 = 2.0 * (e - params.alpha * h * h) / params.omega;
    if (f2 < -1e-15)
      throw UsageError("f_squared: |h| exceeds h*_E");
    return std::max(f2, 0.0);
  }
  double i2 = models::i2_of_i1(params, -h * h, e);
  if (i2 < -1e-13) throw UsageError("f_squared: |h| exceeds h*_E");
  return std::max(2.0 * i2, 0.0);
}

double rhs_G(const models::NormalFormParams& params, double h, double e) {
  double f2 = f_squared(params, h, e);
  double i1 = -h * h, i2 = 0.5 * f2;
  double ab = params.alpha_bar(i1, i2);
  double ob = params.omega_bar(i1, i2);
  double denom = ob * ob * f2 + 2.0 * ab * ab * h * h;
  if (denom == 0.0) return 0.0;
  return -2.0 * M_PI * ab * ob * h * f2 / denom;
}

namespace {

using State = std::vector<double>;
using Rk78 = ode::runge_kutta_fehlberg78<State>;

// Coordinate used for the h-variable in a tail-resolved integration zone.
enum class HVar { Plain, LogH, LogGapNeg };  // h, ln|h|, ln(h* - |h|)

struct ProfileOde {
  const models::NormalFormParams* params;
  double e;
  double h_star;
  double sgn;      // branch sign of h
  double time_dir; // +1 forward in s, -1 backward
  HVar var;

  double h_of(double w) const {
    switch (var) {
      case HVar::Plain: return w;
      case HVar::LogH: return sgn * std::exp(w);
      case HVar::LogGapNeg: return sgn * (h_star - std::exp(w));
    }
    return w;
  }
  double w_of(double h) const {
    switch (var) {
      case HVar::Plain: return h;
      case HVar::LogH: return std::log(std::abs(h));
      case HVar::LogGapNeg: return std::log(h_star - std::abs(h));
    }
    return h;
  }

  // y = (w, a)
  void operator()(const State& y, State& dydt, double /*s*/) const {
    double h = h_of(y[0]);
    double g = rhs_G(*params, h, e);
    double dw = 0.0;
    switch (var) {
      case HVar::Plain: dw = g; break;
      case HVar::LogH: dw = g / h; break;
      case HVar::LogGapNeg: dw = -sgn * g / std::exp(y[0]); break;
    }
    double f2 = f_squared(*params, h, e);
    dydt.resize(2);
    dydt[0] = time_dir * dw;
    dydt[1] = time_dir * M_PI * f2;
  }
};

struct Node {
  double s, h, a;
};

// Integrate one zone until `stop(h)` fires; appends nodes (skipping the
// initial one). Returns the reached (s, h, a).
void run_zone(const models::NormalFormParams& params, double e, double h_star,
              double sgn, double time_dir, HVar var, double& s_cur,
              double& h_cur, double& a_cur,
              const std::function<bool(double)>& stop,
              std::vector<Node>& nodes) {
  ProfileOde sys{&params, e, h_star, sgn, time_dir, var};
  State y = {sys.w_of(h_cur), a_cur};
  auto ctrl = ode::make_controlled(1e-13, 1e-13, Rk78());
  double tau = 0.0;  // internal nonnegative time
  double dt = 0.05;
  int guard = 0;
  while (!stop(sys.h_of(y[0]))) {
    if (++guard > 2000000)
      throw NumericalError("solve_profile: integration stalled (wrong "
                           "regime for the requested ends?)");
    auto res = ctrl.try_step(sys, y, tau, dt);
    if (res == ode::success) {
      double h = sys.h_of(y[0]);
      nodes.push_back({s_cur + time_dir * tau, h, y[1]});
    } else if (dt < 1e-12) {
      throw NumericalError("solve_profile: step size underflow");
    }
  }
  s_cur += time_dir * tau;
  h_cur = sys.h_of(y[0]);
  a_cur = y[1];
}

}  // namespace

PlaneProfile solve_profile(const models::NormalFormParams& params, double e,
                           double h0, double h_plus_frac, double h_minus_frac,
                           double switch_frac) {
  if (!(e > 0.0)) throw UsageError("solve_profile: requires E > 0");
  PlaneProfile prof;
  prof.params = params;
  prof.energy = e;
  prof.h_star = std::sqrt(-models::i1_minus(params, e));
  prof.r_e = std::sqrt(2.0 * models::i2_of_i1(params, 0.0, e));
  prof.t2e = M_PI * prof.r_e * prof.r_e;
  prof.branch = h0 > 0.0 ? Branch::PositiveH : Branch::NegativeH;

  double habs = std::abs(h0);
  if (!(habs > 0.0) || habs >= prof.h_star)
    throw UsageError("solve_profile: h0 must be strictly between 0 and h*_E");
  double sgn = h0 > 0.0 ? 1.0 : -1.0;
  const double h_sw = switch_frac * prof.h_star;
  const double h_end_plus = h_plus_frac * prof.h_star;
  const double gap_end = h_minus_frac * prof.h_star;

  // Forward: |h| decreases to h_end_plus (log coordinates below h_sw).
  std::vector<Node> fwd;
  double s_cur = 0.0, h_cur = h0, a_cur = 0.0;
  if (std::abs(h_cur) > h_sw)
    run_zone(params, e, prof.h_star, sgn, +1.0, HVar::Plain, s_cur, h_cur,
             a_cur, [&](double h) { return std::abs(h) <= h_sw; }, fwd);
  run_zone(params, e, prof.h_star, sgn, +1.0, HVar::LogH, s_cur, h_cur, a_cur,
           [&](double h) { return std::abs(h) <= h_end_plus; }, fwd);

  // Backward: |h| climbs to h* - gap_end.
  std::vector<Node> bwd;
  s_cur = 0.0;
  h_cur = h0;
  a_cur = 0.0;
  if (prof.h_star - std::abs(h_cur) > h_sw)
    run_zone(params, e, prof.h_star, sgn, -1.0, HVar::Plain, s_cur, h_cur,
             a_cur,
             [&](double h) { return prof.h_star - std::abs(h) <= h_sw; }, bwd);
  run_zone(params, e, prof.h_star, sgn, -1.0, HVar::LogGapNeg, s_cur, h_cur,
           a_cur, [&](double h) { return prof.h_star - std::abs(h) <= gap_end; },
           bwd);

  prof.s.reserve(fwd.size() + bwd.size() + 1);
  for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) {
    prof.s.push_back(it->s);
    prof.h.push_back(it->h);
    prof.a.push_back(it->a);
  }
  prof.s.push_back(0.0);
  prof.h.push_back(h0);
  prof.a.push_back(0.0);
  for (const Node& n : fwd) {
    prof.s.push_back(n.s);
    prof.h.push_back(n.h);
    prof.a.push_back(n.a);
  }
  prof.f.reserve(prof.s.size());
  for (double h : prof.h)
    prof.f.push_back(std::sqrt(f_squared(params, h, e)));
  return prof;
}

double PlaneProfile::h_at(double s_query) const {
  if (s.empty()) throw UsageError("PlaneProfile: empty profile");
  if (s_query <= s.front() + 1e-15) return h.front();
  if (s_query >= s.back() - 1e-15) return h.back();
  size_t lo = 0, hi = s.size() - 1;
  while (lo + 1 < hi) {
    size_t mid = (lo + hi) / 2;
    if (s[mid] <= s_query)
      lo = mid;
    else
      hi = mid;
  }
  double ds = s_query - s[lo];
  if (ds == 0.0) return h[lo];
  double sgn = branch == Branch::PositiveH ? 1.0 : -1.0;
  double habs = std::abs(h[lo]);
  HVar var = HVar::Plain;
  if (habs < 1e-3 * h_star)
    var = HVar::LogH;
  else if (h_star - habs < 1e-3 * h_star)
    var = HVar::LogGapNeg;
  ProfileOde sys{&params, energy, h_star, sgn, +1.0, var};
  State y = {sys.w_of(h[lo]), a[lo]};
  Rk78().do_step(sys, y, 0.0, ds);
  return sys.h_of(y[0]);
}

double PlaneProfile::f_at(double s_query) const {
  return std::sqrt(f_squared(params, h_at(s_query), energy));
}

PlaneGrid assemble_plane(const PlaneProfile& profile, int n_t) {
  if (n_t < 4) throw UsageError("assemble_plane: n_t too small");
  PlaneGrid grid;
  grid.s = profile.s;
  grid.t.reserve(n_t);
  for (int j = 0; j < n_t; ++j) grid.t.push_back(double(j) / n_t);
  grid.points.reserve(grid.s.size() * grid.t.size());
  for (size_t i = 0; i < grid.s.size(); ++i) {
    double h = profile.h[i], f = profile.f[i];
    for (int j = 0; j < n_t; ++j) {
      double ang = 2.0 * M_PI * grid.t[j];
      grid.points.emplace_back(-h, f * std::cos(ang), h, -f * std::sin(ang));
    }
  }
  return grid;
}

double verify_on_level(const PlaneGrid& grid,
                       const models::NormalFormParams& params, double e) {
  models::NormalFormModel model(params);
  double max_resid = 0.0;
  for (const Vec4& u : grid.points)
    max_resid = std::max(max_resid, std::abs(model.value(u) - e));
  return max_resid;
}

namespace {

struct FrameAtPoint {
  Vec4 x_lambda;
  Vec4 ebar1, ebar2;
};

double lambda0(const Vec4& z, const Vec4& v) {
  // 1/2 sum (p_i dq_i - q_i dp_i)
  return 0.5 * (z[2] * v[0] - z[0] * v[2] + z[3] * v[1] - z[1] * v[3]);
}

FrameAtPoint reeb_frame(const models::NormalFormModel& model, const Vec4& z) {
  Vec4 g = model.gradient(z);
  Vec4 xk(g[2], g[3], -g[0], -g[1]);
  double denom = lambda0(z, xk);
  if (std::abs(denom) < 1e-300)
    throw NumericalError("verify_cr_equation: vanishing contact form value");
  Vec4 xl = xk / denom;
  Vec4 e1(g[3], -g[2], g[1], -g[0]);  // j1 grad
  Vec4 e2(g[1], -g[0], -g[3], g[2]);  // j2 grad
  return FrameAtPoint{xl, e1 - lambda0(z, e1) * xl, e2 - lambda0(z, e2) * xl};
}

}  // namespace

CrReport verify_cr_equation(const models::NormalFormParams& params, double e,
                            const std::function<double(double)>& h_of_s,
                            double s_lo, double s_hi, double grid_step,
                            int n_tau) {
  models::NormalFormModel model(params);
  CrReport rep;

  auto point = [&](double sigma, double tau) {
    double h = h_of_s(sigma / (2.0 * M_PI));
    double f = std::sqrt(f_squared(params, h, e));
    return Vec4(-h, f * std::cos(tau), h, -f * std::sin(tau));
  };

  const double d = grid_step;
  const double sig_lo = 2.0 * M_PI * s_lo, sig_hi = 2.0 * M_PI * s_hi;
  int n_sig = std::max(8, int((sig_hi - sig_lo) / (64.0 * d)));

  for (int i = 0; i <= n_sig; ++i) {
    double sigma = sig_lo + (sig_hi - sig_lo) * i / n_sig;
    for (int j = 0; j < n_tau; ++j) {
      double tau = 2.0 * M_PI * j / n_tau;
      Vec4 u = point(sigma, tau);
      Vec4 us = (point(sigma + d, tau) - point(sigma - d, tau)) / (2.0 * d);
      Vec4 ut = (point(sigma, tau + d) - point(sigma, tau - d)) / (2.0 * d);

      FrameAtPoint fr = reeb_frame(model, u);
      Vec4 pi_us = us - lambda0(u, us) * fr.x_lambda;
      Vec4 pi_ut = ut - lambda0(u, ut) * fr.x_lambda;

      Eigen::Matrix<double, 4, 2> basis;
      basis.col(0) = fr.ebar1;
      basis.col(1) = fr.ebar2;
      Eigen::Vector2d ab = basis.colPivHouseholderQr().solve(pi_ut);
      Vec4 j_pi_ut = ab[0] * fr.ebar2 - ab[1] * fr.ebar1;

      rep.max_residual =
          std::max(rep.max_residual, (pi_us + j_pi_ut).norm());

      // First equation via its Laplacian form, 5-point stencil.
      Vec4 lap = (point(sigma + d, tau) + point(sigma - d, tau) +
                  point(sigma, tau + d) + point(sigma, tau - d) - 4.0 * u) /
                 (d * d);
      double w = 0.5 * (u[0] * lap[2] - u[2] * lap[0] + u[1] * lap[3] -
                        u[3] * lap[1]);
      rep.max_exact_form_residual =
          std::max(rep.max_exact_form_residual, std::abs(w));
      ++rep.samples;
    }
  }
  return rep;
}

CrReport verify_cr_equation(const PlaneProfile& profile, double grid_step,
                            int n_tau) {
  // Keep clear of the f -> 0 end where the displayed frame degenerates.
  double span = profile.s.back() - profile.s.front();
  double s_lo = profile.s.front() + 0.15 * span;
  double s_hi = profile.s.back() - 0.05 * span;
  return verify_cr_equation(
      profile.params, profile.energy,
      [&](double s) { return profile.h_at(s); }, s_lo, s_hi, grid_step,
      n_tau);
}

HemisphereTransversality hemisphere_transversality(
    const models::NormalFormParams& params, double e, int n_samples,
    Rng& rng) {
  if (!(e > 0.0))
    throw UsageError("hemisphere_transversality: requires E > 0");
  models::NormalFormModel model(params);
  double h_star = std::sqrt(-models::i1_minus(params, e));

  HemisphereTransversality out;
  out.samples = n_samples;
  out.min_rate_u1 = std::numeric_limits<double>::infinity();
  out.max_rate_u2 = -std::numeric_limits<double>::infinity();
  out.min_abs_rate = std::numeric_limits<double>::infinity();
  out.signs_correct = true;

  for (int k = 0; k < n_samples; ++k) {
    // Interior |h| keeps samples off the equator (h = 0) and off the
    // degenerate pole (h = h*).
    double h = h_star * (0.01 + 0.98 * rng.uniform());
    double f = std::sqrt(f_squared(params, h, e));
    double ang = 2.0 * M_PI * rng.uniform();
    for (double sgn : {+1.0, -1.0}) {
      Vec4 u(-sgn * h, f * std::cos(ang), sgn * h, -f * std::sin(ang));
      Vec4 g = model.gradient(u);
      Vec4 xk(g[2], g[3], -g[0], -g[1]);
      double rate = xk[0] + xk[2];  // d(q1+p1)/dt
      if (sgn > 0) {                // q1 = -h < 0: U1
        out.min_rate_u1 = std::min(out.min_rate_u1, rate);
        if (rate <= 0.0) out.signs_correct = false;
      } else {
        out.max_rate_u2 = std::max(out.max_rate_u2, rate);
        if (rate >= 0.0) out.signs_correct = false;
      }
      out.min_abs_rate = std::min(out.min_abs_rate, std::abs(rate));
    }
  }
  return out;
}

double plane_energy(const PlaneProfile& profile, double tol_frac) {
  if (std::abs(profile.h.back()) > tol_frac * profile.h_star)
    throw NumericalError("plane_energy: profile not converged at s -> +inf");
  double f = profile.f.back();
  return M_PI * f * f;
}

}  // namespace s23::planes
