#include "saddle23/frame_index.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace ode = boost::numeric::odeint;

namespace s23::frame {

Vec4 quaternion_map(int i, const Vec4& v) {
  switch (i) {
    case 0: return v;
    case 1: return Vec4(v[3], -v[2], v[1], -v[0]);
    case 2: return Vec4(v[1], -v[0], -v[3], v[2]);
    case 3: return Vec4(v[2], v[3], -v[0], -v[1]);
  }
  throw UsageError("quaternion_map: index must be 0..3");
}

Mat4 quaternion_matrix(int i) {
  Mat4 m;
  for (int c = 0; c < 4; ++c) m.col(c) = quaternion_map(i, Vec4::Unit(c));
  return m;
}

TransverseFrame frame_at(const models::HamiltonianModel& model, const Vec4& w,
                         double gradient_floor) {
  Vec4 g = model.gradient(w);
  double n = g.norm();
  if (n <= gradient_floor)
    throw NumericalError("frame_at: near-critical point (|grad H| = " +
                         std::to_string(n) + ")");
  Vec4 x0 = g / n;
  return TransverseFrame{x0, quaternion_map(1, x0), quaternion_map(2, x0),
                         quaternion_map(3, x0)};
}

Mat2 m_matrix(const models::HamiltonianModel& model, const Vec4& w,
              double gradient_floor) {
  TransverseFrame f = frame_at(model, w, gradient_floor);
  Mat4 h = model.hessian(w);
  double k11 = f.x1.dot(h * f.x1);
  double k12 = f.x1.dot(h * f.x2);
  double k22 = f.x2.dot(h * f.x2);
  double k33 = f.x3.dot(h * f.x3);
  Mat2 m;
  m << k11 + k33, k12, k12, k22 + k33;
  return m;
}

RotationRecord transverse_linearized(const models::HamiltonianModel& model,
                                     const StatePath& path, double t0,
                                     double t1, const Vec4& v0) {
  Vec4 w0 = path(t0);
  TransverseFrame f0 = frame_at(model, w0);
  double a1 = v0.dot(f0.x1);
  double a2 = v0.dot(f0.x2);
  double norm0 = std::hypot(a1, a2);
  if (norm0 < 1e-12 * (1.0 + v0.norm()))
    throw UsageError("transverse_linearized: pi_12 v0 vanishes");

  const double span = std::abs(t1 - t0);
  const double sign = (t1 >= t0) ? 1.0 : -1.0;

  using State = std::vector<double>;
  // d/dt (a1,a2) = -J M (a1,a2);  d/dt eta = a^T M a / |a|^2.
  auto sys = [&](const State& y, State& dydt, double s) {
    Mat2 m = m_matrix(model, path(t0 + sign * s));
    Vec2 a(y[0], y[1]);
    Vec2 ma = m * a;
    dydt.resize(3);
    dydt[0] = sign * -ma[1];
    dydt[1] = sign * ma[0];
    dydt[2] = sign * (a.dot(ma) / a.squaredNorm());
  };

  RotationRecord rec;
  State y = {a1, a2, std::atan2(a2, a1)};
  auto record = [&](double s) {
    double norm = std::hypot(y[0], y[1]);
    if (!std::isfinite(norm) || norm < 1e-10 * norm0)
      throw NumericalError(
          "transverse_linearized: transverse direction lost along the record");
    rec.times.push_back(t0 + sign * s);
    rec.alpha1.push_back(y[0]);
    rec.alpha2.push_back(y[1]);
    rec.eta.push_back(y[2]);
  };
  record(0.0);
  if (span == 0.0) return rec;

  ode::runge_kutta_fehlberg78<State> stepper;
  auto ctrl = ode::make_controlled(1e-12, 1e-12, stepper);
  double s = 0.0;
  double dt = std::min(0.1, span);
  const double eta_cap = 0.45 * M_PI;
  while (s < span * (1.0 - 1e-15)) {
    // Cap the step so the recorded lift advances by less than pi/2.
    State dydt(3);
    sys(y, dydt, s);
    double eta_rate = std::abs(dydt[2]);
    double cap = eta_rate > 1e-12 ? eta_cap / eta_rate : span;
    dt = std::min({dt, cap, span - s});
    double eta_before = y[2];
    auto res = ctrl.try_step(sys, y, s, dt);
    if (res == ode::success) {
      if (std::abs(y[2] - eta_before) >= 0.5 * M_PI)
        throw NumericalError(
            "transverse_linearized: lift step exceeded pi/2 despite capping");
      record(s);
    } else if (dt < 1e-14 * std::max(1.0, span)) {
      throw NumericalError("transverse_linearized: step size underflow");
    }
  }
  return rec;
}

RotationRecord transverse_linearized(const models::HamiltonianModel& model,
                                     const flow::Trajectory& traj,
                                     const Vec4& v0) {
  return transverse_linearized(model, path_of(traj), traj.t_begin(),
                               traj.t_end(), v0);
}

double delta_eta(const RotationRecord& record) {
  if (record.eta.empty()) throw UsageError("delta_eta: empty record");
  return record.eta.back() - record.eta.front();
}

CZResult cz_index_path(const models::HamiltonianModel& model,
                       const StatePath& path, double period, int n_directions,
                       double eps, double integer_tol) {
  if (n_directions < 8)
    throw UsageError("cz_index: need at least 8 sampled directions");
  Vec4 w0 = path(0.0);
  TransverseFrame f0 = frame_at(model, w0);

  CZResult out;
  out.directions_sampled = n_directions;
  double lo = 0.0, hi = 0.0;
  // Antipodal directions wind identically, so sample half the circle.
  for (int k = 0; k < n_directions; ++k) {
    double phi = M_PI * k / n_directions;
    Vec4 v0 = std::cos(phi) * f0.x1 + std::sin(phi) * f0.x2;
    RotationRecord rec = transverse_linearized(model, path, 0.0, period, v0);
    double turns = delta_eta(rec) / (2.0 * M_PI);
    if (k == 0) {
      lo = hi = turns;
    } else {
      lo = std::min(lo, turns);
      hi = std::max(hi, turns);
    }
  }
  out.interval_lo = lo;
  out.interval_hi = hi;

  // I_eps = I + eps with eps < 0 small: either an integer k lies inside
  // (CZ = 2k) or I_eps fits between consecutive integers (CZ = 2k+1).
  // Nondegenerate intervals are shorter than 1/2, so the integer is unique.
  double lo_e = lo + eps, hi_e = hi + eps;
  double k_in = std::ceil(lo_e);
  if (k_in > lo_e && k_in < hi_e)
    out.index = 2 * int(k_in);
  else
    out.index = 2 * int(std::floor(lo_e)) + 1;

  auto near_integer = [&](double x) {
    return std::abs(x - std::round(x)) < integer_tol;
  };
  out.degenerate = near_integer(lo) || near_integer(hi);
  return out;
}

TransverseMonodromy monodromy_transverse_path(
    const models::HamiltonianModel& model, const StatePath& path,
    double period, double det_tol) {
  using State = std::vector<double>;
  auto sys = [&](const State& y, State& dydt, double s) {
    Mat2 m = m_matrix(model, path(s));
    Mat2 phi;
    phi << y[0], y[1], y[2], y[3];
    Mat2 mj;
    mj << -m(1, 0), -m(1, 1), m(0, 0), m(0, 1);  // -J M
    Mat2 d = mj * phi;
    dydt.resize(4);
    dydt[0] = d(0, 0);
    dydt[1] = d(0, 1);
    dydt[2] = d(1, 0);
    dydt[3] = d(1, 1);
  };
  State y = {1.0, 0.0, 0.0, 1.0};
  ode::runge_kutta_fehlberg78<State> stepper;
  auto ctrl = ode::make_controlled(1e-13, 1e-13, stepper);
  double s = 0.0, dt = std::min(0.05, period);
  while (s < period * (1.0 - 1e-15)) {
    dt = std::min(dt, period - s);
    auto res = ctrl.try_step(sys, y, s, dt);
    if (res != ode::success && dt < 1e-14 * period)
      throw NumericalError("monodromy_transverse: step size underflow");
  }
  Mat2 phi;
  phi << y[0], y[1], y[2], y[3];
  double det = phi.determinant();
  if (std::abs(det - 1.0) > det_tol)
    throw NumericalError("monodromy_transverse: |det - 1| = " +
                         std::to_string(std::abs(det - 1.0)) +
                         " exceeds tolerance");
  double tr = phi.trace();
  Stability st = Stability::Parabolic;
  if (std::abs(tr) > 2.0 + 1e-9)
    st = Stability::Hyperbolic;
  else if (std::abs(tr) < 2.0 - 1e-9)
    st = Stability::Elliptic;
  return TransverseMonodromy{phi, st};
}

StatePath path_of(const flow::Trajectory& traj) {
  return [&traj](double t) { return traj.state_at(t).coords(); };
}

StatePath path_of(const models::NormalFormParams& params, const Vec4& z0) {
  PhasePoint p0(z0, Chart::NormalForm);
  return [params, p0](double t) {
    return models::exact_normal_form_flow(params, p0, t).coords();
  };
}

}  // namespace s23::frame
