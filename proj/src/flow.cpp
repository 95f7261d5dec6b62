#include "saddle23/flow.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "saddle23/util.hpp"

namespace ode = boost::numeric::odeint;

namespace s23::flow {

using State = std::vector<double>;
using Rk78 = ode::runge_kutta_fehlberg78<State>;
using Rk4 = ode::runge_kutta4<State>;

namespace {

// Flow right-hand side in an internal nonnegative time; `sign` carries the
// direction, and the trailing 16 entries (when present) hold the variational
// matrix column-major, dU/dt = J H_ww(w) U.
struct OdeSystem {
  const models::HamiltonianModel* model;
  double sign;
  bool variational;

  void operator()(const State& y, State& dydt, double /*s*/) const {
    Vec4 w(y[0], y[1], y[2], y[3]);
    Vec4 g = model->gradient(w);
    dydt.resize(y.size());
    dydt[0] = sign * g[2];
    dydt[1] = sign * g[3];
    dydt[2] = sign * -g[0];
    dydt[3] = sign * -g[1];
    if (variational) {
      Mat4 a = poisson_matrix() * model->hessian(w);
      Eigen::Map<const Mat4> u(&y[4]);
      Eigen::Map<Mat4> du(&dydt[4]); du = sign * (a * u);
    }
  }
};

bool all_finite(const State& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  return true;
}

double symplectic_residual(const Mat4& u) {
  Mat4 j = poisson_matrix();
  return (u.transpose() * j * u - j).cwiseAbs().maxCoeff();
}

void advance_uncontrolled(const IntegratorConfig& cfg, const OdeSystem& sys,
                          State& y, double s0, double ds) {
  if (ds <= 0.0) return;
  if (cfg.method == IntegratorConfig::Method::FixedRK4)
    Rk4().do_step(sys, y, s0, ds);
  else
    Rk78().do_step(sys, y, s0, ds);
}

}  // namespace

Trajectory integrate_impl(const models::HamiltonianModel& model,
                          const PhasePoint& z0, double t0, double t1,
                          const IntegratorConfig& cfg, bool variational) {
  require_chart(z0, model.chart(), "integrate");
  if (!std::isfinite(t0) || !std::isfinite(t1))
    throw UsageError("integrate: non-finite time span");

  Trajectory traj;
  traj.model_ = &model;
  traj.cfg_ = cfg;
  traj.chart_ = model.chart();

  const double span = std::abs(t1 - t0);
  const double sign = (t1 >= t0) ? 1.0 : -1.0;
  OdeSystem sys{&model, sign, variational};

  State y(variational ? 20 : 4);
  for (int i = 0; i < 4; ++i) y[i] = z0.coords()[i];
  if (variational) { Eigen::Map<Mat4> u0(&y[4]); u0 = Mat4::Identity(); }

  traj.energy_ = model.value(z0.coords());
  traj.times_.push_back(t0);
  traj.states_.push_back(z0.coords());
  if (variational) traj.variational_.push_back(Mat4::Identity());

  auto record = [&](double s) {
    if (!all_finite(y))
      throw NumericalError(model.id() + ": non-finite state at t = " +
                           std::to_string(t0 + sign * s));
    Vec4 w(y[0], y[1], y[2], y[3]);
    traj.times_.push_back(t0 + sign * s);
    traj.states_.push_back(w);
    double drift = std::abs(model.value(w) - traj.energy_);
    traj.max_drift_ = std::max(traj.max_drift_, drift);
    if (variational) {
      Eigen::Map<const Mat4> u(&y[4]);
      traj.variational_.push_back(u);
      double r = symplectic_residual(u);
      traj.max_sympl_residual_ = std::max(traj.max_sympl_residual_, r);
      if (r > cfg.symplectic_residual_tol)
        throw NumericalError(model.id() + ": symplectic residual " +
                             std::to_string(r) + " exceeds tolerance at t = " +
                             std::to_string(t0 + sign * s));
    }
  };

  if (span == 0.0) return traj;

  const double min_dt = 1e-14 * std::max(1.0, span);
  if (cfg.method == IntegratorConfig::Method::FixedRK4) {
    double h = std::min(cfg.max_step, span);
    int n = std::max(1, int(std::ceil(span / h - 1e-12)));
    h = span / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      Rk4().do_step(sys, y, s, h);
      s += h;
      record(s);
    }
  } else {
    auto ctrl = ode::make_controlled(cfg.abs_tol, cfg.rel_tol, Rk78());
    double s = 0.0;
    double dt = std::min(cfg.max_step, span);
    while (s < span * (1.0 - 1e-15)) {
      dt = std::min({dt, cfg.max_step, span - s});
      auto res = ctrl.try_step(sys, y, s, dt);
      if (res == ode::success) {
        record(s);
      } else if (dt < min_dt) {
        throw NumericalError(model.id() + ": step size underflow at t = " +
                             std::to_string(t0 + sign * s) +
                             " (solution blow-up?)");
      }
    }
  }

  traj.drift_flagged_ = traj.max_drift_ > 10.0 * cfg.rel_tol * span;
  return traj;
}

Trajectory integrate(const models::HamiltonianModel& model,
                     const PhasePoint& z0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  return integrate_impl(model, z0, t0, t1, cfg, false);
}

Trajectory integrate_variational(const models::HamiltonianModel& model,
                                 const PhasePoint& z0, double t0, double t1,
                                 const IntegratorConfig& cfg) {
  return integrate_impl(model, z0, t0, t1, cfg, true);
}

void Trajectory::locate(double t, int& node, double& dt) const {
  double sign = backward() ? -1.0 : 1.0;
  double lo = std::min(t_begin(), t_end());
  double hi = std::max(t_begin(), t_end());
  double slack = 1e-12 * std::max(1.0, hi - lo);
  if (t < lo - slack || t > hi + slack)
    throw UsageError("Trajectory: query time outside the integrated span");
  int lo_i = 0, hi_i = int(times_.size()) - 1;
  while (lo_i < hi_i) {
    int mid = (lo_i + hi_i + 1) / 2;
    if (sign * times_[mid] <= sign * t + 1e-15)
      lo_i = mid;
    else
      hi_i = mid - 1;
  }
  node = lo_i;
  dt = std::abs(t - times_[node]);
}

PhasePoint Trajectory::state_at(double t) const {
  int node;
  double ds;
  locate(t, node, ds);
  if (ds == 0.0) return PhasePoint(states_[node], chart_);
  double sign = backward() ? -1.0 : 1.0;
  bool var = has_variational();
  State y(var ? 20 : 4);
  for (int i = 0; i < 4; ++i) y[i] = states_[node][i];
  if (var) { Eigen::Map<Mat4> un(&y[4]); un = variational_[node]; }
  OdeSystem sys{model_, sign, var};
  advance_uncontrolled(cfg_, sys, y, 0.0, ds);
  return PhasePoint(Vec4(y[0], y[1], y[2], y[3]), chart_);
}

Mat4 Trajectory::variational_at(double t) const {
  if (!has_variational())
    throw UsageError("Trajectory: no variational matrices stored");
  int node;
  double ds;
  locate(t, node, ds);
  if (ds == 0.0) return variational_[node];
  double sign = backward() ? -1.0 : 1.0;
  State y(20);
  for (int i = 0; i < 4; ++i) y[i] = states_[node][i];
  { Eigen::Map<Mat4> un(&y[4]); un = variational_[node]; }
  OdeSystem sys{model_, sign, true};
  advance_uncontrolled(cfg_, sys, y, 0.0, ds);
  return Eigen::Map<const Mat4>(&y[4]);
}

std::vector<Crossing> event_crossing(const Trajectory& traj, const Event& ev,
                                     Direction dir, double g_tol) {
  const auto& times = traj.times();
  if (times.empty()) throw UsageError("event_crossing: empty trajectory");
  const double span = std::abs(traj.t_end() - traj.t_begin());

  auto g_at = [&](double t) { return ev.g(traj.state_at(t).coords()); };
  auto dgdt_at = [&](double t) {
    if (ev.grad) {
      Vec4 w = traj.state_at(t).coords();
      Vec4 gh = traj.model().gradient(w);
      Vec4 xh(gh[2], gh[3], -gh[0], -gh[1]);
      return ev.grad(w).dot(xh);
    }
    double h = std::max(1e-7, 1e-9 * span);
    double lo = std::min(traj.t_begin(), traj.t_end());
    double hi = std::max(traj.t_begin(), traj.t_end());
    double ta = std::max(lo, t - h), tb = std::min(hi, t + h);
    return (g_at(tb) - g_at(ta)) / (tb - ta);
  };
  auto matches = [&](double dgdt) {
    switch (dir) {
      case Direction::Up: return dgdt > 0.0;
      case Direction::Down: return dgdt < 0.0;
      case Direction::Both: return dgdt != 0.0;
    }
    return false;
  };

  std::vector<Crossing> out;
  auto push = [&](double t) {
    double dgdt = dgdt_at(t);
    if (!matches(dgdt)) return;
    for (const auto& c : out)
      if (std::abs(c.t - t) < 1e-9 * std::max(1.0, span)) return;
    out.push_back(Crossing{t, traj.state_at(t), dgdt});
  };

  // Boundary convention: a start point already on the section counts as a
  // crossing iff its dg/dt matches the direction filter.
  if (std::abs(g_at(times.front())) <= g_tol) push(times.front());

  if (times.size() < 2) return out;

  const int subdiv = 8;
  for (size_t i = 0; i + 1 < times.size(); ++i) {
    double ta = times[i];
    double hstep = (times[i + 1] - times[i]) / subdiv;
    double ga = g_at(ta);
    for (int k = 1; k <= subdiv; ++k) {
      double tb = (k == subdiv) ? times[i + 1] : times[i] + k * hstep;
      double gb = g_at(tb);
      if ((ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0)) {
        double lo = std::min(ta, tb), hi = std::max(ta, tb);
        double root = refine_root([&](double t) { return g_at(t); }, lo, hi,
                                  g_tol);
        for (int it = 0; it < 5 && std::abs(g_at(root)) > g_tol; ++it) {
          double d = dgdt_at(root);
          if (std::abs(d) < 1e-14) break;
          double next = root - g_at(root) / d;
          if (next < lo || next > hi) break;
          root = next;
        }
        if (std::abs(g_at(root)) > g_tol)
          throw NumericalError("event_crossing: root polish did not reach "
                               "the |g| tolerance");
        push(root);
      }
      ta = tb;
      ga = gb;
    }
  }
  return out;
}

}  // namespace s23::flow
