#include "saddle23/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "saddle23/frame_index.hpp"

namespace s23::geom {

namespace {

using Eigen::Vector2d;

struct Segment {
  Vector2d a, b;
};

Vector2d lerp_zero(const Vector2d& p, const Vector2d& q, double fp,
                   double fq) {
  double t = fp / (fp - fq);
  return p + t * (q - p);
}

long quantize(const Vector2d& p, double cell) {
  long ix = std::lround(p.x() / cell);
  long iy = std::lround(p.y() / cell);
  return ix * 1000003L + iy;
}

}  // namespace

HillRegion hill_region(const models::HamiltonianModel& model, double energy,
                       const Window2& window, int resolution) {
  if (!model.has_potential_split())
    throw UsageError("hill_region: model has no kinetic+potential split");
  if (resolution < 8) throw UsageError("hill_region: resolution too small");

  HillRegion out;
  out.energy = energy;
  out.window = window;
  out.resolution = resolution;
  out.near_critical =
      std::abs(energy - model.critical_energy()) <
      1e-9 * std::max(1.0, std::abs(model.critical_energy()));

  const int n = resolution;
  const double dx = (window.x_hi - window.x_lo) / (n - 1);
  const double dy = (window.y_hi - window.y_lo) / (n - 1);
  std::vector<double> f(static_cast<size_t>(n) * n);
  auto at = [&](int i, int j) -> double& { return f[size_t(j) * n + i]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      at(i, j) =
          model.potential(window.x_lo + i * dx, window.y_lo + j * dy) - energy;

  // Marching squares with linear interpolation; ambiguous cells resolved by
  // the center sample.
  std::vector<Segment> segments;
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      double f00 = at(i, j), f10 = at(i + 1, j);
      double f01 = at(i, j + 1), f11 = at(i + 1, j + 1);
      int c = (f00 <= 0) | ((f10 <= 0) << 1) | ((f11 <= 0) << 2) |
              ((f01 <= 0) << 3);
      if (c == 0 || c == 15) continue;
      Vector2d p00(window.x_lo + i * dx, window.y_lo + j * dy);
      Vector2d p10 = p00 + Vector2d(dx, 0), p01 = p00 + Vector2d(0, dy);
      Vector2d p11 = p00 + Vector2d(dx, dy);
      Vector2d eb = lerp_zero(p00, p10, f00, f10);  // bottom
      Vector2d er = lerp_zero(p10, p11, f10, f11);  // right
      Vector2d et = lerp_zero(p01, p11, f01, f11);  // top
      Vector2d el = lerp_zero(p00, p01, f00, f01);  // left
      auto add = [&](const Vector2d& a, const Vector2d& b) {
        segments.push_back({a, b});
      };
      switch (c) {
        case 1: case 14: add(el, eb); break;
        case 2: case 13: add(eb, er); break;
        case 3: case 12: add(el, er); break;
        case 4: case 11: add(er, et); break;
        case 6: case 9: add(eb, et); break;
        case 7: case 8: add(el, et); break;
        case 5: case 10: {
          double fc = 0.25 * (f00 + f10 + f01 + f11);
          bool join = (c == 5) == (fc <= 0);
          if (join) {
            add(el, eb);
            add(er, et);
          } else {
            add(el, et);
            add(eb, er);
          }
          break;
        }
      }
    }
  }

  // Chain segments into polylines by shared endpoints.
  double cell = 1e-7 * std::min(dx, dy);
  std::multimap<long, size_t> ends;
  for (size_t s = 0; s < segments.size(); ++s) {
    ends.insert({quantize(segments[s].a, cell), s});
    ends.insert({quantize(segments[s].b, cell), s});
  }
  std::vector<bool> used(segments.size(), false);
  for (size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::deque<Vector2d> chain = {segments[s].a, segments[s].b};
    for (int side = 0; side < 2; ++side) {
      while (true) {
        const Vector2d& tip = side == 0 ? chain.back() : chain.front();
        auto range = ends.equal_range(quantize(tip, cell));
        size_t next = segments.size();
        for (auto it = range.first; it != range.second; ++it)
          if (!used[it->second]) next = it->second;
        if (next == segments.size()) break;
        used[next] = true;
        const Segment& sg = segments[next];
        Vector2d other =
            (sg.a - tip).norm() < (sg.b - tip).norm() ? sg.b : sg.a;
        if (side == 0)
          chain.push_back(other);
        else
          chain.push_front(other);
      }
    }
    out.boundary.emplace_back(chain.begin(), chain.end());
  }

  // Component count by flood fill of the node mask {U <= E}.
  std::vector<int> label(static_cast<size_t>(n) * n, 0);
  int components = 0;
  std::deque<std::pair<int, int>> queue;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (at(i, j) > 0 || label[size_t(j) * n + i]) continue;
      ++components;
      queue.push_back({i, j});
      label[size_t(j) * n + i] = components;
      while (!queue.empty()) {
        auto [ci, cj] = queue.front();
        queue.pop_front();
        const int di[] = {1, -1, 0, 0};
        const int dj[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int ni = ci + di[d], nj = cj + dj[d];
          if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
          if (at(ni, nj) > 0 || label[size_t(nj) * n + ni]) continue;
          label[size_t(nj) * n + ni] = components;
          queue.push_back({ni, nj});
        }
      }
    }
  }
  out.component_count = components;
  return out;
}

SphereSamples sphere_NdeltaE(const models::NormalFormParams& params, double e,
                             double delta, int n_samples, Rng& rng) {
  if (e < 0.0 || delta < 0.0 || (e == 0.0 && delta == 0.0))
    throw UsageError("sphere_NdeltaE: requires E, delta >= 0, not both zero");
  models::NormalFormModel model(params);

  SphereSamples out;
  out.k_squared = e + params.alpha * delta * delta / 4.0;
  const double k = std::sqrt(out.k_squared);
  const double sq_a = std::sqrt(params.alpha);
  const double s_2w = std::sqrt(2.0 / params.omega);

  auto pack = [&](double q1, double q2, double p2) {
    return Vec4(q1, q2, delta - q1, p2);
  };

  out.points.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Vec4 dir = sampling::sphere_direction(rng, 3);
    double q1 = (k / sq_a) * dir[0] + delta / 2.0;
    double q2 = k * s_2w * dir[1];
    double p2 = k * s_2w * dir[2];
    Vec4 raw = pack(q1, q2, p2);
    out.max_raw_residual =
        std::max(out.max_raw_residual,
                 std::abs(model.value(raw) - e) / out.k_squared);

    // Radial Newton inside the plane {q1 + p1 = delta}, center (delta/2,0,0).
    Vec3 u(q1 - delta / 2.0, q2, p2);
    double rho = u.norm();
    if (rho < 1e-14)
      throw NumericalError("sphere_NdeltaE: degenerate parameterization ray");
    Vec3 d = u / rho;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      Vec4 z = pack(delta / 2.0 + rho * d[0], rho * d[1], rho * d[2]);
      double r = model.value(z) - e;
      if (std::abs(r) < 1e-13) {
        converged = true;
        break;
      }
      Vec4 g = model.gradient(z);
      double drho = g[0] * d[0] + g[1] * d[1] - g[2] * d[0] + g[3] * d[2];
      if (std::abs(drho) < 1e-16) break;
      rho -= r / drho;
      if (!(rho > 0.0) || !std::isfinite(rho)) break;
    }
    if (!converged)
      throw NumericalError(
          "sphere_NdeltaE: Newton projection failed (smallness regime "
          "violated?)");
    Vec4 z = pack(delta / 2.0 + rho * d[0], rho * d[1], rho * d[2]);
    out.max_projected_residual =
        std::max(out.max_projected_residual, std::abs(model.value(z) - e));
    out.max_plane_residual =
        std::max(out.max_plane_residual, std::abs(z[0] + z[2] - delta));
    out.points.push_back(z);
  }
  return out;
}

ConvexityScan convexity_scan(const models::HamiltonianModel& model,
                             const std::vector<Vec4>& level_samples,
                             double exclusion_radius) {
  ConvexityScan out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  const Vec4 pc = model.equilibrium().coords();
  for (const Vec4& w : level_samples) {
    if ((w - pc).norm() < exclusion_radius) {
      ++out.samples_excluded;
      continue;
    }
    frame::TransverseFrame f = frame::frame_at(model, w);
    Mat4 h = model.hessian(w);
    Mat3 b;
    const Vec4* xs[] = {&f.x1, &f.x2, &f.x3};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = xs[i]->dot(h * (*xs[j]));
    Eigen::SelfAdjointEigenSolver<Mat3> es(b);
    double lam = es.eigenvalues()[0];
    ++out.samples_used;
    if (lam < out.min_eigenvalue) {
      out.min_eigenvalue = lam;
      out.argmin = w;
    }
  }
  if (out.samples_used == 0)
    throw UsageError("convexity_scan: no samples outside the exclusion ball");
  return out;
}

QpProjection qp_projection(const std::vector<PhasePoint>& samples) {
  QpProjection out;
  out.points.reserve(samples.size());
  double i1_min = std::numeric_limits<double>::infinity();
  double i1_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    require_chart(p, Chart::NormalForm, "qp_projection");
    out.points.emplace_back(p[0], p[2]);
    double i1 = p[0] * p[2];
    i1_min = std::min(i1_min, i1);
    i1_max = std::max(i1_max, i1);
  }
  if (!samples.empty())
    out.i1_levels = {i1_min, 0.5 * (i1_min + i1_max), i1_max};
  return out;
}

}  // namespace s23::geom
