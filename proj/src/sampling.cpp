#include "saddle23/sampling.hpp"

#include <cmath>

namespace s23::sampling {

bool project_to_level(const models::HamiltonianModel& model, Vec4& w,
                      double level, double tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    double r = model.value(w) - level;
    if (std::abs(r) < tol) return true;
    Vec4 g = model.gradient(w);
    double g2 = g.squaredNorm();
    if (g2 < 1e-16 || !std::isfinite(g2)) return false;
    w -= (r / g2) * g;
    if (!w.allFinite()) return false;
  }
  return std::abs(model.value(w) - level) < tol;
}

std::vector<Vec4> sample_level_set(
    const models::HamiltonianModel& model, double level, const Box4& box,
    int count, Rng& rng, const std::function<bool(const Vec4&)>& accept,
    int max_draws_per_sample) {
  std::vector<Vec4> out;
  out.reserve(count);
  long budget = static_cast<long>(max_draws_per_sample) * count;
  while (static_cast<int>(out.size()) < count && budget-- > 0) {
    Vec4 w;
    for (int i = 0; i < 4; ++i) w[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (!project_to_level(model, w, level)) continue;
    bool inside = true;
    for (int i = 0; i < 4; ++i)
      inside = inside && w[i] >= box.lo[i] - 1e-9 && w[i] <= box.hi[i] + 1e-9;
    if (!inside) continue;
    if (accept && !accept(w)) continue;
    out.push_back(w);
  }
  if (static_cast<int>(out.size()) < count)
    throw NumericalError("sample_level_set: sampling budget exhausted (" +
                         std::to_string(out.size()) + "/" +
                         std::to_string(count) + " accepted)");
  return out;
}

Vec4 sphere_direction(Rng& rng, int n) {
  // Box-Muller pairs from the deterministic uniform stream.
  Vec4 v = Vec4::Zero();
  for (int i = 0; i < n; i += 2) {
    double u1 = std::max(rng.uniform(), 1e-300);
    double u2 = rng.uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    v[i] = rad * std::cos(2.0 * M_PI * u2);
    if (i + 1 < n) v[i + 1] = rad * std::sin(2.0 * M_PI * u2);
  }
  double norm = v.norm();
  if (norm < 1e-12) return sphere_direction(rng, n);
  return v / norm;
}

}  // namespace s23::sampling
