#ifndef SADDLE23_SAMPLING_HPP
#define SADDLE23_SAMPLING_HPP

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "saddle23/models.hpp"
#include "saddle23/util.hpp"

namespace s23::sampling {

struct Box4 {
  Vec4 lo;
  Vec4 hi;
};

/// Newton projection of w onto the level {H = level} along grad H.
/// Returns false if the iteration stalls or leaves the finite regime.
bool project_to_level(const models::HamiltonianModel& model, Vec4& w,
                      double level, double tol = 1e-12, int max_iter = 60);

/// Rejection sampling on a bounding box followed by Newton projection along
/// the gradient; `accept` (optional) filters samples after projection.
std::vector<Vec4> sample_level_set(
    const models::HamiltonianModel& model, double level, const Box4& box,
    int count, Rng& rng,
    const std::function<bool(const Vec4&)>& accept = nullptr,
    int max_draws_per_sample = 10000);

/// Uniform direction on the unit sphere S^{n-1} embedded in the first n
/// slots of a Vec4 (Gaussian normalization, deterministic Rng stream).
Vec4 sphere_direction(Rng& rng, int n);

}  // namespace s23::sampling

#endif
