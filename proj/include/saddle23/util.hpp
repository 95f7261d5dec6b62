#ifndef SADDLE23_UTIL_HPP
#define SADDLE23_UTIL_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace s23 {

/// Deterministic random source. Wraps a fixed-algorithm generator and maps
/// raw 64-bit draws to doubles itself, so streams are identical across
/// platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // xorshift* generator; period 2^64-1, plenty for sampling work.
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545f4914f6cdd1dull;
  }

  /// Uniform in [0,1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
  std::uint64_t s_;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

/// Integrate f over [a,b] with a fixed composite Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int segments = 8, int order = 16);

/// Scalar root refinement: bisection on a bracketing interval followed by a
/// secant polish. Requires f(a) and f(b) of opposite sign (or zero).
double refine_root(const std::function<double(double)>& f, double a, double b,
                   double ftol, int max_iter = 200);

}  // namespace s23

#endif
