#include "saddle23/util.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace s23 {

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  // Newton iteration on Legendre polynomials, Chebyshev initial guesses.
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule[i] = {x, w};
    rule[n - 1 - i] = {-x, w};
  }
  cache[n] = rule;
  return rule;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int segments, int order) {
  auto rule = gauss_legendre(order);
  double total = 0.0;
  double h = (b - a) / segments;
  for (int s = 0; s < segments; ++s) {
    double lo = a + s * h;
    double mid = lo + 0.5 * h;
    double half = 0.5 * h;
    for (auto [x, w] : rule) total += w * half * f(mid + half * x);
  }
  return total;
}

double refine_root(const std::function<double(double)>& f, double a, double b,
                   double ftol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    throw std::runtime_error("refine_root: endpoints do not bracket a root");
  for (int i = 0; i < max_iter; ++i) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (std::abs(fm) < ftol || 0.5 * (b - a) < 1e-16 * (1.0 + std::abs(m))) {
      // Secant polish from the bisection estimate.
      double x0 = a, x1 = b, f0 = fa, f1 = fb;
      for (int k = 0; k < 8; ++k) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (x2 < std::min(a, b) || x2 > std::max(a, b)) break;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if (std::abs(f1) < ftol) return x1;
      }
      return std::abs(f1) < std::abs(fm) ? x1 : m;
    }
    if (fa * fm <= 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace s23
