#ifndef SADDLE23_PHASE_HPP
#define SADDLE23_PHASE_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace s23 {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Thrown on malformed input: chart mismatch, bad parameters, unknown names.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure fails to meet its contract
/// (non-convergence, step underflow, residual above tolerance, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coordinate chart a phase-space point lives in. Global coordinates are
/// (x1,x2,y1,y2); normal-form coordinates are (q1,q2,p1,p2). Both carry the
/// symplectic form sum d(momentum_i) ^ d(position_i).
enum class Chart { Global, NormalForm };

inline const char* chart_name(Chart c) {
  return c == Chart::Global ? "global" : "normal_form";
}

/// A point of R^4 tagged with its chart. The tag is fixed at construction;
/// operations on mismatched charts throw UsageError.
class PhasePoint {
public:
  PhasePoint(const Vec4& coords, Chart chart) : v_(coords), chart_(chart) {
    if (!v_.allFinite())
      throw UsageError("PhasePoint: non-finite coordinates");
  }
  PhasePoint(double c0, double c1, double c2, double c3, Chart chart)
      : PhasePoint(Vec4(c0, c1, c2, c3), chart) {}

  const Vec4& coords() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  Chart chart() const { return chart_; }

private:
  Vec4 v_;
  Chart chart_;
};

inline void require_chart(const PhasePoint& p, Chart expected,
                          const char* where) {
  if (p.chart() != expected)
    throw UsageError(std::string(where) + ": expected chart " +
                     chart_name(expected) + ", got " + chart_name(p.chart()));
}

/// Matrix of the standard symplectic form, omega0(u,v) = u^T Omega v,
/// with coordinates ordered (position1, position2, momentum1, momentum2).
inline Mat4 symplectic_form_matrix() {
  Mat4 m = Mat4::Zero();
  m(0, 2) = -1.0;
  m(1, 3) = -1.0;
  m(2, 0) = 1.0;
  m(3, 1) = 1.0;
  return m;
}

/// The matrix J with X_H = J * grad(H); equals the quaternionic map j3.
inline Mat4 poisson_matrix() {
  Mat4 m = Mat4::Zero();
  m(0, 2) = 1.0;
  m(1, 3) = 1.0;
  m(2, 0) = -1.0;
  m(3, 1) = -1.0;
  return m;
}

}  // namespace s23

#endif
