#ifndef SADDLE23_MODELS_HPP
#define SADDLE23_MODELS_HPP

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "saddle23/phase.hpp"

namespace s23::models {

/// Value, gradient and Hessian of a Hamiltonian at one point.
struct Evaluation {
  double value;
  Vec4 gradient;
  Mat4 hessian;
};

/// A Hamiltonian on R^4 with a saddle-center equilibrium: smooth evaluators
/// plus the equilibrium metadata used throughout (p_c, alpha, omega, critical
/// energy, linear symmetries). Instances are immutable after construction and
/// evaluators are pure, so models are safe to share across threads.
class HamiltonianModel {
public:
  virtual ~HamiltonianModel() = default;

  virtual std::string id() const = 0;
  virtual Chart chart() const = 0;

  virtual double value(const Vec4& w) const = 0;
  virtual Vec4 gradient(const Vec4& w) const = 0;
  virtual Mat4 hessian(const Vec4& w) const = 0;

  virtual PhasePoint equilibrium() const = 0;
  virtual double critical_energy() const = 0;
  virtual double alpha() const = 0;
  virtual double omega() const = 0;

  /// Linear involutions of R^4 preserving H (identity excluded).
  virtual std::vector<Mat4> symmetries() const { return {}; }

  /// Kinetic-plus-potential structure H = |y|^2/2 + U(x), when present.
  virtual bool has_potential_split() const { return false; }
  virtual double potential(double, double) const {
    throw UsageError(id() + ": model has no kinetic+potential split");
  }

  /// Reversible under (x, y, t) -> (x, -y, -t)?
  virtual bool reversible() const { return has_potential_split(); }
};

Evaluation eval(const HamiltonianModel& model, const PhasePoint& p);
Vec4 hamiltonian_vector_field(const HamiltonianModel& model,
                              const PhasePoint& p);

struct SaddleCenter {
  double alpha;
  double omega;
};
struct OtherEquilibrium {
  std::array<std::complex<double>, 4> spectrum;
};
using EquilibriumClass = std::variant<SaddleCenter, OtherEquilibrium>;

/// Classify an equilibrium from the spectrum of DX_H: saddle-center when the
/// eigenvalues split into a real pair {a,-a} and an imaginary pair {iw,-iw}.
EquilibriumClass classify_equilibrium(const HamiltonianModel& model,
                                      const PhasePoint& p,
                                      double gradient_tol = 1e-9);

/// Polynomial in the two actions (I1, I2); every stored monomial has total
/// degree >= 2, matching the structure of the normal-form remainder.
class ActionPolynomial {
public:
  struct Term {
    int deg1;
    int deg2;
    double coeff;
  };

  ActionPolynomial() = default;
  explicit ActionPolynomial(std::vector<Term> terms);

  double value(double i1, double i2) const;
  double d1(double i1, double i2) const;
  double d2(double i1, double i2) const;
  double d11(double i1, double i2) const;
  double d12(double i1, double i2) const;
  double d22(double i1, double i2) const;

  const std::vector<Term>& terms() const { return terms_; }
  bool zero() const { return terms_.empty(); }

  /// Parse "i,j,c; i,j,c; ..." (empty string -> zero polynomial).
  static ActionPolynomial parse(const std::string& spec);

private:
  std::vector<Term> terms_;
};

/// Parameters of the local normal form K = -alpha*I1 + omega*I2 + R(I1,I2),
/// I1 = q1*p1, I2 = (q2^2+p2^2)/2.
struct NormalFormParams {
  double alpha = 1.0;
  double omega = 1.0;
  ActionPolynomial remainder;

  double k_value(double i1, double i2) const {
    return -alpha * i1 + omega * i2 + remainder.value(i1, i2);
  }
  /// alpha_bar = -dK/dI1, constant along trajectories.
  double alpha_bar(double i1, double i2) const {
    return alpha - remainder.d1(i1, i2);
  }
  /// omega_bar = dK/dI2, constant along trajectories.
  double omega_bar(double i1, double i2) const {
    return omega + remainder.d2(i1, i2);
  }
};

/// The actions (I1, I2) of a normal-form point.
std::pair<double, double> actions(const PhasePoint& z);

/// Solve K(I1, I2) = E for the I2 branch near 0 (Newton, seeded with the
/// linearization (alpha*I1 + E)/omega).
double i2_of_i1(const NormalFormParams& params, double i1, double energy);

/// The negative action bound I1^-(E): the I1 < 0 with I2(I1,E) = 0,
/// i.e. K(I1, 0) = E. Bisection plus secant polish.
double i1_minus(const NormalFormParams& params, double energy);

/// The involution T(q1,q2,p1,p2) = (-q1,q2,-p1,p2); satisfies K o T = K.
PhasePoint involution_T(const PhasePoint& z);

/// Closed-form normal-form flow: saddle motion e^{-+alpha_bar t} in (q1,p1)
/// and rotation e^{-i omega_bar t} in (q2+i p2), with the frequencies frozen
/// at the initial actions.
PhasePoint exact_normal_form_flow(const NormalFormParams& params,
                                  const PhasePoint& z0, double t);

class NormalFormModel : public HamiltonianModel {
public:
  explicit NormalFormModel(NormalFormParams params);

  std::string id() const override { return "normal_form"; }
  Chart chart() const override { return Chart::NormalForm; }
  double value(const Vec4& z) const override;
  Vec4 gradient(const Vec4& z) const override;
  Mat4 hessian(const Vec4& z) const override;
  PhasePoint equilibrium() const override {
    return PhasePoint(Vec4::Zero(), Chart::NormalForm);
  }
  double critical_energy() const override { return 0.0; }
  double alpha() const override { return params_.alpha; }
  double omega() const override { return params_.omega; }
  std::vector<Mat4> symmetries() const override;
  bool reversible() const override { return false; }

  const NormalFormParams& params() const { return params_; }

private:
  NormalFormParams params_;
};

/// H = (y1^2+y2^2)/2 + (x1^2 + k x2^2)/2 + (x1^2+x2^2)^2/2, k < 0.
/// Saddle-center at the origin on the critical level 0; the x2 direction is
/// the saddle, alpha = sqrt(-k), omega = 1.
class Ham1Model : public HamiltonianModel {
public:
  explicit Ham1Model(double k = -1.0);

  std::string id() const override { return "ham1"; }
  Chart chart() const override { return Chart::Global; }
  double value(const Vec4& w) const override;
  Vec4 gradient(const Vec4& w) const override;
  Mat4 hessian(const Vec4& w) const override;
  PhasePoint equilibrium() const override {
    return PhasePoint(Vec4::Zero(), Chart::Global);
  }
  double critical_energy() const override { return 0.0; }
  double alpha() const override { return alpha_; }
  double omega() const override { return 1.0; }
  std::vector<Mat4> symmetries() const override;
  bool has_potential_split() const override { return true; }
  double potential(double x1, double x2) const override;

  double k() const { return k_; }

private:
  double k_;
  double alpha_;
};

/// H = (y1^2+y2^2)/2 + (x1^2+x2^2)/2 + b x1^2 x2 - x2^3/3, 0 < b < 1
/// (b = 1 is Henon-Heiles). Saddle-center at (0,1,0,0) on the level 1/6;
/// alpha, omega are computed from the linearization at construction.
class Ham2Model : public HamiltonianModel {
public:
  explicit Ham2Model(double b = 0.5);

  std::string id() const override { return "ham2"; }
  Chart chart() const override { return Chart::Global; }
  double value(const Vec4& w) const override;
  Vec4 gradient(const Vec4& w) const override;
  Mat4 hessian(const Vec4& w) const override;
  PhasePoint equilibrium() const override {
    return PhasePoint(0.0, 1.0, 0.0, 0.0, Chart::Global);
  }
  double critical_energy() const override { return 1.0 / 6.0; }
  double alpha() const override { return alpha_; }
  double omega() const override { return omega_; }
  std::vector<Mat4> symmetries() const override;
  bool has_potential_split() const override { return true; }
  double potential(double x1, double x2) const override;

  double b() const { return b_; }

private:
  double b_;
  double alpha_;
  double omega_;
};

/// Build a model by name ("normal_form", "ham1", "ham2") and parameter map.
/// Recognized keys: k (ham1), b (ham2), alpha/omega/remainder (normal_form).
std::unique_ptr<HamiltonianModel> make_model(
    const std::string& name, const std::map<std::string, std::string>& params);

}  // namespace s23::models

#endif
