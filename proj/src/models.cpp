#include "saddle23/models.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "saddle23/util.hpp"

namespace s23::models {

Evaluation eval(const HamiltonianModel& model, const PhasePoint& p) {
  require_chart(p, model.chart(), "eval");
  const Vec4& w = p.coords();
  return Evaluation{model.value(w), model.gradient(w), model.hessian(w)};
}

Vec4 hamiltonian_vector_field(const HamiltonianModel& model,
                              const PhasePoint& p) {
  require_chart(p, model.chart(), "hamiltonian_vector_field");
  Vec4 g = model.gradient(p.coords());
  return Vec4(g[2], g[3], -g[0], -g[1]);
}

EquilibriumClass classify_equilibrium(const HamiltonianModel& model,
                                      const PhasePoint& p,
                                      double gradient_tol) {
  require_chart(p, model.chart(), "classify_equilibrium");
  Vec4 g = model.gradient(p.coords());
  if (g.norm() > gradient_tol)
    throw UsageError("classify_equilibrium: point is not an equilibrium "
                     "(|grad| = " + std::to_string(g.norm()) + ")");

  Mat4 a = poisson_matrix() * model.hessian(p.coords());
  Eigen::EigenSolver<Mat4> es(a);
  std::array<std::complex<double>, 4> spec;
  for (int i = 0; i < 4; ++i) spec[i] = es.eigenvalues()[i];

  // Saddle-center pattern: two real +-alpha, two imaginary +-i omega.
  std::vector<double> reals, imags;
  double scale = 0.0;
  for (auto& ev : spec) scale = std::max(scale, std::abs(ev));
  double tol = 1e-8 * std::max(1.0, scale);
  for (auto& ev : spec) {
    if (std::abs(ev.imag()) < tol && std::abs(ev.real()) > tol)
      reals.push_back(ev.real());
    else if (std::abs(ev.real()) < tol && std::abs(ev.imag()) > tol)
      imags.push_back(ev.imag());
  }
  if (reals.size() == 2 && imags.size() == 2 &&
      std::abs(reals[0] + reals[1]) < tol &&
      std::abs(imags[0] + imags[1]) < tol) {
    return SaddleCenter{std::abs(reals[0]), std::abs(imags[0])};
  }
  return OtherEquilibrium{spec};
}

// ---------------------------------------------------------------- polynomial

ActionPolynomial::ActionPolynomial(std::vector<Term> terms)
    : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.deg1 < 0 || t.deg2 < 0 || t.deg1 + t.deg2 < 2)
      throw UsageError("ActionPolynomial: remainder monomials must have "
                       "total degree >= 2");
  }
}

static double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double ActionPolynomial::value(double i1, double i2) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff * ipow(i1, t.deg1) * ipow(i2, t.deg2);
  return s;
}

double ActionPolynomial::d1(double i1, double i2) const {
  double s = 0.0;
  for (const auto& t : terms_)
    if (t.deg1 > 0)
      s += t.coeff * t.deg1 * ipow(i1, t.deg1 - 1) * ipow(i2, t.deg2);
  return s;
}

double ActionPolynomial::d2(double i1, double i2) const {
  double s = 0.0;
  for (const auto& t : terms_)
    if (t.deg2 > 0)
      s += t.coeff * t.deg2 * ipow(i1, t.deg1) * ipow(i2, t.deg2 - 1);
  return s;
}

double ActionPolynomial::d11(double i1, double i2) const {
  double s = 0.0;
  for (const auto& t : terms_)
    if (t.deg1 > 1)
      s += t.coeff * t.deg1 * (t.deg1 - 1) * ipow(i1, t.deg1 - 2) *
           ipow(i2, t.deg2);
  return s;
}

double ActionPolynomial::d12(double i1, double i2) const {
  double s = 0.0;
  for (const auto& t : terms_)
    if (t.deg1 > 0 && t.deg2 > 0)
      s += t.coeff * t.deg1 * t.deg2 * ipow(i1, t.deg1 - 1) *
           ipow(i2, t.deg2 - 1);
  return s;
}

double ActionPolynomial::d22(double i1, double i2) const {
  double s = 0.0;
  for (const auto& t : terms_)
    if (t.deg2 > 1)
      s += t.coeff * t.deg2 * (t.deg2 - 1) * ipow(i1, t.deg1) *
           ipow(i2, t.deg2 - 2);
  return s;
}

ActionPolynomial ActionPolynomial::parse(const std::string& spec) {
  std::vector<Term> terms;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    Term t{};
    char c1, c2;
    std::stringstream ts(item);
    if (!(ts >> t.deg1 >> c1 >> t.deg2 >> c2 >> t.coeff) || c1 != ',' ||
        c2 != ',')
      throw UsageError("ActionPolynomial: cannot parse term '" + item +
                       "' (expected 'deg1,deg2,coeff')");
    terms.push_back(t);
  }
  return ActionPolynomial(std::move(terms));
}

// --------------------------------------------------------------- operations

std::pair<double, double> actions(const PhasePoint& z) {
  require_chart(z, Chart::NormalForm, "actions");
  const Vec4& v = z.coords();
  return {v[0] * v[2], 0.5 * (v[1] * v[1] + v[3] * v[3])};
}

double i2_of_i1(const NormalFormParams& params, double i1, double energy) {
  double i2 = (params.alpha * i1 + energy) / params.omega;
  for (int iter = 0; iter < 50; ++iter) {
    double r = params.k_value(i1, i2) - energy;
    if (std::abs(r) < 1e-13) return i2;
    double d = params.omega_bar(i1, i2);
    if (std::abs(d) < 1e-14)
      throw NumericalError("i2_of_i1: vanishing dK/dI2 during Newton");
    i2 -= r / d;
  }
  throw NumericalError("i2_of_i1: Newton did not converge (I1 = " +
                       std::to_string(i1) + ", E = " + std::to_string(energy) +
                       "); outside the normal-form validity region?");
}

double i1_minus(const NormalFormParams& params, double energy) {
  if (!(energy > 0.0)) throw UsageError("i1_minus: requires E > 0");
  auto f = [&](double i1) { return params.k_value(i1, 0.0) - energy; };
  // K(I1,0) = -alpha*I1 + R(I1,0) crosses E at some I1 < 0; widen the
  // bracket geometrically from the linear estimate.
  double lo = -energy / params.alpha;
  double hi = 0.0;
  int guard = 0;
  while (f(lo) < 0.0) {
    lo *= 2.0;
    if (++guard > 60)
      throw NumericalError("i1_minus: failed to bracket the root");
  }
  return refine_root(f, lo, hi, 1e-15);
}

PhasePoint involution_T(const PhasePoint& z) {
  require_chart(z, Chart::NormalForm, "involution_T");
  const Vec4& v = z.coords();
  return PhasePoint(-v[0], v[1], -v[2], v[3], Chart::NormalForm);
}

PhasePoint exact_normal_form_flow(const NormalFormParams& params,
                                  const PhasePoint& z0, double t) {
  require_chart(z0, Chart::NormalForm, "exact_normal_form_flow");
  const Vec4& v = z0.coords();
  auto [i1, i2] = actions(z0);
  double ab = params.alpha_bar(i1, i2);
  double ob = params.omega_bar(i1, i2);
  double q1 = v[0] * std::exp(-ab * t);
  double p1 = v[2] * std::exp(ab * t);
  double c = std::cos(ob * t), s = std::sin(ob * t);
  // (q2 + i p2)(t) = (q2 + i p2)(0) e^{-i omega_bar t}
  double q2 = v[1] * c + v[3] * s;
  double p2 = -v[1] * s + v[3] * c;
  return PhasePoint(q1, q2, p1, p2, Chart::NormalForm);
}

// -------------------------------------------------------------- normal form

NormalFormModel::NormalFormModel(NormalFormParams params)
    : params_(std::move(params)) {
  if (!(params_.alpha > 0.0) || !(params_.omega > 0.0))
    throw UsageError("NormalFormModel: requires alpha > 0 and omega > 0");
}

double NormalFormModel::value(const Vec4& z) const {
  double i1 = z[0] * z[2];
  double i2 = 0.5 * (z[1] * z[1] + z[3] * z[3]);
  return params_.k_value(i1, i2);
}

Vec4 NormalFormModel::gradient(const Vec4& z) const {
  double i1 = z[0] * z[2];
  double i2 = 0.5 * (z[1] * z[1] + z[3] * z[3]);
  double k1 = -params_.alpha_bar(i1, i2);  // dK/dI1
  double k2 = params_.omega_bar(i1, i2);   // dK/dI2
  return Vec4(k1 * z[2], k2 * z[1], k1 * z[0], k2 * z[3]);
}

Mat4 NormalFormModel::hessian(const Vec4& z) const {
  double i1 = z[0] * z[2];
  double i2 = 0.5 * (z[1] * z[1] + z[3] * z[3]);
  double k1 = -params_.alpha_bar(i1, i2);
  double k2 = params_.omega_bar(i1, i2);
  double k11 = params_.remainder.d11(i1, i2);
  double k12 = params_.remainder.d12(i1, i2);
  double k22 = params_.remainder.d22(i1, i2);
  Vec4 g1(z[2], 0.0, z[0], 0.0);  // grad I1
  Vec4 g2(0.0, z[1], 0.0, z[3]);  // grad I2
  Mat4 h = Mat4::Zero();
  h(0, 2) = h(2, 0) = k1;          // k1 * hess(I1)
  h(1, 1) = h(3, 3) = k2;          // k2 * hess(I2)
  h += k11 * g1 * g1.transpose() + k22 * g2 * g2.transpose() +
       k12 * (g1 * g2.transpose() + g2 * g1.transpose());
  return h;
}

std::vector<Mat4> NormalFormModel::symmetries() const {
  Mat4 t = Mat4::Identity();
  t(0, 0) = -1.0;
  t(2, 2) = -1.0;
  return {t};
}

// --------------------------------------------------------------------- Ham1

Ham1Model::Ham1Model(double k) : k_(k) {
  if (!(k < 0.0)) throw UsageError("ham1: requires k < 0");
  alpha_ = std::sqrt(-k);
}

double Ham1Model::potential(double x1, double x2) const {
  double s = x1 * x1 + x2 * x2;
  return 0.5 * (x1 * x1 + k_ * x2 * x2) + 0.5 * s * s;
}

double Ham1Model::value(const Vec4& w) const {
  return 0.5 * (w[2] * w[2] + w[3] * w[3]) + potential(w[0], w[1]);
}

Vec4 Ham1Model::gradient(const Vec4& w) const {
  double s = w[0] * w[0] + w[1] * w[1];
  return Vec4(w[0] * (1.0 + 2.0 * s), w[1] * (k_ + 2.0 * s), w[2], w[3]);
}

Mat4 Ham1Model::hessian(const Vec4& w) const {
  double s = w[0] * w[0] + w[1] * w[1];
  Mat4 h = Mat4::Zero();
  h(0, 0) = 1.0 + 2.0 * s + 4.0 * w[0] * w[0];
  h(0, 1) = h(1, 0) = 4.0 * w[0] * w[1];
  h(1, 1) = k_ + 2.0 * s + 4.0 * w[1] * w[1];
  h(2, 2) = h(3, 3) = 1.0;
  return h;
}

std::vector<Mat4> Ham1Model::symmetries() const {
  // (x1,y1) -> -(x1,y1) and (x2,y2) -> -(x2,y2); both symplectic.
  Mat4 s1 = Mat4::Identity();
  s1(0, 0) = s1(2, 2) = -1.0;
  Mat4 s2 = Mat4::Identity();
  s2(1, 1) = s2(3, 3) = -1.0;
  return {s1, s2};
}

// --------------------------------------------------------------------- Ham2

Ham2Model::Ham2Model(double b) : b_(b) {
  if (!(b > 0.0 && b < 1.0)) throw UsageError("ham2: requires 0 < b < 1");
  // Linearization at p_c = (0,1,0,0): d^2U = diag(1+2b, -1).
  alpha_ = 1.0;
  omega_ = std::sqrt(1.0 + 2.0 * b);
}

double Ham2Model::potential(double x1, double x2) const {
  return 0.5 * (x1 * x1 + x2 * x2) + b_ * x1 * x1 * x2 - x2 * x2 * x2 / 3.0;
}

double Ham2Model::value(const Vec4& w) const {
  return 0.5 * (w[2] * w[2] + w[3] * w[3]) + potential(w[0], w[1]);
}

Vec4 Ham2Model::gradient(const Vec4& w) const {
  return Vec4(w[0] + 2.0 * b_ * w[0] * w[1],
              w[1] + b_ * w[0] * w[0] - w[1] * w[1], w[2], w[3]);
}

Mat4 Ham2Model::hessian(const Vec4& w) const {
  Mat4 h = Mat4::Zero();
  h(0, 0) = 1.0 + 2.0 * b_ * w[1];
  h(0, 1) = h(1, 0) = 2.0 * b_ * w[0];
  h(1, 1) = 1.0 - 2.0 * w[1];
  h(2, 2) = h(3, 3) = 1.0;
  return h;
}

std::vector<Mat4> Ham2Model::symmetries() const {
  Mat4 s1 = Mat4::Identity();
  s1(0, 0) = s1(2, 2) = -1.0;
  return {s1};
}

// ------------------------------------------------------------------ factory

static double parse_double(const std::map<std::string, std::string>& m,
                           const std::string& key, double fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw UsageError("make_model: bad numeric value for '" + key + "': " +
                     it->second);
  }
}

std::unique_ptr<HamiltonianModel> make_model(
    const std::string& name, const std::map<std::string, std::string>& params) {
  if (name == "ham1")
    return std::make_unique<Ham1Model>(parse_double(params, "k", -1.0));
  if (name == "ham2")
    return std::make_unique<Ham2Model>(parse_double(params, "b", 0.5));
  if (name == "normal_form") {
    NormalFormParams p;
    p.alpha = parse_double(params, "alpha", 1.0);
    p.omega = parse_double(params, "omega", 1.0);
    auto it = params.find("remainder");
    if (it != params.end()) p.remainder = ActionPolynomial::parse(it->second);
    return std::make_unique<NormalFormModel>(p);
  }
  throw UsageError("make_model: unknown model '" + name +
                   "' (expected ham1, ham2 or normal_form)");
}

}  // namespace s23::models
