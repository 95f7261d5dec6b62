#include <doctest.h>

#include <cmath>

#include "saddle23/models.hpp"
#include "saddle23/util.hpp"

using namespace s23;
using namespace s23::models;

namespace {

Vec4 random_vec(Rng& rng, double scale) {
  return Vec4(rng.uniform(-scale, scale), rng.uniform(-scale, scale),
              rng.uniform(-scale, scale), rng.uniform(-scale, scale));
}

// Central finite differences of the value/gradient evaluators.
Vec4 fd_gradient(const HamiltonianModel& m, const Vec4& w, double h) {
  Vec4 g;
  for (int i = 0; i < 4; ++i) {
    Vec4 wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    g[i] = (m.value(wp) - m.value(wm)) / (2.0 * h);
  }
  return g;
}

Mat4 fd_hessian(const HamiltonianModel& m, const Vec4& w, double h) {
  Mat4 hess;
  for (int i = 0; i < 4; ++i) {
    Vec4 wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    hess.col(i) = (m.gradient(wp) - m.gradient(wm)) / (2.0 * h);
  }
  return hess;
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("eval at reference points") {
  Ham1Model ham1(-1.0);
  auto e1 = eval(ham1, PhasePoint(0, 0, 0, 0, Chart::Global));
  CHECK(e1.value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(e1.gradient.norm() == doctest::Approx(0.0).epsilon(1e-15));

  Ham2Model ham2(0.5);
  auto e2 = eval(ham2, PhasePoint(0, 1, 0, 0, Chart::Global));
  CHECK(e2.value == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(e2.gradient.norm() < 1e-14);

  NormalFormModel nf(NormalFormParams{1.0, 1.0, {}});
  auto e3 = eval(nf, PhasePoint(0.1, 0.0, 0.2, 0.0, Chart::NormalForm));
  CHECK(e3.value == doctest::Approx(-0.02).epsilon(1e-14));
}

TEST_CASE("eval rejects chart mismatch") {
  Ham1Model ham1(-1.0);
  CHECK_THROWS_AS(eval(ham1, PhasePoint(0, 0, 0, 0, Chart::NormalForm)),
                  UsageError);
  NormalFormModel nf(NormalFormParams{});
  CHECK_THROWS_AS(actions(PhasePoint(0, 0, 0, 0, Chart::Global)), UsageError);
}

TEST_CASE("hamiltonian vector field") {
  NormalFormModel nf(NormalFormParams{1.0, 1.0, {}});
  Vec4 v = hamiltonian_vector_field(nf, PhasePoint(1, 0, 0, 0,
                                                   Chart::NormalForm));
  CHECK(v.isApprox(Vec4(-1, 0, 0, 0), 1e-14));

  Ham1Model ham1(-1.0);
  Vec4 v2 = hamiltonian_vector_field(ham1, PhasePoint(0, 0, 1, 0,
                                                      Chart::Global));
  CHECK(v2.isApprox(Vec4(1, 0, 0, 0), 1e-14));

  // X_H vanishes at the equilibrium.
  Ham2Model ham2(0.5);
  CHECK(hamiltonian_vector_field(ham2, ham2.equilibrium()).norm() < 1e-14);
}

TEST_CASE("dH . X_H vanishes identically") {
  Rng rng(11);
  Ham1Model ham1(-1.0);
  Ham2Model ham2(0.5);
  NormalFormModel nf(NormalFormParams{
      1.3, 0.7, ActionPolynomial::parse("2,0,0.5; 0,2,-0.25; 1,1,0.1")});
  const HamiltonianModel* ms[] = {&ham1, &ham2, &nf};
  for (const auto* m : ms) {
    for (int i = 0; i < 10000; ++i) {
      Vec4 w = random_vec(rng, 0.8);
      Vec4 g = m->gradient(w);
      Vec4 xh(g[2], g[3], -g[0], -g[1]);
      CHECK(std::abs(g.dot(xh)) < 1e-12 * (1.0 + g.squaredNorm()));
    }
  }
}

TEST_CASE("gradient and hessian match finite differences") {
  Rng rng(5);
  Ham1Model ham1(-0.7);
  Ham2Model ham2(0.3);
  NormalFormModel nf(NormalFormParams{
      2.0, 0.5, ActionPolynomial::parse("2,0,1.0; 0,2,0.5")});
  const HamiltonianModel* ms[] = {&ham1, &ham2, &nf};
  for (const auto* m : ms) {
    for (int i = 0; i < 50; ++i) {
      Vec4 w = random_vec(rng, 0.6);
      Vec4 g = m->gradient(w);
      Vec4 gf = fd_gradient(*m, w, 1e-5);
      CHECK((g - gf).norm() < 1e-6 * (1.0 + g.norm()));
      Mat4 h = m->hessian(w);
      Mat4 hf = fd_hessian(*m, w, 1e-5);
      CHECK((h - hf).norm() < 1e-6 * (1.0 + h.norm()));
      CHECK((h - h.transpose()).norm() == 0.0);
    }
  }
}

TEST_CASE("classify equilibrium") {
  Ham1Model ham1(-1.0);
  auto c1 = classify_equilibrium(ham1, ham1.equilibrium());
  REQUIRE(std::holds_alternative<SaddleCenter>(c1));
  CHECK(std::get<SaddleCenter>(c1).alpha == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::get<SaddleCenter>(c1).omega == doctest::Approx(1.0).epsilon(1e-10));

  Ham2Model ham2(0.5);
  auto c2 = classify_equilibrium(ham2, ham2.equilibrium());
  REQUIRE(std::holds_alternative<SaddleCenter>(c2));
  CHECK(std::get<SaddleCenter>(c2).alpha ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::get<SaddleCenter>(c2).omega ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  NormalFormModel nf(NormalFormParams{2.0, 3.0, {}});
  auto c3 = classify_equilibrium(nf, nf.equilibrium());
  REQUIRE(std::holds_alternative<SaddleCenter>(c3));
  CHECK(std::get<SaddleCenter>(c3).alpha == doctest::Approx(2.0));
  CHECK(std::get<SaddleCenter>(c3).omega == doctest::Approx(3.0));

  // Not an equilibrium -> usage error.
  CHECK_THROWS_AS(
      classify_equilibrium(ham1, PhasePoint(0.1, 0, 0, 0, Chart::Global)),
      UsageError);

  // Stored alpha/omega agree with the classification for the examples.
  CHECK(ham2.alpha() == doctest::Approx(std::get<SaddleCenter>(c2).alpha)
                            .epsilon(1e-10));
  CHECK(ham2.omega() == doctest::Approx(std::get<SaddleCenter>(c2).omega)
                            .epsilon(1e-10));
}

TEST_CASE("equilibrium eigenvalue pattern within 1e-10") {
  Ham1Model ham1(-2.0);  // alpha = sqrt(2), omega = 1
  auto c = classify_equilibrium(ham1, ham1.equilibrium());
  REQUIRE(std::holds_alternative<SaddleCenter>(c));
  CHECK(std::abs(std::get<SaddleCenter>(c).alpha - std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(std::get<SaddleCenter>(c).omega - 1.0) < 1e-10);
}

TEST_CASE("actions") {
  auto [a0, b0] = actions(PhasePoint(0, 0, 0, 0, Chart::NormalForm));
  CHECK(a0 == 0.0);
  CHECK(b0 == 0.0);
  auto [a1, b1] = actions(PhasePoint(0.1, 0.3, 0.2, 0.4, Chart::NormalForm));
  CHECK(a1 == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(b1 == doctest::Approx(0.125).epsilon(1e-14));
  auto [a2, b2] = actions(PhasePoint(-0.1, 0, 0.1, 0, Chart::NormalForm));
  CHECK(a2 == doctest::Approx(-0.01).epsilon(1e-14));
  CHECK(b2 == 0.0);
}

TEST_CASE("i2_of_i1") {
  NormalFormParams plain{1.0, 1.0, {}};
  CHECK(i2_of_i1(plain, 0.0, 0.01) == doctest::Approx(0.01).epsilon(1e-13));
  CHECK(i2_of_i1(plain, -0.01, 0.01) == doctest::Approx(0.0).epsilon(1e-13));

  // omega I2 + 0.5 I2^2 = E, quadratic-formula oracle.
  NormalFormParams quad{1.0, 1.0, ActionPolynomial::parse("0,2,0.5")};
  double expected = -1.0 + std::sqrt(1.0 + 4.0 * 0.5 * 0.01);
  CHECK(i2_of_i1(quad, 0.0, 0.01) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("i1_minus") {
  NormalFormParams plain{1.0, 1.0, {}};
  CHECK(i1_minus(plain, 0.01) == doctest::Approx(-0.01).epsilon(1e-12));
  NormalFormParams a4{4.0, 1.0, {}};
  CHECK(i1_minus(a4, 0.01) == doctest::Approx(-0.0025).epsilon(1e-12));

  // -I1 + I1^2 = E with I1 < 0; bisection oracle on the same function.
  NormalFormParams r2{1.0, 1.0, ActionPolynomial::parse("2,0,1.0")};
  double root = i1_minus(r2, 0.01);
  CHECK(root < 0.0);
  CHECK(std::abs(-root + root * root - 0.01) < 1e-13);
  // Independent bisection.
  double lo = -0.02, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double f = -mid + mid * mid - 0.01;
    if (f > 0)
      lo = mid;
    else
      hi = mid;
  }
  CHECK(root == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("involution T") {
  auto t1 = involution_T(PhasePoint(1, 2, 3, 4, Chart::NormalForm));
  CHECK(t1.coords().isApprox(Vec4(-1, 2, -3, 4), 1e-15));

  Rng rng(7);
  NormalFormModel nf(NormalFormParams{
      1.0, 2.0, ActionPolynomial::parse("2,0,0.3; 1,1,-0.2; 0,3,0.1")});
  for (int i = 0; i < 100; ++i) {
    Vec4 z = random_vec(rng, 0.5);
    PhasePoint p(z, Chart::NormalForm);
    PhasePoint tp = involution_T(p);
    // T o T = identity
    CHECK(involution_T(tp).coords().isApprox(z, 1e-15));
    // K o T = K
    CHECK(nf.value(tp.coords()) == doctest::Approx(nf.value(z)).epsilon(1e-14));
    // Flow equivariance at the vector-field level: X_K(Tz) = T X_K(z).
    Vec4 xt = hamiltonian_vector_field(nf, tp);
    Vec4 x = hamiltonian_vector_field(nf, p);
    CHECK(xt.isApprox(Vec4(-x[0], x[1], -x[2], x[3]), 1e-12));
  }
}

TEST_CASE("exact normal form flow") {
  NormalFormParams plain{1.0, 1.0, {}};
  auto z1 = exact_normal_form_flow(
      plain, PhasePoint(1, 0, 0, 0, Chart::NormalForm), 1.0);
  CHECK(z1.coords().isApprox(Vec4(std::exp(-1.0), 0, 0, 0), 1e-14));

  auto z2 = exact_normal_form_flow(
      plain, PhasePoint(0, 1, 0, 0, Chart::NormalForm), M_PI / 2.0);
  CHECK((z2.coords() - Vec4(0, 0, 0, -1)).norm() < 1e-14);

  // Energy and both actions conserved for generic parameters.
  Rng rng(3);
  NormalFormParams gen{0.8, 1.7,
                       ActionPolynomial::parse("2,0,0.4; 0,2,0.6; 1,1,-0.3")};
  NormalFormModel model(gen);
  for (int i = 0; i < 50; ++i) {
    Vec4 z = random_vec(rng, 0.4);
    PhasePoint p(z, Chart::NormalForm);
    double t = rng.uniform(-3.0, 3.0);
    PhasePoint q = exact_normal_form_flow(gen, p, t);
    auto [i1a, i2a] = actions(p);
    auto [i1b, i2b] = actions(q);
    CHECK(std::abs(i1a - i1b) < 1e-13 * (1.0 + std::abs(i1a)));
    CHECK(std::abs(i2a - i2b) < 1e-13 * (1.0 + std::abs(i2a)));
    CHECK(std::abs(model.value(q.coords()) - model.value(z)) < 1e-13);
  }
}

TEST_CASE("remainder polynomial structure is enforced") {
  CHECK_THROWS_AS(ActionPolynomial::parse("1,0,1.0"), UsageError);
  CHECK_THROWS_AS(ActionPolynomial::parse("0,0,0.5"), UsageError);
  CHECK_NOTHROW(ActionPolynomial::parse("2,0,1.0; 0,2,1.0"));
  CHECK_THROWS_AS(ActionPolynomial::parse("junk"), UsageError);
}

TEST_CASE("model factory") {
  auto m = make_model("ham1", {{"k", "-1"}});
  CHECK(m->id() == "ham1");
  CHECK_THROWS_AS(make_model("nope", {}), UsageError);
  CHECK_THROWS_AS(make_model("ham1", {{"k", "0.5"}}), UsageError);
  auto nf = make_model("normal_form", {{"alpha", "2"},
                                       {"omega", "3"},
                                       {"remainder", "2,0,0.1"}});
  CHECK(nf->alpha() == 2.0);
  CHECK(nf->omega() == 3.0);
}

TEST_SUITE_END();
