#include <doctest.h>

#include <cmath>

#include "saddle23/models.hpp"
#include "saddle23/pseudoplanes.hpp"

using namespace s23;
using namespace s23::models;
using namespace s23::planes;

TEST_SUITE_BEGIN("pseudoplanes");

TEST_CASE("profile right-hand side") {
  NormalFormParams plain{1.0, 1.0, {}};
  double e = 0.01;
  CHECK(rhs_G(plain, 0.0, e) == 0.0);
  double h_star = std::sqrt(e);
  CHECK(std::abs(rhs_G(plain, h_star, e)) < 1e-13);
  // Hand value: f^2 = 2(0.01 - 0.0025) = 0.015,
  // G = -2 pi (0.05)(0.015) / (0.015 + 0.005) = -0.075 pi.
  CHECK(rhs_G(plain, 0.05, e) ==
        doctest::Approx(-0.075 * M_PI).epsilon(1e-13));
  CHECK(rhs_G(plain, -0.05, e) ==
        doctest::Approx(0.075 * M_PI).epsilon(1e-13));

  // With a remainder, f^2 comes from the Newton solve of the level
  // constraint; check it satisfies K(-h^2, f^2/2) = E.
  NormalFormParams bent{1.0, 1.0, ActionPolynomial::parse("0,2,0.1")};
  NormalFormModel model(bent);
  double h = 0.04;
  double f2 = f_squared(bent, h, e);
  CHECK(std::abs(bent.k_value(-h * h, f2 / 2.0) - e) < 1e-12);
}

TEST_CASE("profile solve: reference case alpha = omega = 1, E = 0.01") {
  NormalFormParams plain{1.0, 1.0, {}};
  PlaneProfile prof = solve_profile(plain, 0.01, 0.05);

  CHECK(prof.h_star == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(prof.r_e == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
  CHECK(prof.t2e == doctest::Approx(0.02 * M_PI).epsilon(1e-12));

  // h(0) = h0 lands exactly on a grid node.
  bool has_origin = false;
  for (size_t i = 0; i < prof.s.size(); ++i)
    if (prof.s[i] == 0.0 && prof.h[i] == 0.05) has_origin = true;
  CHECK(has_origin);

  // Strict monotonicity of h and a; s increasing.
  for (size_t i = 0; i + 1 < prof.s.size(); ++i) {
    CHECK(prof.s[i] < prof.s[i + 1]);
    CHECK(prof.h[i] > prof.h[i + 1]);
    CHECK(prof.a[i] < prof.a[i + 1]);
  }

  // End contracts.
  CHECK(std::abs(prof.h.back()) < 1e-5 * prof.h_star * 1.5);
  CHECK(std::abs(prof.h.front() - prof.h_star) < 1e-6);
  CHECK(std::abs(prof.f.back() - prof.r_e) < 1e-6);
  CHECK(std::abs(M_PI * prof.f.back() * prof.f.back() - prof.t2e) < 1e-8);
  CHECK(std::abs(prof.f.front()) < 1e-3);

  // a is asymptotically affine with slope T_{2,E}.
  double s_hi = prof.s.back();
  double ds = 0.1 * (prof.s.back() - prof.s.front());
  size_t i1 = 0, i0 = 0;
  for (size_t i = 0; i < prof.s.size(); ++i) {
    if (prof.s[i] <= s_hi - ds) i0 = i;
    i1 = i;
  }
  double slope = (prof.a[i1] - prof.a[i0]) / (prof.s[i1] - prof.s[i0]);
  CHECK(std::abs(slope - prof.t2e) < 1e-6);

  // Dense query interpolates the stored nodes consistently.
  for (double sq : {-0.3, 0.0, 0.4, 1.1}) {
    double h = prof.h_at(sq);
    CHECK(h > 0.0);
    CHECK(h < prof.h_star);
  }
  CHECK(prof.h_at(0.0) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("profile contracts over a parameter grid") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double omega : {0.5, 1.0, 2.0}) {
      for (double e : {1e-3, 1e-2}) {
        NormalFormParams p{alpha, omega, {}};
        PlaneProfile prof = solve_profile(p, e, 0.5 * std::sqrt(e / alpha));
        CAPTURE(alpha);
        CAPTURE(omega);
        CAPTURE(e);
        CHECK(prof.h_star == doctest::Approx(std::sqrt(e / alpha)).epsilon(1e-10));
        for (size_t i = 0; i + 1 < prof.h.size(); ++i)
          CHECK(prof.h[i] > prof.h[i + 1]);
        CHECK(std::abs(prof.h.front() - prof.h_star) < 1e-6);
        CHECK(std::abs(prof.f.back() - prof.r_e) < 1e-6);
      }
    }
  }
  // A remainder case exercises the Newton path for f^2.
  NormalFormParams bent{1.0, 1.0, ActionPolynomial::parse("0,2,0.1; 2,0,0.2")};
  double h_star = std::sqrt(-i1_minus(bent, 0.01));
  PlaneProfile prof = solve_profile(bent, 0.01, 0.5 * h_star);
  for (size_t i = 0; i + 1 < prof.h.size(); ++i)
    CHECK(prof.h[i] > prof.h[i + 1]);
  CHECK(std::abs(prof.h.front() - prof.h_star) < 1e-6);
}

TEST_CASE("negative branch mirrors the positive one") {
  NormalFormParams plain{1.0, 1.0, {}};
  PlaneProfile pos = solve_profile(plain, 0.01, 0.05);
  PlaneProfile neg = solve_profile(plain, 0.01, -0.05);
  CHECK(neg.branch == Branch::NegativeH);
  for (double h : neg.h) CHECK(h < 0.0);
  PlaneGrid gpos = assemble_plane(pos, 16);
  PlaneGrid gneg = assemble_plane(neg, 16);
  for (const Vec4& u : gpos.points) CHECK(u[0] < 0.0);  // image in U1
  for (const Vec4& u : gneg.points) CHECK(u[0] > 0.0);  // image in U2
}

TEST_CASE("assembled plane lies on the boundary sphere and the level") {
  NormalFormParams plain{1.0, 1.0, {}};
  double e = 0.01;
  PlaneProfile prof = solve_profile(plain, e, 0.05);
  PlaneGrid grid = assemble_plane(prof, 64);

  for (const Vec4& u : grid.points)
    CHECK(std::abs(u[0] + u[2]) < 1e-15);
  CHECK(verify_on_level(grid, plain, e) < 1e-12);

  // End loop converges to the boundary orbit circle of radius r_E.
  size_t last_row = (grid.s.size() - 1) * grid.t.size();
  for (size_t j = 0; j < grid.t.size(); ++j) {
    const Vec4& u = grid.points[last_row + j];
    double rad = std::hypot(u[1], u[3]);
    CHECK(std::abs(rad - prof.r_e) < 1e-6);
    CHECK(std::abs(u[0]) < 1e-5);
  }

  // Remainder case: level residual limited by the f^2 Newton tolerance.
  NormalFormParams bent{1.0, 1.0, ActionPolynomial::parse("0,2,0.1")};
  PlaneProfile prof2 =
      solve_profile(bent, e, 0.5 * std::sqrt(-i1_minus(bent, e)));
  CHECK(verify_on_level(assemble_plane(prof2, 32), bent, e) < 1e-10);

  // Negative control: perturbing f by 1e-6 where f ~ r_E trips the check.
  PlaneGrid bad = grid;
  bad.points[last_row][1] += 1e-6;
  CHECK(verify_on_level(bad, plain, e) > 1e-8);
}

TEST_CASE("Cauchy-Riemann residual and convergence") {
  NormalFormParams plain{1.0, 1.0, {}};
  double e = 0.01;
  PlaneProfile prof = solve_profile(plain, e, 0.05);

  CrReport rep = verify_cr_equation(prof, 1e-3, 32);
  CHECK(rep.max_residual < 1e-6);
  CHECK(rep.max_exact_form_residual < 1e-6);

  // Second-order convergence under refinement.
  CrReport coarse = verify_cr_equation(prof, 2e-3, 32);
  double ratio = coarse.max_residual / rep.max_residual;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);

  // Corrupted-sign variant: reverse the profile in s.
  double lo = prof.s.front() + 0.15 * (prof.s.back() - prof.s.front());
  double hi = prof.s.back() - 0.05 * (prof.s.back() - prof.s.front());
  CrReport bad = verify_cr_equation(
      plain, e, [&](double s) { return prof.h_at(lo + hi - s); }, lo, hi,
      1e-3, 32);
  CHECK(bad.max_residual > 1e-2);
}

TEST_CASE("hemisphere transversality rates") {
  NormalFormParams plain{1.0, 1.0, {}};
  Rng rng(55);
  HemisphereTransversality ht =
      hemisphere_transversality(plain, 0.01, 500, rng);
  CHECK(ht.signs_correct);
  CHECK(ht.min_rate_u1 > 0.0);
  CHECK(ht.max_rate_u2 < 0.0);

  // Closed form of the rate on U1: d(q1+p1)/dt = 2 alpha_bar h.
  NormalFormModel model(plain);
  double h = 0.03;
  double f = std::sqrt(f_squared(plain, h, 0.01));
  Vec4 u(-h, f, h, 0.0);
  Vec4 g = model.gradient(u);
  double rate = g[2] + (-g[0]);
  double ab = plain.alpha_bar(-h * h, 0.5 * f * f);
  CHECK(rate == doctest::Approx(2.0 * ab * h).epsilon(1e-13));

  // Rate vanishes toward the equator.
  double tiny_f = std::sqrt(f_squared(plain, 1e-6, 0.01));
  Vec4 u2(-1e-6, tiny_f, 1e-6, 0.0);
  Vec4 g2 = model.gradient(u2);
  CHECK(std::abs(g2[2] - g2[0]) < 1e-5);
}

TEST_CASE("plane energy equals the boundary action scale") {
  NormalFormParams plain{1.0, 1.0, {}};
  PlaneProfile p1 = solve_profile(plain, 0.01, 0.05);
  PlaneProfile p2 = solve_profile(plain, 0.02, 0.05);
  double e1 = plane_energy(p1);
  double e2 = plane_energy(p2);
  CHECK(std::abs(e1 - 2.0 * M_PI * 0.01) < 1e-8);
  CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-6));
}

TEST_SUITE_END();
