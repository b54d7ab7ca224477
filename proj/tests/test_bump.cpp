#include <doctest.h>

#include <cmath>

#include "fklab/bump.hpp"

using namespace fk;

TEST_CASE("smooth step: exact limits, monotone, complementary") {
  CHECK(smooth_step(-0.5) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(2.0) == 1.0);
  double prev = 0.0;
  for (int i = 1; i < 40; ++i) {
    const double s = smooth_step(i / 40.0);
    CHECK(s > prev);
    prev = s;
  }
  // s(t) + s(1-t) = 1 exactly by construction of the e^{-1/t} ratio.
  for (double t : {0.1, 0.31, 0.5, 0.77}) {
    CHECK(smooth_step(t) + smooth_step(1 - t) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("jet arithmetic reproduces calculus identities") {
  const Jet x = Jet::variable(0.3, 5);
  const Jet e = x.exp();
  for (int n = 0; n <= 5; ++n)
    CHECK(e.derivative(n) == doctest::Approx(std::exp(0.3)).epsilon(1e-12));
  const Jet q = e / (Jet(5, 1.0) + x);
  const Jet back = q * (Jet(5, 1.0) + x);
  for (int n = 0; n <= 5; ++n)
    CHECK(back.derivative(n) ==
          doctest::Approx(e.derivative(n)).epsilon(1e-12));
}

TEST_CASE("step derivatives agree with finite differences") {
  const double h = 1e-6;
  for (double t : {0.2, 0.45, 0.8}) {
    const auto d = smooth_step_derivs(t, 2);
    CHECK(d[0] == doctest::Approx(smooth_step(t)).epsilon(1e-14));
    const double fd = (smooth_step(t + h) - smooth_step(t - h)) / (2 * h);
    CHECK(d[1] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("unit bump: exact support, exact plateau, mirror symmetric") {
  CHECK(unit_bump(0.0) == 0.0);
  CHECK(unit_bump(1.0) == 0.0);
  CHECK(unit_bump(-0.1) == 0.0);
  CHECK(unit_bump(1.1) == 0.0);
  for (double t : {0.25, 0.4, 0.5, 0.6, 0.75}) CHECK(unit_bump(t) == 1.0);
  for (double t : {0.05, 0.1, 0.2}) {
    CHECK(unit_bump(t) > 0.0);
    CHECK(unit_bump(t) == doctest::Approx(unit_bump(1 - t)).epsilon(1e-15));
  }
}

TEST_CASE("certified shape constants are frozen") {
  CHECK(certified_ck(2) == doctest::Approx(196.821).epsilon(1e-9));
  CHECK(certified_ck(2) == certified_ck(2));  // cache stability
  CHECK(certified_ck(3) > certified_ck(2));   // higher order, larger sup
}

TEST_CASE("make_bump: plateau formula, support, sampled norm") {
  const BumpSpec b = make_bump(0.2, 0.5, 0.01, 2);
  const double plateau = 0.01 * 0.3 * 0.3 / certified_ck(2);
  CHECK(b.plateau_value() == doctest::Approx(plateau).epsilon(1e-14));
  // Exactly zero on the closed complement, including the endpoints.
  for (double xi : {0.5, 0.6, 0.9, 1.2, 0.2, 0.15}) CHECK(b(xi) == 0.0);
  // Exactly the plateau value on the middle half of the support.
  for (double xi : {0.275, 0.3, 0.35, 0.4, 0.425})
    CHECK(std::fabs(b(xi) - plateau) <= 1e-15);
  // Periodicity.
  CHECK(b(0.3 + 1.0) == b(0.3));
  CHECK(b(0.3 - 2.0) == b(0.3));
  CHECK(b.ck_norm_sampled(4001) <= 0.01);
}

TEST_CASE("halving the support scales the plateau by 2^-k") {
  const BumpSpec wide = make_bump(0.2, 0.5, 0.01, 2);
  const BumpSpec narrow = make_bump(0.2, 0.35, 0.01, 2);
  CHECK(narrow.plateau_value() ==
        doctest::Approx(wide.plateau_value() / 4.0).epsilon(1e-13));
  CHECK(narrow.ck == wide.ck);
}

TEST_CASE("bump derivatives match finite differences") {
  const BumpSpec b = make_bump(0.1, 0.6, 0.02, 3);
  const double h = 1e-6;
  for (double xi : {0.15, 0.22, 0.55}) {
    const auto d = b.derivs(xi, 1);
    CHECK(d[0] == doctest::Approx(b(xi)).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx((b(xi + h) - b(xi - h)) / (2 * h))
                      .epsilon(1e-5));
  }
}

TEST_CASE("perturbation touches only the diagonal site") {
  const FamilyPtr F0 = builtin("fk_nn", 1.0);
  const BumpSpec b = make_bump(0.3, 0.6, 0.05, 2);
  const FamilyPtr F1 = perturb(F0, b);
  const PeriodicConfig x = jittered_profile(5, 3, 0.35, 0.2, 3, 0);
  const ConfigFn fn = as_fn(x);
  for (long i = 1; i <= 5; ++i) {
    CHECK(local_energy(*F1, i, fn) - local_energy(*F0, i, fn) ==
          doctest::Approx(b(x.at(i))).epsilon(1e-14));
    // Off-diagonal curvature is untouched.
    CHECK(hessian_entry(*F1, i, i + 1, fn) ==
          doctest::Approx(hessian_entry(*F0, i, i + 1, fn)).epsilon(1e-13));
  }
}

TEST_CASE("perturbed family leaves a gap-avoiding minimizer in place") {
  const FamilyPtr F0 = builtin("fk_nn", 0.0);
  const MinimizeResult m =
      minimize_periodic(*F0, 3, 2, linear_profile(3, 2, 0.1));
  REQUIRE(m.converged);
  const auto gaps = find_gaps(extended_orbit(m.config));
  REQUIRE(!gaps.empty());
  const FamilyPtr F1 =
      perturb(F0, make_bump(gaps[0].lo, gaps[0].hi, 0.01, 2));
  // The bump vanishes on the orbit, so the action is unchanged exactly.
  CHECK(periodic_action(*F1, m.config) == periodic_action(*F0, m.config));
}

TEST_CASE("destroying the flat continuum leaves a single class") {
  const DestroyPeriodicResult res =
      destroy_periodic(builtin("fk_nn", 0.0), 3, 2, 0.01, 2, 1e-10, 12, 1);
  CHECK(res.report.unperturbed_classes > 1);
  CHECK(res.report.perturbed_classes == 1);
  CHECK(res.report.all_translates);
  CHECK(res.gap.length() >= 1.0 / 3 - 1e-12);
  CHECK(res.report.probe_excess >= res.report.probe_bound - 1e-9);
}

TEST_CASE("cantor bumps shrink geometrically and stay inside their gaps") {
  std::vector<GapInterval> gaps;
  gaps.push_back({0.0, 0.3, true});
  gaps.push_back({0.5, 0.7, true});
  gaps.push_back({0.8, 0.9, true});
  const auto bumps = cantor_bump(gaps, 0.04, 2);
  REQUIRE(bumps.size() == 3);
  double total = 0.0;
  for (size_t i = 0; i < 3; ++i) {
    CHECK(bumps[i].eps == doctest::Approx(0.04 * std::pow(0.5, i + 1)));
    CHECK(bumps[i].xi_minus >= gaps[i].lo);
    CHECK(bumps[i].xi_plus <= gaps[i].hi);
    total += bumps[i].ck_norm_sampled(801);
  }
  CHECK(total <= 0.04);
}
