#include <doctest.h>

#include <cmath>

#include "fklab/lattice.hpp"
#include "fklab/minimize.hpp"

using namespace fk;

TEST_CASE("periodic extension follows x_{i+p} = x_i + q") {
  const PeriodicConfig x(3, 2, {0.1, 0.8, 1.5});
  CHECK(x.at(1) == 0.1);
  CHECK(x.at(3) == 1.5);
  CHECK(x.at(4) == 0.1 + 2);
  CHECK(x.at(-2) == 0.1 - 2);
  CHECK(x.at(0) == 1.5 - 2);
  CHECK(x.rotation() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("shift acts as (shift(x,k,l))_i = x_{i-k} + l") {
  const PeriodicConfig x(5, 3, {0.1, 0.7, 1.4, 2.0, 2.6});
  const PeriodicConfig y = shift(x, 2, -1);
  for (long i = -7; i <= 7; ++i)
    CHECK(y.at(i) == doctest::Approx(x.at(i - 2) - 1).epsilon(1e-15));
}

TEST_CASE("compare classifies orderings") {
  const PeriodicConfig x(3, 1, {0.1, 0.4, 0.8});
  PeriodicConfig above = x;
  for (auto& v : above.values) v += 0.05;
  CHECK(compare(x, above) == Ordering::StrictlyBelow);
  CHECK(compare(above, x) == Ordering::StrictlyAbove);
  CHECK(compare(x, x) == Ordering::Equal);

  PeriodicConfig weak = x;
  weak.values[1] += 0.05;  // equal at two slots, above at one
  CHECK(compare(x, weak) == Ordering::WeaklyBelow);

  PeriodicConfig crossed = x;
  crossed.values[0] += 0.05;
  crossed.values[1] -= 0.05;
  CHECK(compare(x, crossed) == Ordering::Incomparable);
}

TEST_CASE("compare handles different periods via the common refinement") {
  // Same underlying sequence presented with periods 2 and 4.
  const PeriodicConfig x(2, 1, {0.2, 0.7});
  const PeriodicConfig y(4, 2, {0.2, 0.7, 1.2, 1.7});
  CHECK(compare(x, y) == Ordering::Equal);
}

TEST_CASE("rigid profiles are Birkhoff and satisfy the rotation bound") {
  const PeriodicConfig x = linear_profile(8, 5, 0.3);
  CHECK(is_birkhoff(x));
  CHECK(!birkhoff_violation(x));
  CHECK(rotation_bound_check(x) <= 1.0);
}

TEST_CASE("a crossing configuration violates the Birkhoff property") {
  // Swap two values of a rigid profile so some translate pair crosses.
  PeriodicConfig x = linear_profile(5, 3, 0.1);
  std::swap(x.values[1], x.values[2]);
  CHECK(!is_birkhoff(x));
  CHECK(birkhoff_violation(x).has_value());
}

TEST_CASE("min/max configs bracket the inputs") {
  const PeriodicConfig x = jittered_profile(6, 1, 0.2, 0.3, 7, 0);
  const PeriodicConfig y = jittered_profile(6, 1, 0.5, 0.3, 7, 1);
  const PeriodicConfig lo = min_config(x, y), hi = max_config(x, y);
  for (long i = 0; i < 6; ++i) {
    CHECK(lo.at(i) == std::min(x.at(i), y.at(i)));
    CHECK(hi.at(i) == std::max(x.at(i), y.at(i)));
  }
}

TEST_CASE("normalize_gauge lands x_0 in [0,1) by an integer translate") {
  const PeriodicConfig x(4, 1, {7.3, 7.5, 7.9, 8.1});
  const PeriodicConfig n = normalize_gauge(x);
  CHECK(n.at(0) >= 0.0);
  CHECK(n.at(0) < 1.0);
  const double d = n.at(1) - x.at(1);
  CHECK(d == std::round(d));
}

TEST_CASE("equal_mod_shift finds the witness class and respects tol") {
  const PeriodicConfig x = linear_profile(5, 3, 0.17);
  const PeriodicConfig y = shift(x, 3, 2);
  const auto w = equal_mod_shift(x, y, 1e-9);
  REQUIRE(w.has_value());
  // The reported class maps x onto y.
  CHECK(compare(shift(x, w->k, w->l), y) == Ordering::Equal);

  PeriodicConfig z = y;
  z.values[0] += 1e-3;
  CHECK(!equal_mod_shift(x, z, 1e-6));
}

TEST_CASE("l1 distance to a translate of a rigid profile is |pl - qk|") {
  const PeriodicConfig x = linear_profile(5, 3, 0.42);
  for (long k = 0; k < 5; ++k)
    for (long l = -2; l <= 2; ++l) {
      const double d = l1_window(shift(x, k, l), x, 1, 5);
      CHECK(d == doctest::Approx(std::fabs(5.0 * l - 3.0 * k)).epsilon(1e-12));
    }
}

TEST_CASE("csv round trip") {
  const PeriodicConfig x = jittered_profile(7, 4, 0.3, 0.2, 11, 0);
  const PeriodicConfig y = config_from_csv(to_csv(x), 7, 4);
  CHECK(compare(x, y, 1e-12) == Ordering::Equal);
}

TEST_CASE("seq window access and bounds") {
  SeqWindow w;
  w.lo = -3;
  w.values = {1.0, 2.0, 3.0};
  CHECK(w.hi() == -1);
  CHECK(w.at(-2) == 2.0);
  CHECK_THROWS(w.at(0));
}
