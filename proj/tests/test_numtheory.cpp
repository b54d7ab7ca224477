#include <doctest.h>

#include <cmath>

#include "fklab/numtheory.hpp"

using namespace fk;

TEST_CASE("powsum arithmetic: merging, distribution, powers") {
  const PowSum a = PowSum::power(10, Int(3)) + PowSum::power(10, Int(3));
  CHECK(a.eq(PowSum(Rat(2000))));

  const PowSum x = PowSum::power(10, Int(5)) - PowSum(Rat(7));
  const PowSum y = PowSum::power(10, Int(2)) + PowSum(Rat(1, 3));
  CHECK((x * y).eq(y * x));
  CHECK(((x + y) * y).eq(x * y + y * y));

  PowSum p = PowSum(Rat(1));
  for (int i = 0; i < 5; ++i) p = p * x;
  CHECK(p.eq(x.pow_ui(5)));
  CHECK((x - x).is_zero());
  CHECK((x - x).sign() == 0);
}

TEST_CASE("powsum sign: cluster and dominance paths") {
  // Nearby exponents: decided by materializing the cluster.
  CHECK((PowSum::power(10, Int(6)) - PowSum::power(10, Int(6), Rat(2)))
            .sign() == -1);
  // Astronomically separated exponents: decided by dominance.
  const PowSum big = PowSum::power(10, Int("87178291200"));
  const PowSum small = PowSum::power(10, Int(1000000), Rat(123456789));
  CHECK((big - small).sign() == 1);
  CHECK((small - big).sign() == -1);
  CHECK((-big).sign() == -1);
}

TEST_CASE("powsum division by a single term is exact") {
  const PowSum n = PowSum::power(10, Int(40), Rat(6)) + PowSum(Rat(3));
  const PowSum d = PowSum::power(10, Int(7), Rat(3));
  const PowSum q = n.div_single(d);
  CHECK((q * d).eq(n));
  CHECK_THROWS(n.div_single(n));  // two-term divisor
}

TEST_CASE("powsum materialization round trips") {
  const PowSum v = PowSum::power(10, Int(12)) + PowSum(Rat(45));
  CHECK(v.materializable(100));
  CHECK(v.to_int() == Int("1000000000045"));
  CHECK(!PowSum::power(10, Int("87178291200")).materializable(10000));
  CHECK(PowSum(Rat(22, 7)).to_rat() == Rat(22, 7));
  CHECK(v.log10_approx() == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(PowSum(Rat(-3)).to_double() == -3.0);
}

TEST_CASE("rotation specs parse and produce certified bounds") {
  const RotationSpec g = RotationSpec::parse("golden");
  const double gd = (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(g.to_double() == doctest::Approx(gd).epsilon(1e-15));
  const auto [lo0, hi0] = g.bounds_rat(0);
  const auto [lo3, hi3] = g.bounds_rat(3);
  CHECK(lo0.get_d() < gd);
  CHECK(hi0.get_d() > gd);
  CHECK(lo3 >= lo0);
  CHECK(hi3 <= hi0);

  const RotationSpec r = RotationSpec::parse("rational:3/5");
  const auto [rlo, rhi] = r.bounds_rat(0);
  CHECK(rlo == Rat(3, 5));
  CHECK(rhi == Rat(3, 5));

  const RotationSpec l = RotationSpec::parse("liouville:10");
  CHECK(l.liouville_truncation_rat(3) == Rat(Int("110001"), Int(1000000)));
  CHECK_THROWS(RotationSpec::parse("bogus:1"));
}

TEST_CASE("golden-mean convergents are the Fibonacci pairs") {
  const auto cv = convergents(RotationSpec::golden_mean(), 8);
  REQUIRE(cv.size() == 8);
  const long P[] = {1, 1, 2, 3, 5, 8, 13, 21};
  const long Q[] = {0, 1, 1, 2, 3, 5, 8, 13};
  for (int i = 0; i < 8; ++i) {
    CHECK(cv[i].first == Int(P[i]));
    CHECK(cv[i].second == Int(Q[i]));
  }
}

TEST_CASE("liouville convergents hit the factorial truncations") {
  const auto cv = convergents(RotationSpec::liouville(10), 7);
  REQUIRE(cv.size() == 7);
  CHECK(cv[2].first == Int(100));
  CHECK(cv[2].second == Int(11));
  CHECK(cv[6].first == Int(1000000));
  CHECK(cv[6].second == Int(110001));
}

TEST_CASE("rational convergents terminate at the value itself") {
  const auto cv = convergents(RotationSpec::parse("rational:3/5"), 10);
  REQUIRE(!cv.empty());
  CHECK(cv.back().first == Int(5));
  CHECK(cv.back().second == Int(3));
}

TEST_CASE("extended euclid: canonical Bezout pair") {
  {
    const auto [s, t] = extended_euclid(Int(5), Int(3));
    CHECK(Int(5) * t - Int(3) * s == 1);
    CHECK(s >= 0);
    CHECK(s < 5);
  }
  {
    const auto [s, t] = extended_euclid(Int(13), Int(8));
    CHECK(Int(13) * t - Int(8) * s == 1);
    CHECK(s == 8);
    CHECK(t == 5);
  }
}

TEST_CASE("p_prime pins the reciprocal window") {
  CHECK(p_prime(RotationSpec::golden_mean(), Int(5), Int(3)) == 12);
  CHECK(p_prime(RotationSpec::golden_mean(), Int(13), Int(8)) == 30);
}

TEST_CASE("symbolic p_prime for a factorial truncation") {
  // p = 10^3!, q = the truncation numerator; the tail starts at 10^-4!, so
  // p' = 10^(4!-3!) = 10^18 exactly.
  const RotationSpec l = RotationSpec::liouville(10);
  const PowSum p = PowSum::power(10, Int(6));
  const PowSum q(Rat(110001));
  const PowSum pp = p_prime_pow(l, p, q);
  CHECK(pp.eq(PowSum::power(10, Int(18))));
}

TEST_CASE("tilde reduction: desk-scale and symbolic unit-gcd path") {
  {
    const TildeReduction t =
        reduce_tilde(PowSum(Rat(60)), PowSum(Rat(37)));
    CHECK(t.m.eq(PowSum(Rat(1))));
    CHECK(t.p_tilde.eq(PowSum(Rat(60))));
    CHECK(t.q_tilde.eq(PowSum(Rat(37))));
  }
  {
    // p'q + 1 has a unit constant term, so gcd with the pure power is 1.
    const PowSum pp = PowSum::power(10, Int("1000000000000"));
    const PowSum pq1 =
        PowSum::power(10, Int("999999999999"), Rat(3)) + PowSum(Rat(1));
    const TildeReduction t = reduce_tilde(pp, pq1);
    CHECK(t.m.eq(PowSum(Rat(1))));
    CHECK(t.p_tilde.eq(pp));
  }
}

TEST_CASE("budget_a is the exact ceiling") {
  CHECK(budget_a(Int(13), Int(8), RotationSpec::golden_mean(), Int(500)) ==
        18);
  CHECK(budget_a(Int(5), Int(3), RotationSpec::golden_mean(), Int(200)) ==
        19);
  // Rational rotation equal to q/p: no drift at all.
  CHECK(budget_a(Int(3), Int(2), RotationSpec::parse("rational:2/3"),
                 Int(100)) == 0);
}

TEST_CASE("exact selection for the factorial Liouville number") {
  const RotationSpec l = RotationSpec::liouville(10);
  const SelectionOutcome out = select_parameters(
      l, Rat(1), Rat(14), 2, 1, Rat(1, 100), Rat(8), Rat(197));
  REQUIRE(out.selection.has_value());
  const ParamSelection& sel = *out.selection;
  CHECK(sel.tau == Rat(239, 16));
  CHECK(sel.tau_ge_sigma);
  CHECK(sel.p.eq(PowSum::power(10, factorial(14))));
  CHECK(sel.p_prime.eq(PowSum::power(10, factorial(15) - factorial(14))));
  CHECK(sel.p_tilde.eq(PowSum::power(10, factorial(15))));
  CHECK(sel.m.eq(PowSum(Rat(1))));
  CHECK(sel.a_is_upper_bound);
  for (const auto& c : sel.verify(l)) CHECK(c.pass);
  for (const auto& c : certificate_checks(sel)) CHECK(c.pass);
}

TEST_CASE("selection failure taxonomy") {
  const Rat eps(1, 100), C(8), Ck(197);
  CHECK(select_parameters(RotationSpec::liouville(10), Rat(1), Rat(10), 2, 1,
                          eps, C, Ck)
            .failure == SelectionFailure::SigmaTooSmall);
  CHECK(select_parameters(RotationSpec::parse("rational:3/5"), Rat(1),
                          Rat(14), 2, 1, eps, C, Ck)
            .failure == SelectionFailure::RationalOmega);
  // The golden mean is Diophantine: no tau >= 14 is ever reachable.
  const SelectionOutcome g = select_parameters(RotationSpec::golden_mean(),
                                               Rat(1), Rat(14), 2, 1, eps, C,
                                               Ck, 1000);
  CHECK(!g.selection.has_value());
  CHECK(g.failure != SelectionFailure::None);
}

TEST_CASE("relaxed selection admits a desk-scale golden pair") {
  const SelectionOutcome out = select_parameters(
      RotationSpec::golden_mean(), Rat(1), Rat(14), 2, 1, Rat(1, 100), Rat(8),
      Rat(197), 200, Rat(1, 1000000));
  REQUIRE(out.selection.has_value());
  const ParamSelection& sel = *out.selection;
  CHECK(sel.p.to_int() == 5);
  CHECK(sel.q.to_int() == 3);
  CHECK(sel.p_prime.to_int() == 12);
  CHECK(sel.p_tilde.to_int() == 60);
  CHECK(sel.q_tilde.to_int() == 37);
  CHECK(sel.tau == Rat(39, 16));
  CHECK(!sel.tau_ge_sigma);
  CHECK(sel.relax_factor == Rat(1, 1000000));
}

TEST_CASE("rational helpers") {
  CHECK(factorial(14) == Int("87178291200"));
  CHECK(rat_from_string(rat_to_string(Rat(-22, 7))) == Rat(-22, 7));
  CHECK(rat_from_double_exact(0.25) == Rat(1, 4));
  const Rat tenth = rat_from_double_exact(0.1);
  CHECK(tenth != Rat(1, 10));  // 0.1 is not a dyadic rational
  CHECK(std::fabs(tenth.get_d() - 0.1) == 0.0);
}
