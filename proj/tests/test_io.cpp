#include <doctest.h>

#include "fklab/io.hpp"

using namespace fk;

TEST_CASE("rational round trip is exact, including negatives") {
  for (const Rat v : {Rat(0), Rat(-22, 7), Rat(Int("123456789123456789"), 4)}) {
    CHECK(rat_from_json(to_json(v)) == v);
  }
}

TEST_CASE("power sums round trip with astronomically large exponents") {
  const PowSum v = PowSum::power(10, factorial(15), Rat(3, 7)) -
                   PowSum::power(10, factorial(14)) + PowSum(Rat(5));
  const PowSum back = powsum_from_json(to_json(v));
  CHECK(back.eq(v));
  CHECK(back.base() == v.base());
  CHECK(to_json(back).dump() == to_json(v).dump());
}

TEST_CASE("configs round trip bit-exactly") {
  PeriodicConfig x;
  x.p = 5;
  x.q = 3;
  x.values = {0.1, 0.30000000000000004, 0.7, 1.1, 1.9};
  const PeriodicConfig back = config_from_json(to_json(x));
  CHECK(back.p == x.p);
  CHECK(back.q == x.q);
  CHECK(back.values == x.values);  // bit-exact doubles
}

TEST_CASE("bump specs round trip") {
  const BumpSpec b = make_bump(0.2, 0.55, 0.013, 3);
  const BumpSpec back = bump_from_json(to_json(b));
  CHECK(back.xi_minus == b.xi_minus);
  CHECK(back.xi_plus == b.xi_plus);
  CHECK(back.eps == b.eps);
  CHECK(back.k == b.k);
  CHECK(back.ck == b.ck);
}

TEST_CASE("check results round trip") {
  CheckResult c;
  c.name = "A2";
  c.lhs = "10^87178291200";
  c.rhs = "3941049442103/25000000";
  c.pass = false;
  c.exact = true;
  c.scale_mode = "exact";
  const CheckResult back = check_from_json(to_json(c));
  CHECK(back.name == c.name);
  CHECK(back.lhs == c.lhs);
  CHECK(back.rhs == c.rhs);
  CHECK(back.pass == c.pass);
  CHECK(back.exact == c.exact);
  CHECK(back.scale_mode == c.scale_mode);
}

TEST_CASE("parameter selections round trip through json") {
  const SelectionOutcome out = select_parameters(
      RotationSpec::golden_mean(), Rat(1), Rat(14), 2, 1, Rat(1, 100), Rat(8),
      Rat(197), 200, Rat(1, 1000000));
  REQUIRE(out.selection.has_value());
  const ParamSelection& sel = *out.selection;
  const ParamSelection back = selection_from_json(to_json(sel));
  CHECK(back.tau == sel.tau);
  CHECK(back.gamma == sel.gamma);
  CHECK(back.k == sel.k);
  CHECK(back.r == sel.r);
  CHECK(back.p.eq(sel.p));
  CHECK(back.q.eq(sel.q));
  CHECK(back.p_prime.eq(sel.p_prime));
  CHECK(back.p_tilde.eq(sel.p_tilde));
  CHECK(back.q_tilde.eq(sel.q_tilde));
  CHECK(back.a.eq(sel.a));
  CHECK(back.relax_factor == sel.relax_factor);
  CHECK(back.tau_ge_sigma == sel.tau_ge_sigma);
  CHECK(to_json(back).dump() == to_json(sel).dump());
}

TEST_CASE("certificates round trip and dumps are deterministic") {
  const PipelineResult res = run_destruction(
      builtin("fk_nn", 0.5), RotationSpec::liouville(10), Rat(1), Rat(14), 2,
      1, Rat(1, 100), Rat(1), 2, 1, 1e-10, 1000000);
  const DestructionCertificate back =
      certificate_from_json(to_json(res.cert));
  CHECK(to_json(back).dump() == to_json(res.cert).dump());
  CHECK(back.pass == res.cert.pass);
  CHECK(back.checks.size() == res.cert.checks.size());

  // The full artifact serializes identically across repeated runs.
  const PipelineResult res2 = run_destruction(
      builtin("fk_nn", 0.5), RotationSpec::liouville(10), Rat(1), Rat(14), 2,
      1, Rat(1, 100), Rat(1), 2, 1, 1e-10, 1000000);
  CHECK(to_json(res).dump() == to_json(res2).dump());
}
