// Acceptance gate: fifteen end-to-end criteria, one timed pass/fail line
// each.  Runs every criterion even after a failure; exit code 1 if any
// criterion fails or overruns its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fklab/birkhoff.hpp"
#include "fklab/bump.hpp"
#include "fklab/minimize.hpp"
#include "fklab/numtheory.hpp"
#include "fklab/pipeline.hpp"
#include "fklab/potentials.hpp"
#include "fklab/runner.hpp"

using namespace fk;

namespace {

#define REQ(cond, msg)      \
  do {                      \
    if (!(cond)) {          \
      note = (msg);         \
      return false;         \
    }                       \
  } while (0)

// Finite difference of the formal action gradient at site i: only windows
// with |j - i| <= r depend on x_i.
double fd_grad(const LocalPotentialFamily& F, long i, const ConfigFn& x,
               double h) {
  const int r = F.range();
  auto bumped = [&](double d) {
    const ConfigFn fn = [&x, i, d](long j) { return x(j) + (j == i ? d : 0.0); };
    double s = 0.0;
    for (long j = i - r; j <= i + r; ++j) s += local_energy(F, j, fn);
    return s;
  };
  return (bumped(h) - bumped(-h)) / (2 * h);
}

// 1. Analytic gradients match central finite differences to relative error
//    1e-6 on 100 random bounded-band configurations.
bool c01_gradient_consistency(std::string& note) {
  int n_configs = 0;
  for (const char* name : {"fk_nn", "fk_nnn"}) {
    for (double lambda : {0.0, 1.0}) {
      const FamilyPtr F = builtin(name, lambda);
      for (int s = 0; s < 25; ++s) {
        const long p = 3 + s % 6;
        const long q = 1 + s % static_cast<int>(p);
        const PeriodicConfig x =
            jittered_profile(p, q, 0.04 * s, 0.4, 101, static_cast<std::uint64_t>(s));
        ++n_configs;
        for (long i = 1; i <= p; ++i) {
          const double g = grad_component(*F, i, as_fn(x));
          const double fd = fd_grad(*F, i, as_fn(x), 1e-6);
          if (std::fabs(g - fd) > 1e-6 * std::max(1.0, std::fabs(fd))) {
            note = std::string("gradient mismatch for ") + name;
            return false;
          }
        }
      }
    }
  }
  REQ(n_configs == 100, "expected 100 configurations");
  return true;
}

// 2. The explicit geometric solution of the next-nearest-neighbor chain at
//    lambda = 0 satisfies the recurrence to 1e-8 on [-10, 10].
bool c02_linear_solution(std::string& note) {
  const FamilyPtr F = builtin("fk_nnn", 0.0);
  const double rho = (std::sqrt(5.0) - 3.0) / 2.0;  // root in (-1, 0)
  const ConfigFn x = [rho](long i) {
    return std::pow(rho, static_cast<double>(i));
  };
  double worst = 0.0;
  for (long i = -10; i <= 10; ++i)
    worst = std::max(worst, std::fabs(grad_component(*F, i, x)));
  REQ(worst <= 1e-8, "recurrence residual above 1e-8");
  return true;
}

// 3. Minimization at (5,3), lambda = 1: converged, per-site residual 1e-10,
//    Birkhoff, rotation-deviation bound at most 1.
bool c03_stationary_birkhoff(std::string& note) {
  const FamilyPtr F = builtin("fk_nn", 1.0);
  const MinimizeResult m =
      minimize_periodic(*F, 5, 3, jittered_profile(5, 3, 0.4, 0.25, 1, 0), 1e-10);
  REQ(m.converged, "did not converge");
  for (double g : periodic_gradient(*F, m.config))
    REQ(std::fabs(g) <= 1e-10, "per-site residual above 1e-10");
  REQ(is_birkhoff(m.config), "not Birkhoff");
  REQ(rotation_bound_check(m.config) <= 1.0, "rotation bound violated");
  return true;
}

// 4. Ordering: 20 starts at (8,5), lambda = 1.5; every pair of retained
//    minimizers is strictly ordered or equal modulo the shift group.
bool c04_ordering(std::string& note) {
  const FamilyPtr F = builtin("fk_nn", 1.5);
  std::vector<std::pair<double, PeriodicConfig>> stationary;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 20; ++s) {
    const MinimizeResult m = minimize_periodic(
        *F, 8, 5, jittered_profile(8, 5, 0.05 * s, 0.35, 7, static_cast<std::uint64_t>(s)),
        1e-10);
    if (!m.converged) continue;
    if (probe_minimality(*F, m.config, 60, 0.1, 11) < -1e-7) continue;
    stationary.emplace_back(m.action, m.config);
    best = std::min(best, m.action);
  }
  // Keep the minimizers: stationary points above the minimal action level
  // are critical but not minimal, and the ordering claim is about minimizers.
  std::vector<PeriodicConfig> mins;
  for (const auto& [a, x] : stationary)
    if (a <= best + 1e-6) mins.push_back(x);
  REQ(mins.size() >= 2, "fewer than two retained minimizers");
  for (size_t a = 0; a < mins.size(); ++a)
    for (size_t b = a + 1; b < mins.size(); ++b) {
      if (equal_mod_shift(mins[a], mins[b], 1e-6)) continue;
      const Ordering o = compare(mins[a], mins[b], 1e-8);
      REQ(o == Ordering::StrictlyBelow || o == Ordering::StrictlyAbove,
          "pair neither ordered nor equal mod shift");
    }
  return true;
}

// 5. Quadrilateral inequality on 1000 random pairs in X_{8,5}.
bool c05_max_principle(std::string& note) {
  const FamilyPtr F = builtin("fk_nn", 1.0);
  for (int t = 0; t < 1000; ++t) {
    const PeriodicConfig x =
        jittered_profile(8, 5, 0.013 * t, 0.5, 5, static_cast<std::uint64_t>(2 * t));
    const PeriodicConfig y =
        jittered_profile(8, 5, 0.007 * t, 0.5, 5, static_cast<std::uint64_t>(2 * t + 1));
    const auto [lhs, rhs] = max_principle_check(*F, x, y);
    REQ(lhs <= rhs + 1e-12, "quadrilateral inequality violated");
  }
  return true;
}

// Ten Birkhoff minimizers shared by criteria 6-8.
const std::vector<PeriodicConfig>& birkhoff_minimizers(std::string& note,
                                                       bool& ok) {
  static std::vector<PeriodicConfig> mins;
  static bool built = false, good = false;
  if (!built) {
    built = true;
    const long pq[10][2] = {{3, 1}, {3, 2}, {4, 1}, {4, 3}, {5, 2},
                            {5, 3}, {5, 4}, {7, 4}, {8, 5}, {7, 2}};
    const FamilyPtr F = builtin("fk_nn", 1.0);
    good = true;
    for (const auto& e : pq) {
      const MinimizeResult m = minimize_periodic(
          *F, e[0], e[1], linear_profile(e[0], e[1], 0.21), 1e-10);
      if (!m.converged || !is_birkhoff(m.config)) {
        good = false;
        break;
      }
      mins.push_back(m.config);
    }
  }
  if (!good) note = "failed to build the Birkhoff minimizer pool";
  ok = good;
  return mins;
}

// 6. l1 distance to each shift translate equals |p l - q k| to 1e-9.
bool c06_shift_distance(std::string& note) {
  bool ok = false;
  const auto& mins = birkhoff_minimizers(note, ok);
  if (!ok) return false;
  for (const PeriodicConfig& x : mins)
    for (long k = 0; k < x.p; ++k)
      for (long l = -2; l <= 2; ++l) {
        const auto [dist, expect] = tauaction_check(x, k, l);
        REQ(std::fabs(dist - static_cast<double>(expect)) <= 1e-9,
            "shift distance identity violated");
      }
  return true;
}

// 7. The elementary translate moves every minimizer by l1 distance 1.
bool c07_unit_translate(std::string& note) {
  bool ok = false;
  const auto& mins = birkhoff_minimizers(note, ok);
  if (!ok) return false;
  for (const PeriodicConfig& x : mins) {
    const PeriodicConfig u = translate_U(x.p, x.q, x, 1);
    REQ(std::fabs(l1_window(u, x, 1, x.p) - 1.0) <= 1e-9,
        "unit translate distance not 1");
  }
  return true;
}

// 8. Pigeonhole: the largest orbit gap mod 1 has length >= 1/p.
bool c08_gap_pigeonhole(std::string& note) {
  bool ok = false;
  const auto& mins = birkhoff_minimizers(note, ok);
  if (!ok) return false;
  for (const PeriodicConfig& x : mins) {
    const auto gaps = find_gaps(extended_orbit(x));
    REQ(!gaps.empty(), "no gaps found");
    REQ(gaps.front().length() >= 1.0 / static_cast<double>(x.p) - 1e-12,
        "largest gap below 1/p");
  }
  return true;
}

// 9. Bump certification at (0.2, 0.5), eps = 0.01, k = 3.
bool c09_bump(std::string& note) {
  const BumpSpec b = make_bump(0.2, 0.5, 0.01, 3);
  for (int t = 0; t <= 100; ++t) {
    const double xi = 0.5 + 0.7 * t / 100.0;
    REQ(b(xi) == 0.0, "not exactly zero off the support");
  }
  const double plateau = 0.01 * 0.3 * 0.3 * 0.3 / certified_ck(3);
  for (int t = 0; t < 10; ++t) {
    const double xi = 0.275 + 0.15 * t / 9.0;
    REQ(std::fabs(b(xi) - plateau) <= 1e-15, "plateau value off");
  }
  REQ(b.ck_norm_sampled(4001) <= 0.01, "sampled C^k norm above eps");
  return true;
}

// 10. Destroying the flat continuum at (3,2): after the bump, 50 starts
//     yield only shift translates of y_min, and the pinned plateau probe
//     pays the quantitative penalty.
bool c10_destroy_periodic(std::string& note) {
  const DestroyPeriodicResult res =
      destroy_periodic(builtin("fk_nn", 0.0), 3, 2, 0.01, 2, 1e-10, 50, 1);
  REQ(res.report.unperturbed_classes > 1, "no continuum before the bump");
  REQ(res.report.all_translates, "a non-translate minimizer survived");
  const double w = res.bump.xi_plus - res.bump.xi_minus;
  const double bound = 0.01 * w * w / certified_ck(2);
  REQ(res.report.probe_excess >= bound - 1e-9, "probe excess below bound");
  return true;
}

// 11. Near-periodicity witness for the golden rotation at (13,8), r = 2,
//     window [0,500], with the exact drift budget.
bool c11_near_periodicity(std::string& note) {
  const RotationSpec w = RotationSpec::golden_mean();
  const NearPeriodicityResult res =
      near_periodicity_verify(rigid_rotation(0.0, w.to_double()), w, 13, 8, 2,
                              0, 500);
  const Int a = budget_a(Int(13), Int(8), w, Int(500));
  REQ(Int(res.a) == a, "drift budget mismatch");
  REQ(res.i0 > -13 && res.i0 <= 0, "witness index out of range");
  REQ(res.achieved <= 2.0 * 2.0 * static_cast<double>(res.a) / 13.0 + 1e-12,
      "achieved distance above 2 r a / p");
  REQ(res.within_bound, "witness not within bound");
  return true;
}

// 12. Confinement sandwich for the golden rotation at (5,3) on [0,200].
bool c12_confinement(std::string& note) {
  const RotationSpec w = RotationSpec::golden_mean();
  const ConfinementResult res =
      confine(rigid_rotation(0.0, w.to_double()), w, 5, 3, 0, 200);
  REQ(Int(res.a) == budget_a(Int(5), Int(3), w, Int(200)),
      "drift budget mismatch");
  REQ(res.lower_slack >= -1e-12, "lower sandwich violated");
  REQ(res.upper_slack >= -1e-12, "upper sandwich violated");
  REQ(res.y_birkhoff, "comparison sequence not Birkhoff");
  return true;
}

// 13. Exact parameter selection for the base-10 factorial Liouville number;
//     every exact-arithmetic check of the certificate passes, and the
//     artifact states why the minimization stages are skipped.
bool c13_exact_selection(std::string& note) {
  const PipelineResult res = run_destruction(
      builtin("fk_nn", 0.5), RotationSpec::liouville(10), Rat(1), Rat(14), 2,
      1, Rat(1, 100), Rat(1), 4, 1, 1e-10, 1000000);
  REQ(res.cert.pass, "certificate did not pass");
  REQ(!res.stages_run, "stages unexpectedly ran at exact constants");
  REQ(!res.mode_note.empty(), "missing mode note");
  for (const auto& c : res.cert.checks)
    REQ(c.pass, "exact check failed: " + c.name);
  const auto again =
      check_certificate(RotationSpec::liouville(10), res.cert);
  for (const auto& c : again) REQ(c.pass, "re-check failed: " + c.name);
  return true;
}

// 14. Relaxed-mode pipeline at desk scale: both stages run, the second gap
//     meets its guarantee, ten pinned probes pay the penalty, and no probe
//     rotation number admits a Birkhoff minimizer entering the window.
bool c14_relaxed_pipeline(std::string& note) {
  const PipelineResult res = run_destruction(
      builtin("fk_nn", 0.5), RotationSpec::golden_mean(), Rat(1), Rat(14), 2,
      1, Rat(1, 100), Rat(1, 1000000), 20, 1, 1e-10, 200);
  REQ(res.stages_run && res.stage1 && res.stage2, "stages did not run");
  REQ(res.cert.pass, "certificate did not pass");
  const Stage2Result& s2 = *res.stage2;
  REQ(s2.gap2_ok, "second gap below the relaxed guarantee");
  REQ(s2.probe_excess.size() == 10, "expected 10 pinned probes");
  for (double v : s2.probe_excess)
    REQ(v >= s2.probe_bound - 1e-9, "probe penalty below bound");
  REQ(!res.probes.empty(), "no rotation-number probes");
  for (const auto& pr : res.probes)
    REQ(!pr.violation, "a Birkhoff minimizer entered the forbidden window");
  return true;
}

// 15. Determinism: the runs behind criteria 3, 4, 10 and 14 serialize to
//     byte-identical artifacts when repeated with the same seed.
bool c15_determinism(std::string& note) {
  std::vector<RunConfig> rcs;
  {
    RunConfig rc;
    rc.subcommand = "minimize";
    rc.family = "fk_nn";
    rc.lambda = 1.0;
    rc.p = 5;
    rc.q = 3;
    rc.starts = 20;
    rc.seed = 1;
    rcs.push_back(rc);
  }
  {
    RunConfig rc;
    rc.subcommand = "minimize";
    rc.family = "fk_nn";
    rc.lambda = 1.5;
    rc.p = 8;
    rc.q = 5;
    rc.starts = 20;
    rc.seed = 7;
    rcs.push_back(rc);
  }
  {
    RunConfig rc;
    rc.subcommand = "destroy-periodic";
    rc.family = "fk_nn";
    rc.lambda = 0.0;
    rc.p = 3;
    rc.q = 2;
    rc.eps = 0.01;
    rc.k = 2;
    rc.starts = 50;
    rc.seed = 1;
    rcs.push_back(rc);
  }
  {
    RunConfig rc;
    rc.subcommand = "destroy";
    rc.family = "fk_nn";
    rc.lambda = 0.5;
    rc.mode = "relaxed:1e-6";
    rc.omega = "golden";
    rc.starts = 20;
    rc.seed = 1;
    rc.search_bound = 200;
    rcs.push_back(rc);
  }
  for (const RunConfig& rc : rcs) {
    const std::string a = run_config(rc).artifact.dump();
    const std::string b = run_config(rc).artifact.dump();
    REQ(a == b, "artifact differs between identical runs: " + rc.subcommand);
  }
  return true;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  bool (*fn)(std::string&);
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "gradient-fd-consistency", 5, c01_gradient_consistency},
      {2, "linear-solution-residual", 1, c02_linear_solution},
      {3, "stationarity-birkhoff", 10, c03_stationary_birkhoff},
      {4, "minimizer-ordering", 60, c04_ordering},
      {5, "maximum-principle", 30, c05_max_principle},
      {6, "shift-distance-identity", 10, c06_shift_distance},
      {7, "unit-translate-distance", 5, c07_unit_translate},
      {8, "gap-pigeonhole", 5, c08_gap_pigeonhole},
      {9, "bump-certification", 5, c09_bump},
      {10, "periodic-destruction", 120, c10_destroy_periodic},
      {11, "near-periodicity", 10, c11_near_periodicity},
      {12, "confinement-sandwich", 10, c12_confinement},
      {13, "exact-parameter-selection", 30, c13_exact_selection},
      {14, "relaxed-pipeline", 600, c14_relaxed_pipeline},
      {15, "determinism", 790, c15_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string note;
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.fn(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (pass && secs > c.limit_s) {
      pass = false;
      note = "time budget exceeded";
    }
    std::printf("[%s] %02d %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name, secs, note.empty() ? "" : " -- ", note.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
