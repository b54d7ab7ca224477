#include "fklab/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fk {

namespace {

double frac(double v) {
  double f = v - std::floor(v);
  if (f >= 1.0) f = 0.0;  // guard against rounding at the boundary
  return f;
}

long ifloor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

ExtendedOrbit extended_orbit(const PeriodicConfig& x, double tol) {
  ExtendedOrbit o;
  o.base = x;
  std::vector<double> pts;
  pts.reserve(static_cast<size_t>(x.p));
  for (long i = 1; i <= x.p; ++i) pts.push_back(frac(x.at(i)));
  std::sort(pts.begin(), pts.end());
  for (double v : pts) {
    if (o.points.empty() || v - o.points.back() > tol) {
      o.points.push_back(v);
    }
  }
  // The wrap pair may also collide mod 1.
  if (o.points.size() > 1 &&
      (o.points.front() + 1.0) - o.points.back() <= tol)
    o.points.pop_back();
  return o;
}

std::vector<GapInterval> find_gaps(const ExtendedOrbit& o) {
  std::vector<GapInterval> gaps;
  const auto& pts = o.points;
  const size_t n = pts.size();
  if (n == 0) return gaps;
  for (size_t i = 0; i + 1 < n; ++i)
    gaps.push_back({pts[i], pts[i + 1], true});
  gaps.push_back({pts[n - 1], pts[0] + 1.0, true});
  std::sort(gaps.begin(), gaps.end(), [](const GapInterval& a,
                                         const GapInterval& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    return a.lo < b.lo;
  });
  return gaps;
}

PeriodicConfig translate_U(long p, long q, const PeriodicConfig& x,
                           long power) {
  if (x.p != p || x.q != q)
    throw std::invalid_argument("translate_U: config not in X_{p,q}");
  const auto [s, t] = extended_euclid(Int(p), Int(q));
  const long sl = s.get_si(), tl = t.get_si();
  return shift(x, power * sl, power * tl);
}

std::pair<double, long> tauaction_check(const PeriodicConfig& x, long k,
                                        long l) {
  const PeriodicConfig tx = shift(x, k, l);
  double norm = 0.0;
  for (long i = 1; i <= x.p; ++i) norm += std::fabs(tx.at(i) - x.at(i));
  return {norm, std::labs(x.p * l - x.q * k)};
}

NearPeriodicityResult near_periodicity_verify(const ConfigFn& x,
                                              const RotationSpec& omega,
                                              long p, long q, int r, long i1,
                                              long i2) {
  if (p < 1 || r < 1 || i2 <= i1)
    throw std::invalid_argument("near_periodicity_verify: bad arguments");
  NearPeriodicityResult res;
  res.a = budget_a(Int(p), Int(q), omega, Int(i2 - i1)).get_si();
  res.bound = 2.0 * r * static_cast<double>(res.a) / static_cast<double>(p);

  double best = std::numeric_limits<double>::infinity();
  long best_i0 = 0;
  int best_nt = 0;
  for (long i0 = -p + 1; i0 <= 0; ++i0) {
    // Translates tau_{np, nq} whose shifted window stays inside [i1, i2].
    long nmin = ifloor_div(i1 - (i0 - r) + p - 1, p);
    while ((i0 - r) + nmin * p < i1) ++nmin;
    long nmax = ifloor_div(i2 - (i0 + r - 1), p);
    while ((i0 + r - 1) + nmax * p > i2) --nmax;
    if (nmax < nmin) continue;
    double worst = 0.0;
    for (long n = nmin; n <= nmax; ++n) {
      for (long m = n + 1; m <= nmax; ++m) {
        double s = 0.0;
        for (long j = i0 - r; j <= i0 + r - 1; ++j)
          s += std::fabs((x(j + n * p) - n * q) - (x(j + m * p) - m * q));
        worst = std::max(worst, s);
      }
    }
    if (worst < best) {
      best = worst;
      best_i0 = i0;
      best_nt = static_cast<int>(nmax - nmin + 1);
    }
  }
  res.i0 = best_i0;
  res.achieved = best;
  res.n_translates = best_nt;
  res.within_bound = best <= res.bound + 1e-12;
  return res;
}

namespace {

// Monotone left-continuous step evaluator: value at the greatest breakpoint
// argument <= xi (with a hairline tolerance so exact hits are honored in
// floating point).
struct StepFn {
  std::vector<PsiEntry> pts;  // sorted by arg, vals prefix-maximized

  void finalize() {
    std::sort(pts.begin(), pts.end(),
              [](const PsiEntry& a, const PsiEntry& b) { return a.arg < b.arg; });
    double run = -std::numeric_limits<double>::infinity();
    for (auto& e : pts) {
      run = std::max(run, e.val);
      e.val = run;
    }
  }

  double operator()(double xi) const {
    const double key = xi + 1e-12;
    auto it = std::upper_bound(
        pts.begin(), pts.end(), key,
        [](double v, const PsiEntry& e) { return v < e.arg; });
    if (it == pts.begin())
      throw std::runtime_error("confine: psi evaluated left of all samples");
    return std::prev(it)->val;
  }
};

}  // namespace

ConfigFn rigid_rotation(double xi0, double w) {
  return [xi0, w](long i) { return xi0 + w * static_cast<double>(i); };
}

ConfinementResult confine(const ConfigFn& x, const RotationSpec& omega, long p,
                          long q, long i1, long i2, long sample_margin) {
  if (p < 1 || i2 <= i1) throw std::invalid_argument("confine: bad window");
  ConfinementResult res;
  const double w = omega.to_double();
  const double rot = static_cast<double>(q) / static_cast<double>(p);
  res.mirrored = w < rot;

  // Mirror branch: flip the sequence vertically, run the w > q/p argument,
  // and flip back when measuring the sandwich.
  const ConfigFn xs = res.mirrored
                          ? ConfigFn([&x](long i) { return -x(i); })
                          : x;
  const long qs = res.mirrored ? -q : q;
  // For a mirrored Liouville/quadratic spec only the bounds matter, and
  // budget_a uses |q - w p| which is mirror-invariant.
  res.a = budget_a(Int(p), Int(q), omega, Int(i2 - i1)).get_si();

  const double rots = static_cast<double>(qs) / static_cast<double>(p);
  const long span = i2 - i1;
  const long lrange =
      sample_margin >= 0
          ? sample_margin
          : res.a + static_cast<long>(std::ceil(std::fabs(rots) * span)) + 4;

  // Semi-conjugacy samples: the graph {xs(i1) + w_s (k - i1) + l -> xs(k) + l}.
  const double ws = res.mirrored ? -w : w;
  StepFn psi;
  psi.pts.reserve(static_cast<size_t>((span + 1) * (2 * lrange + 1)));
  const double base_arg = xs(i1);
  for (long k = i1; k <= i2; ++k) {
    const double arg = base_arg + ws * static_cast<double>(k - i1);
    const double val = xs(k);
    for (long l = -lrange; l <= lrange; ++l)
      psi.pts.push_back({arg + l, val + l});
  }
  psi.finalize();

  // Periodic comparison sequence y_j = psi(xs(i1) + (q_s/p)(j - i1)).
  std::vector<double> yv(static_cast<size_t>(p));
  std::vector<PsiEntry> used(static_cast<size_t>(p));
  for (long t = 1; t <= p; ++t) {
    const double arg = base_arg + rots * static_cast<double>(t - i1);
    const double val = psi(arg);
    yv[static_cast<size_t>(t - 1)] = val;
    used[static_cast<size_t>(t - 1)] = {arg, val};
  }
  PeriodicConfig ys(p, qs, std::move(yv));
  res.psi_table = std::move(used);
  res.y_birkhoff = is_birkhoff(ys);

  const PeriodicConfig uay = translate_U(p, qs, ys, res.a);
  double lower = std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (long j = i1; j <= i2; ++j) {
    lower = std::min(lower, xs(j) - ys.at(j));
    upper = std::min(upper, uay.at(j) - xs(j));
  }
  res.lower_slack = lower;
  res.upper_slack = upper;

  if (res.mirrored) {
    // Report y in the original orientation: y_j := -ys_j lies above x and
    // U^{-a} of it lies below.
    std::vector<double> back(static_cast<size_t>(p));
    for (long t = 1; t <= p; ++t)
      back[static_cast<size_t>(t - 1)] = -ys.at(t);
    res.y = PeriodicConfig(p, q, std::move(back));
  } else {
    res.y = std::move(ys);
  }
  return res;
}

}  // namespace fk
