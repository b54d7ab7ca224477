#include "fklab/minimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "fklab/rng.hpp"

namespace fk {

namespace {

long fdiv(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int thread_budget() {
  if (const char* env = std::getenv("FK_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

// Folded periodic Hessian: H(a,b) = sum_n d2 W / dx_{a+1} dx_{b+1+n p}.
Eigen::MatrixXd folded_hessian(const LocalPotentialFamily& F,
                               const PeriodicConfig& x) {
  const long p = x.p;
  const int r = F.range();
  const ConfigFn fn = as_fn(x);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
  for (long a = 0; a < p; ++a) {
    const long i = a + 1;
    for (long d = -2 * r; d <= 2 * r; ++d) {
      const long k = i + d;
      const long b = k - 1 - fdiv(k - 1, p) * p;  // slot of site k
      H(a, b) += hessian_entry(F, i, k, fn);
    }
  }
  return H;
}

// Moves a configuration along the softest Hessian eigendirection when the
// gradient carries no usable information there.  Bump tails decay like
// exp(-1/t), so a gradient test at tol leaves a flat interval of stationary
// points around the true minimizer; inside it the action ties to the last
// ulp and the tie interval is symmetric about the minimizer.  We bisect the
// tie boundaries by direct action comparison and recentre.  Returns true
// if x moved (caller should re-run the Newton loop afterwards).
bool soft_mode_polish(const LocalPotentialFamily& F, PeriodicConfig& x,
                      double& action) {
  const long p = x.p;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(folded_hessian(F, x));
  if (eig.info() != Eigen::Success) return false;
  const double lam_min = eig.eigenvalues()(0);
  const double lam_max = eig.eigenvalues()(p - 1);
  if (lam_min > 1e-6 * std::max(1.0, std::fabs(lam_max))) return false;
  const Eigen::VectorXd v = eig.eigenvectors().col(0);

  const auto shifted = [&](double t) {
    PeriodicConfig y = x;
    for (long a = 0; a < p; ++a) y.values[static_cast<size_t>(a)] += t * v(a);
    return y;
  };
  const double a0 = periodic_action(F, x);
  const double cap = 0.25;

  // Descent first, with a margin above summation noise so the scan cannot
  // fight the recentring step over single-ulp jitter; this rescues starts
  // stalled on a plateau of the perturbation.
  const double descent_margin = 1e-13 * std::max(1.0, std::fabs(a0));
  double best_t = 0.0, best_a = a0 - descent_margin;
  for (double t = cap; t >= 1e-9; t *= 0.5) {
    for (const double s : {t, -t}) {
      const double a = periodic_action(F, shifted(s));
      if (a < best_a) {
        best_a = a;
        best_t = s;
      }
    }
  }
  if (best_t != 0.0) {
    x = shifted(best_t);
    action = best_a;
    return true;
  }

  // No strict descent: centre x in the action-tie interval along v.  The
  // tie test carries a small slack so its boundary sits where the tail is
  // steep; with an exact ulp-level comparison the boundary would land on
  // summation noise instead.
  const double a_tie = a0 + 1e-12 * std::max(1.0, std::fabs(a0));
  const auto tie_extent = [&](double dir) {
    if (periodic_action(F, shifted(dir * cap)) <= a_tie) return cap;
    double lo = 0.0, hi = cap;
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (periodic_action(F, shifted(dir * mid)) <= a_tie)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  };
  const double t_plus = tie_extent(1.0);
  const double t_minus = tie_extent(-1.0);
  const double shift = 0.5 * (t_plus - t_minus);
  if (std::fabs(shift) <= 1e-12 || t_plus >= cap || t_minus >= cap)
    return false;
  x = shifted(shift);
  action = periodic_action(F, x);
  return true;
}

}  // namespace

double periodic_action(const LocalPotentialFamily& F, const PeriodicConfig& x) {
  const ConfigFn fn = as_fn(x);
  double s = 0.0;
  for (long j = 1; j <= x.p; ++j) s += local_energy(F, j, fn);
  return s;
}

double window_action(const LocalPotentialFamily& F, const ConfigFn& x, long i1,
                     long i2) {
  double s = 0.0;
  for (long j = i1; j <= i2; ++j) s += local_energy(F, j, x);
  return s;
}

std::vector<double> periodic_gradient(const LocalPotentialFamily& F,
                                      const PeriodicConfig& x) {
  const ConfigFn fn = as_fn(x);
  std::vector<double> g(static_cast<size_t>(x.p));
  for (long i = 1; i <= x.p; ++i)
    g[static_cast<size_t>(i - 1)] = grad_component(F, i, fn);
  return g;
}

PeriodicConfig linear_profile(long p, long q, double xi0) {
  std::vector<double> v(static_cast<size_t>(p));
  const double w = static_cast<double>(q) / p;
  for (long t = 1; t <= p; ++t) v[static_cast<size_t>(t - 1)] = xi0 + w * t;
  return PeriodicConfig(p, q, std::move(v));
}

PeriodicConfig jittered_profile(long p, long q, double xi0, double amp,
                                std::uint64_t seed, std::uint64_t stream) {
  PeriodicConfig x = linear_profile(p, q, xi0);
  for (long t = 0; t < p; ++t)
    x.values[static_cast<size_t>(t)] +=
        uniform_sym(seed, stream, static_cast<std::uint64_t>(t), amp);
  return x;
}

MinimizeResult minimize_periodic(const LocalPotentialFamily& F, long p, long q,
                                 const PeriodicConfig& init, double tol,
                                 int max_iter) {
  if (init.p != p || init.q != q)
    throw std::invalid_argument("minimize_periodic: init has wrong (p,q)");
  if (tol <= 0) throw std::invalid_argument("minimize_periodic: tol must be > 0");

  MinimizeResult res;
  PeriodicConfig x = init;
  double action = periodic_action(F, x);
  res.action_trace.push_back(action);
  double mu = 1e-10;

  int iter = 0;
  const auto newton_loop = [&]() {
    res.converged = false;
    for (; iter < max_iter; ++iter) {
      const std::vector<double> g = periodic_gradient(F, x);
      double gnorm = 0.0;
      for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
      res.grad_norm = gnorm;
      if (gnorm <= tol) {
        res.converged = true;
        break;
      }

      const Eigen::MatrixXd H = folded_hessian(F, x);
      const Eigen::Map<const Eigen::VectorXd> gv(g.data(), p);
      bool accepted = false;
      for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
        Eigen::MatrixXd Hd = H;
        for (long a = 0; a < p; ++a) Hd(a, a) += mu;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hd);
        if (ldlt.info() == Eigen::Success) {
          const Eigen::VectorXd step = ldlt.solve(-gv);
          PeriodicConfig trial = x;
          for (long a = 0; a < p; ++a)
            trial.values[static_cast<size_t>(a)] += step(a);
          const double trial_action = periodic_action(F, trial);
          if (trial_action <= action) {
            x = std::move(trial);
            action = trial_action;
            res.action_trace.push_back(action);
            mu = std::max(mu * 0.25, 1e-12);
            accepted = true;
            break;
          }
        }
        mu *= 10.0;
      }
      if (!accepted) break;  // damping exhausted; report as non-converged
    }
  };
  newton_loop();
  for (int round = 0; round < 8 && res.converged; ++round) {
    if (!soft_mode_polish(F, x, action)) break;
    newton_loop();
  }
  res.iterations = iter;
  res.config = normalize_gauge(x);
  res.action = periodic_action(F, res.config);
  if (res.converged) {
    // Re-measure on the normalized representative.
    double gnorm = 0.0;
    for (double v : periodic_gradient(F, res.config))
      gnorm = std::max(gnorm, std::fabs(v));
    res.grad_norm = gnorm;
  }
  return res;
}

MinimizeResult minimize_pinned(const LocalPotentialFamily& F, long p, long q,
                               const PeriodicConfig& init, long pinned_slot,
                               double tol, int max_iter) {
  if (init.p != p || init.q != q)
    throw std::invalid_argument("minimize_pinned: init has wrong (p,q)");
  if (pinned_slot < 0 || pinned_slot >= p)
    throw std::invalid_argument("minimize_pinned: slot out of range");
  MinimizeResult res;
  PeriodicConfig x = init;
  const int r = F.range();
  const long nfree = p - 1;
  double action = periodic_action(F, x);
  res.action_trace.push_back(action);
  double mu = 1e-10;
  // Map free slots to reduced indices.
  std::vector<long> reduced(static_cast<size_t>(p), -1);
  {
    long a = 0;
    for (long s = 0; s < p; ++s)
      if (s != pinned_slot) reduced[static_cast<size_t>(s)] = a++;
  }
  int iter = 0;
  for (; iter < max_iter && nfree > 0; ++iter) {
    const std::vector<double> g = periodic_gradient(F, x);
    double gnorm = 0.0;
    for (long s = 0; s < p; ++s)
      if (s != pinned_slot) gnorm = std::max(gnorm, std::fabs(g[static_cast<size_t>(s)]));
    res.grad_norm = gnorm;
    if (gnorm <= tol) {
      res.converged = true;
      break;
    }
    const ConfigFn fn = as_fn(x);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nfree, nfree);
    Eigen::VectorXd gv(nfree);
    for (long s = 0; s < p; ++s) {
      if (s == pinned_slot) continue;
      const long a = reduced[static_cast<size_t>(s)];
      const long i = s + 1;
      gv(a) = g[static_cast<size_t>(s)];
      for (long d = -2 * r; d <= 2 * r; ++d) {
        const long kk = i + d;
        const long slot = kk - 1 - fdiv(kk - 1, p) * p;
        if (slot == pinned_slot) continue;
        H(a, reduced[static_cast<size_t>(slot)]) += hessian_entry(F, i, kk, fn);
      }
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      Eigen::MatrixXd Hd = H;
      for (long a = 0; a < nfree; ++a) Hd(a, a) += mu;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hd);
      if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd step = ldlt.solve(-gv);
        PeriodicConfig trial = x;
        for (long s = 0; s < p; ++s)
          if (s != pinned_slot)
            trial.values[static_cast<size_t>(s)] +=
                step(reduced[static_cast<size_t>(s)]);
        const double trial_action = periodic_action(F, trial);
        if (trial_action <= action) {
          x = std::move(trial);
          action = trial_action;
          res.action_trace.push_back(action);
          mu = std::max(mu * 0.25, 1e-12);
          accepted = true;
        }
      }
      if (!accepted) mu *= 10.0;
    }
    if (!accepted) break;
  }
  res.iterations = iter;
  res.config = x;  // no gauge normalization: the pinned value is meaningful
  res.action = action;
  return res;
}

double probe_minimality(const LocalPotentialFamily& F, const PeriodicConfig& x,
                        int n_probes, double amp, std::uint64_t seed) {
  // Finite-support perturbations are evaluated in X_{Mp, Mq} with M large
  // enough that the support never wraps; M = 3 keeps one untouched period.
  const long p = x.p;
  const int r = F.range();
  double worst = 1e300;
  for (int t = 0; t < n_probes; ++t) {
    const long support =
        1 + static_cast<long>(uniform01(seed, 1000 + t, 0) * std::min<long>(p, 8));
    const long start = 1 + static_cast<long>(uniform01(seed, 1000 + t, 1) *
                                             static_cast<double>(p));
    // Action difference is local: only windows touching the support change.
    const long lo = start - r, hi = start + support - 1 + r;
    const ConfigFn base = as_fn(x);
    std::vector<double> delta(static_cast<size_t>(support));
    for (long s = 0; s < support; ++s)
      delta[static_cast<size_t>(s)] =
          uniform_sym(seed, 1000 + t, 2 + s, amp);
    const ConfigFn pert = [&](long i) {
      double v = x.at(i);
      if (i >= start && i < start + support)
        v += delta[static_cast<size_t>(i - start)];
      return v;
    };
    const double diff =
        window_action(F, pert, lo, hi) - window_action(F, base, lo, hi);
    worst = std::min(worst, diff);
  }
  return worst;
}

MinimizerSet minimizer_set(const LocalPotentialFamily& F, long p, long q,
                           int n_starts, std::uint64_t seed, double tol,
                           double dedup_tol) {
  if (n_starts < 1)
    throw std::invalid_argument("minimizer_set: need at least one start");

  std::vector<MinimizeResult> raw(static_cast<size_t>(n_starts));
  const int threads = std::min(thread_budget(), n_starts);
  auto run_range = [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      const double xi0 = (s + 0.5) / n_starts;
      const PeriodicConfig init =
          jittered_profile(p, q, xi0, 0.25, seed, static_cast<std::uint64_t>(s));
      raw[static_cast<size_t>(s)] = minimize_periodic(F, p, q, init, tol);
    }
  };
  if (threads <= 1) {
    run_range(0, n_starts);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_starts + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(run_range, t * chunk,
                        std::min(n_starts, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }

  MinimizerSet out;
  double best = 1e300;
  for (const auto& r : raw)
    if (r.converged) best = std::min(best, r.action);
  out.best_action = best;

  const double action_tol = std::max(1e-8, 1e3 * tol);
  for (auto& r : raw) {
    if (!r.converged) {
      ++out.failed;
      continue;
    }
    if (r.action > best + action_tol) {
      ++out.discarded_nonminimal;  // stationary point above the minimum level
      continue;
    }
    if (probe_minimality(F, r.config, 100, 0.1, seed ^ 0x5bd1e995ULL) <
        -action_tol) {
      ++out.discarded_nonminimal;  // fails the finite-support probe
      continue;
    }
    bool merged = false;
    for (auto& kept : out.minimizers) {
      if (auto w = equal_mod_shift(r.config, kept.config, dedup_tol)) {
        ++kept.multiplicity;
        if (!kept.merge_witness) kept.merge_witness = w;
        merged = true;
        break;
      }
    }
    if (!merged) out.minimizers.push_back(std::move(r));
  }
  std::sort(out.minimizers.begin(), out.minimizers.end(),
            [](const MinimizeResult& a, const MinimizeResult& b) {
              const double ax = a.config.at(0), bx = b.config.at(0);
              if (ax != bx) return ax < bx;
              return a.action < b.action;
            });
  return out;
}

std::pair<double, double> max_principle_check(const LocalPotentialFamily& F,
                                              const PeriodicConfig& x,
                                              const PeriodicConfig& y) {
  const double lhs = periodic_action(F, min_config(x, y)) +
                     periodic_action(F, max_config(x, y));
  const double rhs = periodic_action(F, x) + periodic_action(F, y);
  return {lhs, rhs};
}

}  // namespace fk
