#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fklab/lattice.hpp"
#include "fklab/potentials.hpp"

namespace fk {

struct MinimizeResult {
  PeriodicConfig config;   // gauge-normalized: x_0 in [0,1)
  double action = 0.0;
  double grad_norm = 0.0;  // sup norm of the periodic-action gradient
  int iterations = 0;
  bool converged = false;
  std::vector<double> action_trace;  // non-increasing diagnostic
  int multiplicity = 1;              // starts merged into this class
  std::optional<ShiftClass> merge_witness;
};

// W_p(x) = sum_{j=1}^{p} S_j(x).
double periodic_action(const LocalPotentialFamily& F, const PeriodicConfig& x);

// W_{[i1,i2]}(x) = sum_{j=i1}^{i2} S_j(x); needs x on [i1-r, i2+r].
double window_action(const LocalPotentialFamily& F, const ConfigFn& x, long i1,
                     long i2);

// Gradient of W_p with respect to the p slot values; component i equals the
// recurrence residual at site i.
std::vector<double> periodic_gradient(const LocalPotentialFamily& F,
                                      const PeriodicConfig& x);

PeriodicConfig linear_profile(long p, long q, double xi0);
PeriodicConfig jittered_profile(long p, long q, double xi0, double amp,
                                std::uint64_t seed, std::uint64_t stream);

// Levenberg-damped Newton on the folded p x p periodic Hessian with monotone
// step acceptance; high damping degenerates to adaptive-step gradient
// descent.  Stops when the gradient sup norm is <= tol.
MinimizeResult minimize_periodic(const LocalPotentialFamily& F, long p, long q,
                                 const PeriodicConfig& init, double tol = 1e-10,
                                 int max_iter = 500);

// Same Newton scheme with one slot (0-based) held at its initial value;
// used for constrained probes that force a site onto a bump plateau.
MinimizeResult minimize_pinned(const LocalPotentialFamily& F, long p, long q,
                               const PeriodicConfig& init, long pinned_slot,
                               double tol = 1e-10, int max_iter = 500);

// Smallest action change over n random finite-support perturbations of sup
// amplitude amp; >= -tol_probe supports (never proves) global minimality.
double probe_minimality(const LocalPotentialFamily& F, const PeriodicConfig& x,
                        int n_probes, double amp, std::uint64_t seed);

struct MinimizerSet {
  std::vector<MinimizeResult> minimizers;  // retained classes, sorted by x_0
  int discarded_nonminimal = 0;  // stationary but above the best action,
                                 // or failed the minimality probe
  int failed = 0;                // non-converged starts
  double best_action = 0.0;
};

// Multi-start minimization with stratified linear-profile seeds, followed by
// action filtering, a random-probe minimality check, and deduplication
// modulo the shift group.
MinimizerSet minimizer_set(const LocalPotentialFamily& F, long p, long q,
                           int n_starts, std::uint64_t seed, double tol = 1e-10,
                           double dedup_tol = 1e-6);

// (W_p(x^y) + W_p(xvy), W_p(x) + W_p(y)); the first is never larger for
// twist families.
std::pair<double, double> max_principle_check(const LocalPotentialFamily& F,
                                              const PeriodicConfig& x,
                                              const PeriodicConfig& y);

}  // namespace fk
