#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fklab/bump.hpp"
#include "fklab/numtheory.hpp"

namespace fk {

// Stage 1: a bump of C^k size eps/3 on a maximal gap of the extended orbit
// of a (p,q)-minimizer y_min.  xi marks the plateau start; every value in
// [xi, xi + 1/(2p)] lies on the plateau because the gap has length >= 1/p.
struct Stage1Result {
  FamilyPtr family;       // perturbed family F^1
  MinimizeResult y_min;   // canonical representative, x_0 in [0,1) minimal
  GapInterval gap;
  BumpSpec bump;
  double xi = 0.0;
  double band_hi = 0.0;         // xi + 1/(2p)
  double plateau_penalty = 0.0; // measured pinned one-site excess
  double penalty_bound = 0.0;   // eps / (3 C_k p^k)
  double budget_sampled = 0.0;  // grid-sampled C^k distance to the base family
};

// Stage 2: minimize F^1 over X_{p~, q~}, locate a complementary interval
// gap2 of the new orbit that overlaps the stage-1 band, and bump it too.
struct Stage2Result {
  FamilyPtr family;       // F^2 = F^1 + second bump
  MinimizeResult x_min;
  GapInterval gap2;
  BumpSpec bump;
  double eta = 0.0;               // plateau start of the second bump
  double gap2_guarantee = 0.0;    // eps / (C_kr p^(k+1))
  bool gap2_ok = false;           // gap2.length() >= guarantee - tol
  std::vector<double> probe_excess;  // pinned probes across [eta-, eta+]
  double probe_bound = 0.0;       // (eps/3C_k) (eps/(C_kr p^(k+1)))^k
  long plateau_site_count = 0;    // sites of x_min in the stage-1 band
  double site_count_bound = 0.0;  // 12 C C_k r (2r+1) p^k / eps
  double reminimize_drift = 0.0;  // sup |re-minimized - x_min|
  double action_drift = 0.0;      // |W^2(x_min) - W^1(x_min)|
  double budget_sampled = 0.0;    // combined sampled C^k perturbation size
};

struct OmegaProbeReport {
  Rat Omega;                 // probe rotation number Q/P
  bool in_delta_window = false;   // certified |Omega - omega| <= delta
  bool in_qp_window = false;      // within the admissible rational window
  int n_classes = 0;
  bool violation = false;    // a Birkhoff minimizer orbit met (eta-, eta+)
  double closest_point = 0.0;  // orbit point nearest to the interval (mod 1)
  PeriodicConfig witness;    // populated only on violation
};

struct DestructionCertificate {
  ParamSelection params;
  std::string family_id;
  std::optional<BumpSpec> bump1, bump2;
  double xi = 0.0;
  double eta_minus = 0.0;
  double eta_plus = 0.0;      // eta_minus + eps/(2 C_kr p^(k+1)) exactly
  Rat delta;                  // certified rational lower bound, > 0
  std::vector<CheckResult> checks;
  bool pass = false;
};

struct PipelineResult {
  DestructionCertificate cert;
  std::optional<Stage1Result> stage1;
  std::optional<Stage2Result> stage2;
  std::vector<OmegaProbeReport> probes;
  bool stages_run = false;
  std::string mode_note;
};

// Canonical class representative: among the shift translates with
// x_0 in [0,1), the one with the smallest x_0.
PeriodicConfig canonical_representative(const PeriodicConfig& x);

// Certified rational lower bound on
// min{(q/p + 1/((p'-1)p)) - omega, omega - (q/p + 1/(p'p))}.
Rat delta_window(const RotationSpec& omega, long p, long q, long p_prime);

Stage1Result run_stage1(const FamilyPtr& F, const ParamSelection& params,
                        int n_starts, std::uint64_t seed, double tol);

Stage2Result run_stage2(const FamilyPtr& F_base, const Stage1Result& s1,
                        const ParamSelection& params, int n_starts,
                        std::uint64_t seed, double tol);

std::vector<OmegaProbeReport> probe_gap_minimizers(
    const FamilyPtr& F2, const RotationSpec& omega,
    const std::vector<Rat>& omega_list, const DestructionCertificate& cert,
    int n_starts, std::uint64_t seed, double tol);

// Exact-arithmetic side of the certificate: A1-A3 re-verification, the
// inequality chain, and the delta-window positivity.
std::vector<CheckResult> check_certificate(const RotationSpec& omega,
                                           const DestructionCertificate& cert);

// Full orchestration.  relax_factor = 1 runs in exact-constants mode: the
// selection and certificate are produced but the minimization stages are
// skipped (and the note says why).  relax_factor < 1 scales the A2 gate so
// a desk-scale p becomes admissible and all stages execute.
PipelineResult run_destruction(const FamilyPtr& F, const RotationSpec& omega,
                               const Rat& gamma, const Rat& sigma, long k,
                               long r, const Rat& eps, const Rat& relax_factor,
                               int n_starts, std::uint64_t seed, double tol,
                               long search_bound);

}  // namespace fk
