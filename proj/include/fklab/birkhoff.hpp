#pragma once

#include <vector>

#include "fklab/lattice.hpp"
#include "fklab/numtheory.hpp"
#include "fklab/potentials.hpp"

namespace fk {

// The extended orbit Sigma_x = {x_k + l} reduced mod 1: at most p distinct
// points in [0,1).
struct ExtendedOrbit {
  PeriodicConfig base;
  std::vector<double> points;  // sorted, deduplicated
};

struct GapInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool endpoints_in_orbit = true;
  double length() const { return hi - lo; }
};

ExtendedOrbit extended_orbit(const PeriodicConfig& x, double tol = kOrderTol);

// Complementary intervals of the orbit in one period, sorted by length
// descending (ties by lower endpoint).  The largest has length >= 1/p.
std::vector<GapInterval> find_gaps(const ExtendedOrbit& o);

// U_{p,q} = tau_{s,t} with p t - q s = 1; U^p x = x + 1.
PeriodicConfig translate_U(long p, long q, const PeriodicConfig& x, long power);

// (||tau_{k,l} x - x||_{l1 over one period}, |p l - q k|); equal for
// Birkhoff x.
std::pair<double, long> tauaction_check(const PeriodicConfig& x, long k, long l);

struct NearPeriodicityResult {
  long i0 = 0;          // witness in (-p, 0]
  double achieved = 0;  // max over admissible translate pairs of the l1 sum
  double bound = 0;     // 2 r a / p
  long a = 0;
  int n_translates = 0;
  bool within_bound = false;
};

// Quantitative near-periodicity: for a maximally periodic Birkhoff sequence
// sampled on [i1, i2], some window [i0-r, i0+r-1] sees all in-range
// (p,q)-translates within l1 distance 2 r a / p, a = ceil((i2-i1)|q - w p|).
NearPeriodicityResult near_periodicity_verify(const ConfigFn& x,
                                              const RotationSpec& omega, long p,
                                              long q, int r, long i1, long i2);

struct PsiEntry {
  double arg = 0.0;
  double val = 0.0;
};

struct ConfinementResult {
  PeriodicConfig y;  // periodic Birkhoff comparison sequence
  long a = 0;
  std::vector<PsiEntry> psi_table;  // breakpoints actually used for y
  double lower_slack = 0.0;  // min_j (x_j - y_j)            (>= ~0)
  double upper_slack = 0.0;  // min_j ((U^a y)_j - x_j)      (>= ~0)
  bool y_birkhoff = false;
  bool mirrored = false;     // the omega < q/p branch was reduced to this one
};

// Confinement sandwich y_j <= x_j <= (U^a y)_j on [i1, i2], built from the
// nondecreasing semi-conjugacy psi (left-continuous step extension of the
// sampled graph {x_{i1} + w(k - i1) + l -> x_k + l}).
ConfinementResult confine(const ConfigFn& x, const RotationSpec& omega, long p,
                          long q, long i1, long i2, long sample_margin = -1);

// Rigid rotation generator x_i = xi0 + w i.
ConfigFn rigid_rotation(double xi0, double w);

}  // namespace fk
