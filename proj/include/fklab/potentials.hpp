#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fklab/lattice.hpp"

namespace fk {

// Accessor for a configuration defined on (a subset of) the integers.
using ConfigFn = std::function<double(long)>;

ConfigFn as_fn(const PeriodicConfig& x);
ConfigFn as_fn(const SeqWindow& x);

// A finite-range shift-invariant family {S_j}: every S_j is the same window
// function s0 applied to (x_{j-r}, ..., x_{j+r}), so shift invariance
// S_j(x) = S_{j+k}(tau_{k,l} x) holds by construction.  s0 must be invariant
// under adding 1 to all arguments (vertical period).
class LocalPotentialFamily {
 public:
  virtual ~LocalPotentialFamily() = default;

  virtual int range() const = 0;
  virtual std::string name() const = 0;
  virtual std::string params_json() const { return "{}"; }

  // w points at 2r+1 values x_{j-r}..x_{j+r}.
  virtual double window_energy(const double* w) const = 0;

  // d s0 / d w_t, t = 0..2r.  Defaults to central finite differences
  // (step 1e-5) when no analytic form is supplied.
  virtual void window_grad(const double* w, double* g) const;

  // Second derivatives of s0, (2r+1)x(2r+1) row-major.
  virtual void window_hess(const double* w, double* h) const;

  virtual bool analytic_derivatives() const { return false; }

  // Sup bound for |d s0 / d w_t| and |d^2 s0| over the band
  // |x_{i+1} - x_i| <= band (used as the condition-E constant C).
  virtual double derivative_bound(double band) const;

  // Nearest-neighbor families assembled from a generating function
  // S(x, X) expose V' so orbits can be read off as twist-map orbits.
  virtual bool has_generating_split() const { return false; }
  virtual double v_prime(double /*xi*/) const { return 0.0; }
};

using FamilyPtr = std::shared_ptr<const LocalPotentialFamily>;

// name in {"fk_nn", "fk_nnn"}; lambda is the kick strength of
// V(xi) = (lambda/2pi) sin(2 pi xi).
FamilyPtr builtin(const std::string& name, double lambda);

// S_j(x).
double local_energy(const LocalPotentialFamily& F, long j, const ConfigFn& x);

// Recurrence residual sum_{|j-i|<=r} dS_j/dx_i; zero iff x is an
// equilibrium at site i.  Needs x on [i-2r, i+2r].
double grad_component(const LocalPotentialFamily& F, long i, const ConfigFn& x);

// d^2/dx_i dx_k of the formal action sum; zero for |i-k| > 2r.
double hessian_entry(const LocalPotentialFamily& F, long i, long k,
                     const ConfigFn& x);

enum class ConditionStatus {
  HoldsByConstruction,
  VerifiedOnSample,
  Violated,
  Restricted,
};

const char* to_string(ConditionStatus s);

struct ConditionFinding {
  ConditionStatus status = ConditionStatus::VerifiedOnSample;
  std::string detail;
  double witness_value = 0.0;  // offending derivative for Violated
};

struct ConditionReport {
  ConditionFinding a, b, c, d, e;
  double bound_C = 0.0;       // condition-E constant on the band
  std::string domain;         // description of the verification domain
  bool ok() const;
};

ConditionReport verify_conditions(const LocalPotentialFamily& F,
                                  const std::vector<PeriodicConfig>& samples,
                                  double diff_bound);

struct TwistPoint {
  double x;  // x_i mod 1
  double y;  // conjugate momentum x_{i+1} - x_i - V'(x_i)
};

struct TwistOrbit {
  std::vector<TwistPoint> points;
  double map_defect = 0.0;  // max deviation from the twist-map identity
};

TwistOrbit twist_orbit_reconstruct(const LocalPotentialFamily& F,
                                   const SeqWindow& x);

}  // namespace fk
