#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fklab/birkhoff.hpp"
#include "fklab/lattice.hpp"
#include "fklab/minimize.hpp"
#include "fklab/potentials.hpp"

namespace fk {

// Truncated Taylor expansion (jet) of a univariate function; carries the
// value and derivatives 0..order at a point.  Used to evaluate the smooth
// step and its derivatives exactly (to machine precision) at any order.
class Jet {
 public:
  Jet(int order, double value);        // constant
  static Jet variable(double x, int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double coeff(int n) const { return c_[static_cast<size_t>(n)]; }
  // n-th derivative = n! * coeff(n).
  double derivative(int n) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator/(const Jet& o) const;
  Jet operator*(double s) const;
  friend Jet operator-(double s, const Jet& j);
  Jet exp() const;

 private:
  std::vector<double> c_;  // Taylor coefficients
};

// Smooth unit step: 0 for t <= 0, 1 for t >= 1, strictly increasing on
// (0,1), built from e^{-1/t} ratios.  All derivatives vanish at 0 and 1.
double smooth_step(double t);
std::vector<double> smooth_step_derivs(double t, int order);

// Unit bump shape B on [0,1]: B = step(4t) on (0, 1/4), exactly 1 on
// [1/4, 3/4], step(4(1-t)) on (3/4, 1), exactly 0 outside (0,1).
double unit_bump(double t);
std::vector<double> unit_bump_derivs(double t, int order);

// Certified upper bound on max_{0<=n<=k} sup |B^(n)|; cached per k.
double certified_ck(int k);

// The period-1 bump phi: support (xi_minus, xi_plus) mod 1, C^k norm <= eps,
// exactly zero on [xi_plus, xi_minus + 1], exactly the plateau value
// eps (xi_plus - xi_minus)^k / C_k on the middle half of the support.
struct BumpSpec {
  double xi_minus = 0.0;
  double xi_plus = 0.0;
  double eps = 0.0;
  int k = 2;
  double ck = 0.0;  // certified constant for this k

  double width() const { return xi_plus - xi_minus; }
  double plateau_value() const;
  double operator()(double xi) const;
  // [phi, phi', ..., phi^(order)] at xi.
  std::vector<double> derivs(double xi, int order) const;
  // Grid-sampled C^k norm over one period.
  double ck_norm_sampled(int grid) const;
};

BumpSpec make_bump(double xi_minus, double xi_plus, double eps, int k);

// S^eps_j = S_j + sum_b phi_b(x_j).
class PerturbedFamily final : public LocalPotentialFamily {
 public:
  PerturbedFamily(FamilyPtr base, std::vector<BumpSpec> bumps);

  int range() const override;
  std::string name() const override;
  std::string params_json() const override;
  bool analytic_derivatives() const override;
  double window_energy(const double* w) const override;
  void window_grad(const double* w, double* g) const override;
  void window_hess(const double* w, double* h) const override;
  double derivative_bound(double band) const override;
  bool has_generating_split() const override;
  double v_prime(double xi) const override;

  const FamilyPtr& base() const { return base_; }
  const std::vector<BumpSpec>& bumps() const { return bumps_; }

 private:
  FamilyPtr base_;
  std::vector<BumpSpec> bumps_;
};

FamilyPtr perturb(FamilyPtr F, const BumpSpec& bump);

struct DestroyPeriodicReport {
  int n_starts = 0;
  int unperturbed_classes = 0;   // continuum shows up as many tau-classes
  int perturbed_classes = 0;
  int discarded_nonminimal = 0;
  int failed = 0;
  bool all_translates = false;   // every retained class is y_min's tau-orbit
  double probe_excess = 0.0;     // one-plateau-site action excess, M = 2
  double probe_bound = 0.0;      // N eps (xi+ - xi-)^k / C_k with N = 1
};

struct DestroyPeriodicResult {
  FamilyPtr perturbed;
  MinimizeResult y_min;
  GapInterval gap;
  BumpSpec bump;
  DestroyPeriodicReport report;
};

DestroyPeriodicResult destroy_periodic(FamilyPtr F, long p, long q, double eps,
                                       int k, double tol = 1e-10,
                                       int n_starts = 50,
                                       std::uint64_t seed = 1);

// One bump per gap (largest max_gaps gaps), sizes eps * 2^-(rank+1) so the
// C^k norms sum below eps; gaps must be pairwise disjoint mod 1.
std::vector<BumpSpec> cantor_bump(const std::vector<GapInterval>& gaps,
                                  double eps, int k, int max_gaps = 64);

}  // namespace fk
