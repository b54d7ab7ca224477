#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fk {

using Int = mpz_class;
using Rat = mpq_class;

// ---------------------------------------------------------------------------
// Exact scaled-power sums.
//
// Rotation numbers of Liouville type force denominators like base^(14!),
// whose decimal expansions are physically unrepresentable.  Every exact
// quantity in this module is therefore a finite sum  sum_i c_i * B^(e_i)
// with exact rational coefficients and (possibly huge) integer exponents.
// Sign decisions are exact: clusters of nearby exponents are materialized,
// widely separated clusters are resolved by a dominance bound.  No floating
// point enters any decision.
// ---------------------------------------------------------------------------

struct PowTerm {
  Rat coeff;
  Int exp;
};

class PowSum {
 public:
  PowSum() : base_(10) {}                     // zero
  PowSum(const Rat& v, long base = 10);       // plain rational
  PowSum(long v, long base = 10);
  static PowSum power(long base, const Int& exp, const Rat& coeff = Rat(1));

  long base() const { return base_; }
  bool is_zero() const { return terms_.empty(); }
  const std::vector<PowTerm>& terms() const { return terms_; }

  PowSum operator+(const PowSum& o) const;
  PowSum operator-(const PowSum& o) const;
  PowSum operator*(const PowSum& o) const;
  PowSum operator-() const;
  PowSum pow_ui(unsigned long n) const;

  // Division by a single-term sum (exact); throws for multi-term divisors.
  PowSum div_single(const PowSum& o) const;

  // Exact sign (-1, 0, +1); throws std::runtime_error in the (unreachable
  // for this domain) case where dominance cannot be decided.
  int sign() const;

  bool operator<(const PowSum& o) const { return (*this - o).sign() < 0; }
  bool operator<=(const PowSum& o) const { return (*this - o).sign() <= 0; }
  bool operator>(const PowSum& o) const { return (*this - o).sign() > 0; }
  bool operator>=(const PowSum& o) const { return (*this - o).sign() >= 0; }
  bool eq(const PowSum& o) const { return (*this - o).sign() == 0; }

  // True when the value is an integer with at most max_digits decimal
  // digits (all exponents >= 0, integral coefficients, modest magnitude).
  bool materializable(long max_digits = 10000) const;
  Int to_int() const;   // throws when not materializable as an integer
  Rat to_rat(long max_digits = 10000) const;  // exact rational form

  double log10_approx() const;  // of |value|; -inf for zero
  double to_double() const;     // best-effort; +-inf/0 far out of range
  std::string to_display() const;  // human-readable (decimal or c*B^e form)

 private:
  void normalize();
  long base_;
  std::vector<PowTerm> terms_;  // sorted by exponent descending, no zeros
};

// ---------------------------------------------------------------------------
// Rotation numbers with certified exact bounds.
// ---------------------------------------------------------------------------

class RotationSpec {
 public:
  enum class Kind { Rational, Quadratic, Liouville };

  static RotationSpec rational(const Rat& v);
  // a + b*sqrt(d), d >= 2 and not a perfect square.
  static RotationSpec quadratic(const Rat& a, const Rat& b, const Int& d);
  static RotationSpec golden_mean();          // (sqrt(5) - 1)/2
  static RotationSpec liouville(long base);   // sum_j base^{-j!}

  // "rational:3/5" | "golden" | "quadratic:a,b,d" | "liouville:10"
  static RotationSpec parse(const std::string& text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::Rational; }
  const Rat& rational_value() const;
  long liouville_base() const { return base_; }

  // Certified bounds lo <= omega <= hi, strict on both sides for irrational
  // kinds, tightening as level grows.  Rational specs return lo = hi.
  std::pair<Rat, Rat> bounds_rat(unsigned level) const;
  std::pair<PowSum, PowSum> bounds_pow(unsigned level) const;

  // Exact truncation sum_{j<=n} base^{-j!} for Liouville specs.
  Rat liouville_truncation_rat(unsigned n) const;
  PowSum liouville_truncation_pow(unsigned n) const;

  double to_double() const;

 private:
  RotationSpec() = default;
  Kind kind_ = Kind::Rational;
  Rat rat_;          // Rational
  Rat qa_, qb_;      // Quadratic: qa + qb*sqrt(qd)
  Int qd_;
  long base_ = 10;   // Liouville
};

// ---------------------------------------------------------------------------
// Elementary operations.
// ---------------------------------------------------------------------------

// Continued-fraction convergents (p_n, q_n) with q_n/p_n -> omega; exact.
std::vector<std::pair<Int, Int>> convergents(const RotationSpec& omega, int n);

// (s, t) with p t - q s = 1, canonicalized to 0 <= s < p.
std::pair<Int, Int> extended_euclid(const Int& p, const Int& q);

// The unique integer p' >= 2 with 1/(p'p) < omega - q/p < 1/((p'-1)p).
Int p_prime(const RotationSpec& omega, const Int& p, const Int& q);
// Symbolic variant for huge candidates.
PowSum p_prime_pow(const RotationSpec& omega, const PowSum& p, const PowSum& q);

// m = gcd, (p~, q~) the reduced pair: p'p = m p~, p'q+1 = m q~.
struct TildeReduction {
  PowSum m, p_tilde, q_tilde;
};
TildeReduction reduce_tilde(const PowSum& pp, const PowSum& pq1);

// a = ceil(n |q - omega p|), exact.
Int budget_a(const Int& p, const Int& q, const RotationSpec& omega, const Int& n);

// ---------------------------------------------------------------------------
// Parameter selection.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  std::string lhs, rhs;  // display forms
  bool pass = false;
  bool exact = true;              // exact-arithmetic check
  std::string scale_mode = "exact";  // "exact" or "relaxed"
};

// tau is carried as an exact rational u/v on a fixed grid (v = 16).
inline constexpr unsigned long kTauGrid = 16;

struct ParamSelection {
  Rat gamma, sigma, tau;
  long k = 2, r = 1;
  Rat eps, C, C_k, C_kr;    // C_kr = 12 C C_k (2r+1)^2
  long base = 10;           // power base of the symbolic integers below
  PowSum p, q, p_prime, m, p_tilde, q_tilde;
  PowSum a;                 // drift budget (exact or certified upper bound)
  bool a_is_upper_bound = false;
  PowSum n_lo, n_hi;        // real-valued N window bounds
  Rat relax_factor = Rat(1);  // 1 = exact-constants mode
  bool tau_ge_sigma = false;

  // A1-A3 re-verification in exact arithmetic.
  std::vector<CheckResult> verify(const RotationSpec& omega) const;
};

enum class SelectionFailure {
  None,
  SigmaTooSmall,     // sigma <= 1 + 2k(k+1)
  RationalOmega,
  BoundTooSmall,     // approximants exhausted before the quality appeared
  NotLiouvilleEnough  // best achievable tau stayed below sigma
};

struct SelectionOutcome {
  std::optional<ParamSelection> selection;
  SelectionFailure failure = SelectionFailure::None;
  double best_tau_seen = 0.0;
  std::string note;
};

// search_bound: max denominator for materialized candidates and max
// truncation index for symbolic Liouville candidates.
SelectionOutcome select_parameters(const RotationSpec& omega, const Rat& gamma,
                                   const Rat& sigma, long k, long r,
                                   const Rat& eps, const Rat& C, const Rat& C_k,
                                   long search_bound = 1000000,
                                   const Rat& relax_factor = Rat(1));

// The quantitative inequality chain evaluated exactly on a selection:
// bothestimates1, choiceN2, qp-QP (both window endpoints), orderoneaction,
// A2alternative and the Case-2 near-periodicity budget.
std::vector<CheckResult> certificate_checks(const ParamSelection& sel);

// Helpers shared with serialization.
Int factorial(unsigned n);
std::string rat_to_string(const Rat& v);
Rat rat_from_string(const std::string& s);
Rat rat_from_double_exact(double v);  // doubles are dyadic rationals

}  // namespace fk
