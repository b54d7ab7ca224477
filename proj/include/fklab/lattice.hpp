#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fk {

// Global tolerance separating "equal" from "strictly ordered" in floating
// point.  Numerically computed minimizers never tie exactly, so a single
// documented cutoff is used everywhere an Ordering is produced.
inline constexpr double kOrderTol = 1e-9;

// A sequence with x_{i+p} = x_i + q.  Values are stored on slots 1..p; every
// other index follows from the extension rule, so the rotation number is
// exactly q/p.
struct PeriodicConfig {
  long p = 1;
  long q = 0;
  std::vector<double> values;  // values[t] = x_{t+1}

  PeriodicConfig() = default;
  PeriodicConfig(long p_, long q_, std::vector<double> v);

  // Total extension to all integer indices.
  double at(long i) const;
  double x0() const { return at(0); }
  double rotation() const { return static_cast<double>(q) / p; }
};

// A finite window of a (possibly non-periodic) sequence; value at index
// lo + t is values[t].
struct SeqWindow {
  long lo = 0;
  std::vector<double> values;

  long hi() const { return lo + static_cast<long>(values.size()) - 1; }
  double at(long i) const;  // throws std::out_of_range outside [lo, hi]
};

enum class Ordering {
  Equal,
  StrictlyBelow,  // x << y: every coordinate strictly below
  WeaklyBelow,    // x <  y: below everywhere, strict somewhere
  WeaklyAbove,
  StrictlyAbove,
  Incomparable,
};

const char* to_string(Ordering o);

// The shift action (shift(x,k,l))_i = x_{i-k} + l.
PeriodicConfig shift(const PeriodicConfig& x, long k, long l);
SeqWindow shift(const SeqWindow& x, long k, long l);

// Classifies x against y pointwise.  Configs with different (p,q) are
// compared on one full period of the common (lcm) refinement of both
// extensions.
Ordering compare(const PeriodicConfig& x, const PeriodicConfig& y,
                 double tol = kOrderTol);

struct ShiftClass {
  long k = 0;
  long l = 0;
};

// Checks every shift class k in [0,p), l in [floor(kq/p)-1, ceil(kq/p)+1];
// all other classes are automatically ordered for configs in this band.
// Returns a violating class if the translate family is not totally ordered.
std::optional<ShiftClass> birkhoff_violation(const PeriodicConfig& x,
                                             double tol = kOrderTol);
bool is_birkhoff(const PeriodicConfig& x, double tol = kOrderTol);

// max over i in [0,p) of |x_i - x_0 - (q/p) i|; at most 1 for Birkhoff x.
double rotation_bound_check(const PeriodicConfig& x);

// sum_{j=a}^{b} |x_j - y_j|.
double l1_window(const PeriodicConfig& x, const PeriodicConfig& y, long a,
                 long b);
double l1_window(const SeqWindow& x, const SeqWindow& y, long a, long b);

// Pointwise min / max; stay in X_{p,q} when the inputs share (p,q).
PeriodicConfig min_config(const PeriodicConfig& x, const PeriodicConfig& y);
PeriodicConfig max_config(const PeriodicConfig& x, const PeriodicConfig& y);

// Vertical gauge: translate by an integer so that x_0 lands in [0,1).
PeriodicConfig normalize_gauge(const PeriodicConfig& x);

// True if some tau_{k,l} in the Birkhoff band maps x onto y within tol;
// the witness class is reported.
std::optional<ShiftClass> equal_mod_shift(const PeriodicConfig& x,
                                          const PeriodicConfig& y, double tol);

// CSV with header "i,value", one row per slot 1..p.
std::string to_csv(const PeriodicConfig& x);
PeriodicConfig config_from_csv(const std::string& text, long p, long q);

}  // namespace fk
