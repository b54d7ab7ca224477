#include "fklab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fk {

namespace {

// Floor division for possibly negative numerators.
long fdiv(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

PeriodicConfig::PeriodicConfig(long p_, long q_, std::vector<double> v)
    : p(p_), q(q_), values(std::move(v)) {
  if (p < 1) throw std::invalid_argument("PeriodicConfig: period must be >= 1");
  if (static_cast<long>(values.size()) != p)
    throw std::invalid_argument("PeriodicConfig: need exactly p values");
}

double PeriodicConfig::at(long i) const {
  const long m = fdiv(i - 1, p);
  const long t = (i - 1) - m * p;
  return values[static_cast<size_t>(t)] + static_cast<double>(m * q);
}

double SeqWindow::at(long i) const {
  if (i < lo || i > hi()) throw std::out_of_range("SeqWindow: index outside window");
  return values[static_cast<size_t>(i - lo)];
}

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Equal: return "equal";
    case Ordering::StrictlyBelow: return "strictly-below";
    case Ordering::WeaklyBelow: return "weakly-below";
    case Ordering::WeaklyAbove: return "weakly-above";
    case Ordering::StrictlyAbove: return "strictly-above";
    case Ordering::Incomparable: return "incomparable";
  }
  return "?";
}

PeriodicConfig shift(const PeriodicConfig& x, long k, long l) {
  std::vector<double> v(static_cast<size_t>(x.p));
  for (long t = 1; t <= x.p; ++t)
    v[static_cast<size_t>(t - 1)] = x.at(t - k) + static_cast<double>(l);
  return PeriodicConfig(x.p, x.q, std::move(v));
}

SeqWindow shift(const SeqWindow& x, long k, long l) {
  SeqWindow out;
  out.lo = x.lo + k;
  out.values = x.values;
  for (double& v : out.values) v += static_cast<double>(l);
  return out;
}

Ordering compare(const PeriodicConfig& x, const PeriodicConfig& y, double tol) {
  const long L = std::lcm(x.p, y.p);
  bool above = false, below = false;       // some coordinate beyond tol
  bool all_strict_above = true, all_strict_below = true;
  for (long i = 1; i <= L; ++i) {
    const double d = y.at(i) - x.at(i);
    if (d > tol) above = true; else all_strict_above = false;
    if (d < -tol) below = true; else all_strict_below = false;
  }
  if (!above && !below) return Ordering::Equal;
  if (above && below) return Ordering::Incomparable;
  if (above) return all_strict_above ? Ordering::StrictlyBelow : Ordering::WeaklyBelow;
  return all_strict_below ? Ordering::StrictlyAbove : Ordering::WeaklyAbove;
}

std::optional<ShiftClass> birkhoff_violation(const PeriodicConfig& x, double tol) {
  for (long k = 0; k < x.p; ++k) {
    const long lo = fdiv(k * x.q, x.p) - 1;
    const long hi = -fdiv(-k * x.q, x.p) + 1;  // ceil(kq/p) + 1
    for (long l = lo; l <= hi; ++l) {
      if (k == 0 && l == 0) continue;
      if (compare(shift(x, k, l), x, tol) == Ordering::Incomparable)
        return ShiftClass{k, l};
    }
  }
  return std::nullopt;
}

bool is_birkhoff(const PeriodicConfig& x, double tol) {
  return !birkhoff_violation(x, tol).has_value();
}

double rotation_bound_check(const PeriodicConfig& x) {
  const double w = x.rotation();
  const double x0 = x.at(0);
  double worst = 0.0;
  for (long i = 0; i < x.p; ++i)
    worst = std::max(worst, std::fabs(x.at(i) - x0 - w * static_cast<double>(i)));
  return worst;
}

double l1_window(const PeriodicConfig& x, const PeriodicConfig& y, long a, long b) {
  double s = 0.0;
  for (long j = a; j <= b; ++j) s += std::fabs(x.at(j) - y.at(j));
  return s;
}

double l1_window(const SeqWindow& x, const SeqWindow& y, long a, long b) {
  double s = 0.0;
  for (long j = a; j <= b; ++j) s += std::fabs(x.at(j) - y.at(j));
  return s;
}

PeriodicConfig min_config(const PeriodicConfig& x, const PeriodicConfig& y) {
  if (x.p != y.p || x.q != y.q)
    throw std::invalid_argument("min_config: configs must share (p,q)");
  std::vector<double> v(static_cast<size_t>(x.p));
  for (long t = 0; t < x.p; ++t)
    v[static_cast<size_t>(t)] = std::min(x.values[static_cast<size_t>(t)],
                                         y.values[static_cast<size_t>(t)]);
  return PeriodicConfig(x.p, x.q, std::move(v));
}

PeriodicConfig max_config(const PeriodicConfig& x, const PeriodicConfig& y) {
  if (x.p != y.p || x.q != y.q)
    throw std::invalid_argument("max_config: configs must share (p,q)");
  std::vector<double> v(static_cast<size_t>(x.p));
  for (long t = 0; t < x.p; ++t)
    v[static_cast<size_t>(t)] = std::max(x.values[static_cast<size_t>(t)],
                                         y.values[static_cast<size_t>(t)]);
  return PeriodicConfig(x.p, x.q, std::move(v));
}

PeriodicConfig normalize_gauge(const PeriodicConfig& x) {
  const long l = -static_cast<long>(std::floor(x.at(0)));
  return (l == 0) ? x : shift(x, 0, l);
}

std::optional<ShiftClass> equal_mod_shift(const PeriodicConfig& x,
                                          const PeriodicConfig& y, double tol) {
  if (x.p != y.p || x.q != y.q) return std::nullopt;
  for (long k = 0; k < x.p; ++k) {
    const long lo = fdiv(k * x.q, x.p) - 2;
    const long hi = -fdiv(-k * x.q, x.p) + 2;
    for (long l = lo; l <= hi; ++l) {
      if (compare(shift(x, k, l), y, tol) == Ordering::Equal)
        return ShiftClass{k, l};
    }
  }
  return std::nullopt;
}

std::string to_csv(const PeriodicConfig& x) {
  std::string out = "i,value\n";
  char buf[64];
  for (long t = 1; t <= x.p; ++t) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\n", t, x.at(t));
    out += buf;
  }
  return out;
}

PeriodicConfig config_from_csv(const std::string& text, long p, long q) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> v;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {  // skip the "i,value" header row
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("config CSV: malformed row '" + line + "'");
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  if (static_cast<long>(v.size()) != p)
    throw std::runtime_error("config CSV: row count does not match p");
  return PeriodicConfig(p, q, std::move(v));
}

}  // namespace fk
