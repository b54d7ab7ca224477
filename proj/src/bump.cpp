#include "fklab/bump.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fklab/rng.hpp"

namespace fk {

namespace {

double frac(double v) {
  double f = v - std::floor(v);
  if (f >= 1.0) f = 0.0;
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// Jets
// ---------------------------------------------------------------------------

Jet::Jet(int order, double value) : c_(static_cast<size_t>(order) + 1, 0.0) {
  if (order < 0) throw std::invalid_argument("Jet: negative order");
  c_[0] = value;
}

Jet Jet::variable(double x, int order) {
  Jet j(order, x);
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

double Jet::derivative(int n) const {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f * c_[static_cast<size_t>(n)];
}

Jet Jet::operator+(const Jet& o) const {
  Jet r = *this;
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  Jet r = *this;
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  Jet r(order(), 0.0);
  const size_t n = c_.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; i + j < n; ++j) r.c_[i + j] += c_[i] * o.c_[j];
  return r;
}

Jet Jet::operator/(const Jet& o) const {
  // Reciprocal series of o, then multiply.
  const size_t n = c_.size();
  if (o.c_[0] == 0.0) throw std::domain_error("Jet: division by zero jet");
  Jet inv(order(), 1.0 / o.c_[0]);
  for (size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (size_t j = 1; j <= k; ++j) s += o.c_[j] * inv.c_[k - j];
    inv.c_[k] = -s / o.c_[0];
  }
  return *this * inv;
}

Jet Jet::operator*(double s) const {
  Jet r = *this;
  for (double& v : r.c_) v *= s;
  return r;
}

Jet operator-(double s, const Jet& j) {
  Jet r = j * -1.0;
  r.c_[0] += s;
  return r;
}

Jet Jet::exp() const {
  Jet r(order(), std::exp(c_[0]));
  const size_t n = c_.size();
  for (size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (size_t j = 1; j <= k; ++j)
      s += static_cast<double>(j) * c_[j] * r.c_[k - j];
    r.c_[k] = s / static_cast<double>(k);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Smooth step and unit bump
// ---------------------------------------------------------------------------

double smooth_step(double t) { return smooth_step_derivs(t, 0)[0]; }

std::vector<double> smooth_step_derivs(double t, int order) {
  std::vector<double> out(static_cast<size_t>(order) + 1, 0.0);
  if (t <= 1e-9) return out;  // exactly 0 with vanishing derivatives
  if (t >= 1.0 - 1e-9) {
    out[0] = 1.0;
    return out;
  }
  const Jet T = Jet::variable(t, order);
  const Jet a = (Jet(order, -1.0) / T).exp();
  const Jet b = (Jet(order, -1.0) / (1.0 - T)).exp();
  const Jet s = a / (a + b);
  for (int n = 0; n <= order; ++n) out[static_cast<size_t>(n)] = s.derivative(n);
  return out;
}

double unit_bump(double t) { return unit_bump_derivs(t, 0)[0]; }

std::vector<double> unit_bump_derivs(double t, int order) {
  std::vector<double> out(static_cast<size_t>(order) + 1, 0.0);
  if (t <= 0.0 || t >= 1.0) return out;  // exact zero branch
  if (t >= 0.25 && t <= 0.75) {          // exact plateau branch
    out[0] = 1.0;
    return out;
  }
  if (t < 0.25) {
    const std::vector<double> s = smooth_step_derivs(4.0 * t, order);
    double f = 1.0;
    for (int n = 0; n <= order; ++n, f *= 4.0)
      out[static_cast<size_t>(n)] = f * s[static_cast<size_t>(n)];
  } else {
    const std::vector<double> s = smooth_step_derivs(4.0 * (1.0 - t), order);
    double f = 1.0;
    for (int n = 0; n <= order; ++n, f *= -4.0)
      out[static_cast<size_t>(n)] = f * s[static_cast<size_t>(n)];
  }
  return out;
}

double certified_ck(int k) {
  if (k < 1) throw std::invalid_argument("certified_ck: k must be >= 1");
  static std::map<int, double> cache;
  static std::mutex mtx;
  {
    std::lock_guard<std::mutex> lock(mtx);
    if (auto it = cache.find(k); it != cache.end()) return it->second;
  }
  // The falling edge mirrors the rising one, so it suffices to scan
  // u in [0,1] for the step and scale by the chain factor 4^n.
  constexpr int kGrid = 20000;
  double m = 1.0;  // n = 0: sup |B| = 1 exactly
  for (int i = 0; i <= 2 * kGrid; ++i) {
    const double u = static_cast<double>(i) / (2.0 * kGrid);  // incl midpoints
    const std::vector<double> s = smooth_step_derivs(u, k);
    double f = 4.0;
    for (int n = 1; n <= k; ++n, f *= 4.0)
      m = std::max(m, f * std::fabs(s[static_cast<size_t>(n)]));
  }
  // Safety margin for between-sample wiggle, then round up to six
  // significant digits so the constant is stable to reproduce.
  double v = 1.25 * m;
  const double mag = std::pow(10.0, 5.0 - std::floor(std::log10(v)));
  v = std::ceil(v * mag) / mag;
  std::lock_guard<std::mutex> lock(mtx);
  cache[k] = v;
  return v;
}

// ---------------------------------------------------------------------------
// BumpSpec
// ---------------------------------------------------------------------------

double BumpSpec::plateau_value() const {
  return eps * std::pow(width(), k) / ck;
}

double BumpSpec::operator()(double xi) const {
  const double t = frac(xi - xi_minus);
  if (t >= width()) return 0.0;  // exact zero off the support
  return plateau_value() * unit_bump(t / width());
}

std::vector<double> BumpSpec::derivs(double xi, int order) const {
  std::vector<double> out(static_cast<size_t>(order) + 1, 0.0);
  const double t = frac(xi - xi_minus);
  const double w = width();
  if (t >= w) return out;
  const std::vector<double> b = unit_bump_derivs(t / w, order);
  const double amp = plateau_value();
  double f = amp;
  for (int n = 0; n <= order; ++n, f /= w)
    out[static_cast<size_t>(n)] = f * b[static_cast<size_t>(n)];
  return out;
}

double BumpSpec::ck_norm_sampled(int grid) const {
  double m = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double xi = static_cast<double>(i) / grid;
    const std::vector<double> d = derivs(xi, k);
    for (double v : d) m = std::max(m, std::fabs(v));
  }
  return m;
}

BumpSpec make_bump(double xi_minus, double xi_plus, double eps, int k) {
  if (!(xi_plus > xi_minus) || xi_plus - xi_minus > 1.0)
    throw std::invalid_argument("make_bump: need 0 < xi_plus - xi_minus <= 1");
  if (eps <= 0) throw std::invalid_argument("make_bump: eps must be > 0");
  BumpSpec b;
  b.xi_minus = xi_minus;
  b.xi_plus = xi_plus;
  b.eps = eps;
  b.k = k;
  b.ck = certified_ck(k);
  return b;
}

// ---------------------------------------------------------------------------
// PerturbedFamily
// ---------------------------------------------------------------------------

PerturbedFamily::PerturbedFamily(FamilyPtr base, std::vector<BumpSpec> bumps)
    : base_(std::move(base)), bumps_(std::move(bumps)) {
  if (!base_) throw std::invalid_argument("PerturbedFamily: null base");
}

int PerturbedFamily::range() const { return base_->range(); }

std::string PerturbedFamily::name() const { return base_->name() + "+bump"; }

std::string PerturbedFamily::params_json() const {
  std::ostringstream os;
  os << "{\"base\":" << base_->params_json() << ",\"bumps\":[";
  for (size_t i = 0; i < bumps_.size(); ++i) {
    const auto& b = bumps_[i];
    if (i) os << ",";
    os << "{\"xi_minus\":" << b.xi_minus << ",\"xi_plus\":" << b.xi_plus
       << ",\"eps\":" << b.eps << ",\"k\":" << b.k << ",\"ck\":" << b.ck << "}";
  }
  os << "]}";
  return os.str();
}

bool PerturbedFamily::analytic_derivatives() const {
  return base_->analytic_derivatives();
}

double PerturbedFamily::window_energy(const double* w) const {
  double s = base_->window_energy(w);
  const double xi = w[range()];
  for (const auto& b : bumps_) s += b(xi);
  return s;
}

void PerturbedFamily::window_grad(const double* w, double* g) const {
  base_->window_grad(w, g);
  const int c = range();
  for (const auto& b : bumps_) g[c] += b.derivs(w[c], 1)[1];
}

void PerturbedFamily::window_hess(const double* w, double* h) const {
  base_->window_hess(w, h);
  const int c = range();
  const int n = 2 * c + 1;
  for (const auto& b : bumps_) h[c * n + c] += b.derivs(w[c], 2)[2];
}

double PerturbedFamily::derivative_bound(double band) const {
  double s = base_->derivative_bound(band);
  // Each bump has C^k norm at most eps with k >= 2, so first and second
  // derivatives are bounded by eps.
  for (const auto& b : bumps_) s += b.eps;
  return s;
}

bool PerturbedFamily::has_generating_split() const {
  return base_->has_generating_split();
}

double PerturbedFamily::v_prime(double xi) const {
  double s = base_->v_prime(xi);
  for (const auto& b : bumps_) s += b.derivs(xi, 1)[1];
  return s;
}

FamilyPtr perturb(FamilyPtr F, const BumpSpec& bump) {
  return std::make_shared<PerturbedFamily>(std::move(F),
                                           std::vector<BumpSpec>{bump});
}

// ---------------------------------------------------------------------------
// Periodic destruction
// ---------------------------------------------------------------------------

DestroyPeriodicResult destroy_periodic(FamilyPtr F, long p, long q, double eps,
                                       int k, double tol, int n_starts,
                                       std::uint64_t seed) {
  if (!F) throw std::invalid_argument("destroy_periodic: null family");
  DestroyPeriodicResult out;
  out.report.n_starts = n_starts;

  const MinimizerSet ms0 = minimizer_set(*F, p, q, n_starts, seed, tol);
  if (ms0.minimizers.empty())
    throw std::runtime_error("destroy_periodic: no unperturbed minimizer found");
  out.report.unperturbed_classes = static_cast<int>(ms0.minimizers.size());
  const MinimizeResult* best0 = &ms0.minimizers.front();
  for (const auto& m : ms0.minimizers)
    if (m.action < best0->action) best0 = &m;

  const ExtendedOrbit orbit = extended_orbit(best0->config);
  const std::vector<GapInterval> gaps = find_gaps(orbit);
  if (gaps.empty())
    throw std::runtime_error("destroy_periodic: orbit has no gaps");
  out.gap = gaps.front();

  // Bump supported on the whole largest gap: the orbit spacing equals the
  // gap length for the flat continuum, so only the configuration through
  // the gap endpoints avoids every translate of the support.
  out.bump = make_bump(out.gap.lo, out.gap.hi, eps, k);
  out.perturbed = perturb(F, out.bump);

  const MinimizerSet ms1 = minimizer_set(*out.perturbed, p, q, n_starts,
                                         seed, tol);
  if (ms1.minimizers.empty())
    throw std::runtime_error("destroy_periodic: no perturbed minimizer found");
  out.report.perturbed_classes = static_cast<int>(ms1.minimizers.size());
  out.report.discarded_nonminimal = ms1.discarded_nonminimal;
  out.report.failed = ms1.failed;
  out.report.all_translates = out.report.perturbed_classes == 1;
  const MinimizeResult* best1 = &ms1.minimizers.front();
  for (const auto& m : ms1.minimizers)
    if (m.action < best1->action) best1 = &m;
  out.y_min = *best1;

  // Constrained probe: pin one site at the plateau center and relax the
  // rest; its action must exceed the free minimum by the plateau value.
  const double center = frac(0.5 * (out.bump.xi_minus + out.bump.xi_plus));
  double best_pinned = 1e300;
  for (int s = 0; s < 8; ++s) {
    PeriodicConfig init = jittered_profile(
        p, q, center, s == 0 ? 0.0 : 0.2, seed ^ 0x9e3779b9ULL,
        static_cast<std::uint64_t>(s));
    init.values[0] = center;  // pinned site, exact plateau center
    const MinimizeResult pm =
        minimize_pinned(*out.perturbed, p, q, init, 0, tol);
    if (pm.converged) best_pinned = std::min(best_pinned, pm.action);
  }
  if (best_pinned >= 1e300)
    throw std::runtime_error("destroy_periodic: pinned probe did not converge");
  out.report.probe_excess = best_pinned - out.y_min.action;
  out.report.probe_bound = out.bump.plateau_value();
  return out;
}

std::vector<BumpSpec> cantor_bump(const std::vector<GapInterval>& gaps,
                                  double eps, int k, int max_gaps) {
  std::vector<BumpSpec> out;
  const size_t n = std::min<size_t>(gaps.size(), static_cast<size_t>(max_gaps));
  for (size_t i = 0; i < n; ++i) {
    const double L = gaps[i].length();
    if (L <= 0) continue;
    const double e = eps * std::pow(0.5, static_cast<double>(i + 1));
    out.push_back(make_bump(gaps[i].lo + 0.25 * L, gaps[i].hi - 0.25 * L, e, k));
  }
  return out;
}

}  // namespace fk
