#include "fklab/potentials.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fk {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFdStep = 1e-5;

double v_sin(double lambda, double xi) {
  return (lambda / kTwoPi) * std::sin(kTwoPi * xi);
}
double v_sin_d1(double lambda, double xi) {
  return lambda * std::cos(kTwoPi * xi);
}
double v_sin_d2(double lambda, double xi) {
  return -lambda * kTwoPi * std::sin(kTwoPi * xi);
}

// Nearest-neighbor Frenkel-Kontorova window:
//   s0 = 1/4 (w1-w0)^2 + 1/4 (w2-w1)^2 + V(w1).
class FkNearest final : public LocalPotentialFamily {
 public:
  explicit FkNearest(double lambda) : lambda_(lambda) {}

  int range() const override { return 1; }
  std::string name() const override { return "fk_nn"; }
  std::string params_json() const override {
    char buf[64];
    std::snprintf(buf, sizeof buf, "{\"lambda\":%.17g}", lambda_);
    return buf;
  }
  bool analytic_derivatives() const override { return true; }

  double window_energy(const double* w) const override {
    const double a = w[1] - w[0], b = w[2] - w[1];
    return 0.25 * a * a + 0.25 * b * b + v_sin(lambda_, w[1]);
  }
  void window_grad(const double* w, double* g) const override {
    const double a = w[1] - w[0], b = w[2] - w[1];
    g[0] = -0.5 * a;
    g[1] = 0.5 * a - 0.5 * b + v_sin_d1(lambda_, w[1]);
    g[2] = 0.5 * b;
  }
  void window_hess(const double* w, double* h) const override {
    // rows/cols 0..2
    h[0] = 0.5;  h[1] = -0.5;                       h[2] = 0.0;
    h[3] = -0.5; h[4] = 1.0 + v_sin_d2(lambda_, w[1]); h[5] = -0.5;
    h[6] = 0.0;  h[7] = -0.5;                       h[8] = 0.5;
  }
  double derivative_bound(double band) const override {
    const double first = band + std::fabs(lambda_);
    const double second = 1.0 + kTwoPi * std::fabs(lambda_);
    return std::max(first, second);
  }
  bool has_generating_split() const override { return true; }
  double v_prime(double xi) const override { return v_sin_d1(lambda_, xi); }

 private:
  double lambda_;
};

// Next-nearest-neighbor window (range 2, center index 2):
//   s0 = sum_{k in {0,1,3,4}} 1/4 (w_k - w_2)^2 + V(w_2).
class FkNextNearest final : public LocalPotentialFamily {
 public:
  explicit FkNextNearest(double lambda) : lambda_(lambda) {}

  int range() const override { return 2; }
  std::string name() const override { return "fk_nnn"; }
  std::string params_json() const override {
    char buf[64];
    std::snprintf(buf, sizeof buf, "{\"lambda\":%.17g}", lambda_);
    return buf;
  }
  bool analytic_derivatives() const override { return true; }

  double window_energy(const double* w) const override {
    double s = v_sin(lambda_, w[2]);
    for (int k : {0, 1, 3, 4}) {
      const double d = w[k] - w[2];
      s += 0.25 * d * d;
    }
    return s;
  }
  void window_grad(const double* w, double* g) const override {
    double center = v_sin_d1(lambda_, w[2]);
    for (int k : {0, 1, 3, 4}) {
      g[k] = 0.5 * (w[k] - w[2]);
      center -= 0.5 * (w[k] - w[2]);
    }
    g[2] = center;
  }
  void window_hess(const double* w, double* h) const override {
    for (int i = 0; i < 25; ++i) h[i] = 0.0;
    for (int k : {0, 1, 3, 4}) {
      h[k * 5 + k] = 0.5;
      h[k * 5 + 2] = -0.5;
      h[2 * 5 + k] = -0.5;
    }
    h[2 * 5 + 2] = 2.0 + v_sin_d2(lambda_, w[2]);
  }
  double derivative_bound(double band) const override {
    // |w_k - w_2| <= 2*band for |k-2| = 2, so |ds0/dw_2| <= 3*band + lambda.
    const double first = 3.0 * band + std::fabs(lambda_);
    const double second = 2.0 + kTwoPi * std::fabs(lambda_);
    return std::max(first, second);
  }

 private:
  double lambda_;
};

}  // namespace

ConfigFn as_fn(const PeriodicConfig& x) {
  return [x](long i) { return x.at(i); };
}

ConfigFn as_fn(const SeqWindow& x) {
  return [x](long i) { return x.at(i); };
}

void LocalPotentialFamily::window_grad(const double* w, double* g) const {
  const int n = 2 * range() + 1;
  std::vector<double> wk(w, w + n);
  for (int t = 0; t < n; ++t) {
    const double saved = wk[t];
    wk[t] = saved + kFdStep;
    const double up = window_energy(wk.data());
    wk[t] = saved - kFdStep;
    const double dn = window_energy(wk.data());
    wk[t] = saved;
    g[t] = (up - dn) / (2.0 * kFdStep);
  }
}

void LocalPotentialFamily::window_hess(const double* w, double* h) const {
  const int n = 2 * range() + 1;
  std::vector<double> wk(w, w + n);
  std::vector<double> gp(n), gm(n);
  for (int t = 0; t < n; ++t) {
    const double saved = wk[t];
    wk[t] = saved + kFdStep;
    window_grad(wk.data(), gp.data());
    wk[t] = saved - kFdStep;
    window_grad(wk.data(), gm.data());
    wk[t] = saved;
    for (int s = 0; s < n; ++s)
      h[s * n + t] = (gp[s] - gm[s]) / (2.0 * kFdStep);
  }
}

double LocalPotentialFamily::derivative_bound(double band) const {
  // Sampled fallback for user families: scan the band on a coarse grid.
  const int n = 2 * range() + 1;
  std::vector<double> w(n), g(n), h(n * n);
  double worst = 0.0;
  for (int trial = 0; trial < 256; ++trial) {
    double xi = 0.0;
    for (int t = 0; t < n; ++t) {
      // Deterministic low-discrepancy-ish scan over the band.
      const double u = std::fmod(0.137 + 0.61803398875 * (trial * n + t), 1.0);
      xi += (t == 0) ? u : (2.0 * u - 1.0) * band;
      w[t] = xi;
    }
    window_grad(w.data(), g.data());
    window_hess(w.data(), h.data());
    for (int t = 0; t < n; ++t) worst = std::max(worst, std::fabs(g[t]));
    for (int t = 0; t < n * n; ++t) worst = std::max(worst, std::fabs(h[t]));
  }
  return 1.25 * worst;
}

FamilyPtr builtin(const std::string& name, double lambda) {
  if (name == "fk_nn") return std::make_shared<FkNearest>(lambda);
  if (name == "fk_nnn") return std::make_shared<FkNextNearest>(lambda);
  throw std::invalid_argument("unknown potential family: " + name);
}

double local_energy(const LocalPotentialFamily& F, long j, const ConfigFn& x) {
  const int r = F.range();
  std::vector<double> w(static_cast<size_t>(2 * r + 1));
  for (int t = -r; t <= r; ++t) w[static_cast<size_t>(t + r)] = x(j + t);
  return F.window_energy(w.data());
}

double grad_component(const LocalPotentialFamily& F, long i, const ConfigFn& x) {
  const int r = F.range();
  const int n = 2 * r + 1;
  std::vector<double> w(static_cast<size_t>(n)), g(static_cast<size_t>(n));
  double total = 0.0;
  for (long j = i - r; j <= i + r; ++j) {
    for (int t = -r; t <= r; ++t) w[static_cast<size_t>(t + r)] = x(j + t);
    F.window_grad(w.data(), g.data());
    total += g[static_cast<size_t>(i - (j - r))];
  }
  return total;
}

double hessian_entry(const LocalPotentialFamily& F, long i, long k,
                     const ConfigFn& x) {
  const int r = F.range();
  if (std::labs(i - k) > 2 * r) return 0.0;
  const int n = 2 * r + 1;
  std::vector<double> w(static_cast<size_t>(n)), h(static_cast<size_t>(n * n));
  double total = 0.0;
  for (long j = std::max(i, k) - r; j <= std::min(i, k) + r; ++j) {
    for (int t = -r; t <= r; ++t) w[static_cast<size_t>(t + r)] = x(j + t);
    F.window_hess(w.data(), h.data());
    const long a = i - (j - r), b = k - (j - r);
    total += h[static_cast<size_t>(a * n + b)];
  }
  return total;
}

const char* to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::HoldsByConstruction: return "holds-by-construction";
    case ConditionStatus::VerifiedOnSample: return "verified-on-sample";
    case ConditionStatus::Violated: return "violated";
    case ConditionStatus::Restricted: return "restricted";
  }
  return "?";
}

bool ConditionReport::ok() const {
  for (const ConditionFinding* f : {&a, &b, &c, &d, &e})
    if (f->status == ConditionStatus::Violated) return false;
  return true;
}

ConditionReport verify_conditions(const LocalPotentialFamily& F,
                                  const std::vector<PeriodicConfig>& samples,
                                  double diff_bound) {
  ConditionReport rep;
  const int r = F.range();
  char buf[160];
  std::snprintf(buf, sizeof buf, "|x_{i+1}-x_i| <= %.6g, %zu sample configs",
                diff_bound, samples.size());
  rep.domain = buf;

  rep.a = {ConditionStatus::HoldsByConstruction,
           "finite range r = " + std::to_string(r) + " by window construction",
           0.0};
  rep.b = {ConditionStatus::HoldsByConstruction,
           "all S_j share one window function; vertical period checked below",
           0.0};

  // Condition B vertical period: s0(w + 1) = s0(w) on the samples.
  double worst_b = 0.0;
  const int n = 2 * r + 1;
  std::vector<double> w(static_cast<size_t>(n)), w1(static_cast<size_t>(n));
  for (const auto& s : samples) {
    for (long j = 1; j <= s.p; ++j) {
      for (int t = -r; t <= r; ++t) {
        w[static_cast<size_t>(t + r)] = s.at(j + t);
        w1[static_cast<size_t>(t + r)] = s.at(j + t) + 1.0;
      }
      worst_b = std::max(worst_b, std::fabs(F.window_energy(w1.data()) -
                                            F.window_energy(w.data())));
    }
  }
  if (worst_b > 1e-10) {
    rep.b = {ConditionStatus::Violated, "vertical period s0(w+1)=s0(w) fails",
             worst_b};
  }

  // Condition C: energy grows along rays of increasing nearest-neighbor
  // difference (probed, not proven - coercivity is asymptotic).
  {
    double prev = -1e300;
    bool growing = true;
    double last = 0.0;
    for (double d : {10.0, 100.0, 1000.0}) {
      std::vector<double> ray(static_cast<size_t>(n));
      for (int t = 0; t < n; ++t) ray[static_cast<size_t>(t)] = t * d;
      last = F.window_energy(ray.data());
      if (last <= prev) growing = false;
      prev = last;
    }
    rep.c = growing
                ? ConditionFinding{ConditionStatus::VerifiedOnSample,
                                   "energy increases along |x_{j+1}-x_j| in "
                                   "{10,100,1000} rays", 0.0}
                : ConditionFinding{ConditionStatus::Violated,
                                   "energy not increasing along sampled rays",
                                   last};
  }

  // Condition D: off-diagonal entries of the summed Hessian are <= 0 on the
  // samples, strictly negative at |i-k| = 1.
  {
    double worst_off = -1e300;   // largest (most positive) off-diagonal
    double nn_max = -1e300;      // largest nearest-neighbor entry
    for (const auto& s : samples) {
      const ConfigFn fn = as_fn(s);
      for (long i = 1; i <= s.p; ++i) {
        for (long k = i - 2 * r; k <= i + 2 * r; ++k) {
          if (k == i) continue;
          const double h = hessian_entry(F, i, k, fn);
          worst_off = std::max(worst_off, h);
          if (std::labs(i - k) == 1) nn_max = std::max(nn_max, h);
        }
      }
    }
    if (samples.empty()) {
      rep.d = {ConditionStatus::VerifiedOnSample, "no samples supplied", 0.0};
    } else if (worst_off > 1e-12) {
      rep.d = {ConditionStatus::Violated,
               "positive off-diagonal mixed derivative found", worst_off};
    } else if (nn_max > -1e-12) {
      rep.d = {ConditionStatus::Violated,
               "nearest-neighbor mixed derivative not strictly negative",
               nn_max};
    } else {
      std::snprintf(buf, sizeof buf,
                    "off-diagonals <= 0; nearest-neighbor entries <= %.6g",
                    nn_max);
      rep.d = {ConditionStatus::VerifiedOnSample, buf, 0.0};
    }
  }

  // Condition E: derivative bounds hold only on the difference band; the
  // quadratic terms grow linearly in the differences, so the global form of
  // the condition fails and we report the restricted-domain constant instead.
  {
    rep.bound_C = F.derivative_bound(diff_bound);
    double measured = 0.0;
    std::vector<double> g(static_cast<size_t>(n)), h(static_cast<size_t>(n * n));
    for (const auto& s : samples) {
      for (long j = 1; j <= s.p; ++j) {
        for (int t = -r; t <= r; ++t) w[static_cast<size_t>(t + r)] = s.at(j + t);
        F.window_grad(w.data(), g.data());
        F.window_hess(w.data(), h.data());
        for (int t = 0; t < n; ++t) measured = std::max(measured, std::fabs(g[t]));
        for (int t = 0; t < n * n; ++t)
          measured = std::max(measured, std::fabs(h[t]));
      }
    }
    if (measured > rep.bound_C + 1e-9) {
      rep.e = {ConditionStatus::Violated,
               "sampled derivative exceeds the band constant", measured};
    } else {
      std::snprintf(buf, sizeof buf,
                    "restricted(|dx| <= %.6g): C = %.6g, sampled sup = %.6g "
                    "(global uniform bound fails for quadratic couplings)",
                    diff_bound, rep.bound_C, measured);
      rep.e = {ConditionStatus::Restricted, buf, 0.0};
    }
  }
  return rep;
}

TwistOrbit twist_orbit_reconstruct(const LocalPotentialFamily& F,
                                   const SeqWindow& x) {
  if (F.range() != 1 || !F.has_generating_split())
    throw std::invalid_argument(
        "twist_orbit_reconstruct: family lacks a generating-function split");
  TwistOrbit orbit;
  const long hi = x.hi();
  for (long i = x.lo; i < hi; ++i) {
    const double xi = x.at(i);
    const double y = x.at(i + 1) - xi - F.v_prime(xi);
    orbit.points.push_back({xi - std::floor(xi), y});
  }
  // Defect of T_V(x_i, y_i) = (x_{i+1}, y_{i+1}).
  for (size_t i = 0; i + 1 < orbit.points.size(); ++i) {
    const long idx = x.lo + static_cast<long>(i);
    const double xi = x.at(idx), yi = x.at(idx + 1) - xi - F.v_prime(xi);
    const double xn = xi + yi + F.v_prime(xi);
    const double yn = yi + F.v_prime(xi);
    const double xn_true = x.at(idx + 1);
    const double yn_true = x.at(idx + 2) - xn_true - F.v_prime(xn_true);
    orbit.map_defect = std::max(orbit.map_defect,
                                std::max(std::fabs(xn - xn_true),
                                         std::fabs(yn - yn_true)));
  }
  return orbit;
}

}  // namespace fk
