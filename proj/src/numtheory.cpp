#include "fklab/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fk {

namespace {

// Cluster materialization thresholds for the exact sign test: exponent gaps
// up to kGap are bridged by materializing base^gap; clusters span at most
// kSpan exponent units.  Every decision below these limits is fully exact;
// beyond them a dominance bound (also exact) applies.
constexpr long kGap = 1L << 16;
constexpr long kSpan = 1L << 21;

Int pow_int(long base, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
  return r;
}

double log2_mpz(const Int& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double d = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(std::fabs(d)) + static_cast<double>(exp);
}

double log2_rat_abs(const Rat& v) {
  return log2_mpz(v.get_num()) - log2_mpz(v.get_den());
}

Rat rat_abs(const Rat& v) { return v < 0 ? Rat(-v) : v; }

Int floor_rat(const Rat& v) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
  return q;
}

Int ceil_rat(const Rat& v) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
  return q;
}

}  // namespace

Int factorial(unsigned n) {
  Int r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

std::string rat_to_string(const Rat& v) {
  std::ostringstream os;
  os << v.get_num();
  if (v.get_den() != 1) os << "/" << v.get_den();
  return os.str();
}

Rat rat_from_string(const std::string& s) {
  Rat v(s);
  v.canonicalize();
  return v;
}

Rat rat_from_double_exact(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite double");
  Rat r(v);  // exact: doubles are dyadic rationals
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// PowSum
// ---------------------------------------------------------------------------

PowSum::PowSum(const Rat& v, long base) : base_(base) {
  if (v != 0) terms_.push_back({v, Int(0)});
}

PowSum::PowSum(long v, long base) : PowSum(Rat(v), base) {}

PowSum PowSum::power(long base, const Int& exp, const Rat& coeff) {
  PowSum s;
  s.base_ = base;
  if (coeff != 0) s.terms_.push_back({coeff, exp});
  return s;
}

void PowSum::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const PowTerm& a, const PowTerm& b) { return a.exp > b.exp; });
  std::vector<PowTerm> out;
  for (auto& t : terms_) {
    if (!out.empty() && out.back().exp == t.exp) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  terms_.clear();
  for (auto& t : out)
    if (t.coeff != 0) terms_.push_back(std::move(t));
}

namespace {
long unify_base(const PowSum& a, const PowSum& b) {
  auto pure = [](const PowSum& s) {
    for (const auto& t : s.terms())
      if (t.exp != 0) return false;
    return true;
  };
  if (a.base() == b.base()) return a.base();
  if (pure(a)) return b.base();
  if (pure(b)) return a.base();
  throw std::logic_error("PowSum: mixed bases");
}
}  // namespace

PowSum PowSum::operator+(const PowSum& o) const {
  PowSum r;
  r.base_ = unify_base(*this, o);
  r.terms_ = terms_;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.normalize();
  return r;
}

PowSum PowSum::operator-() const {
  PowSum r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

PowSum PowSum::operator-(const PowSum& o) const { return *this + (-o); }

PowSum PowSum::operator*(const PowSum& o) const {
  PowSum r;
  r.base_ = unify_base(*this, o);
  for (const auto& ta : terms_)
    for (const auto& tb : o.terms_)
      r.terms_.push_back({ta.coeff * tb.coeff, Int(ta.exp + tb.exp)});
  r.normalize();
  return r;
}

PowSum PowSum::pow_ui(unsigned long n) const {
  PowSum acc(Rat(1), base_);
  PowSum sq = *this;
  while (n > 0) {
    if (n & 1) acc = acc * sq;
    sq = (n >>= 1) ? sq * sq : sq;
  }
  return acc;
}

PowSum PowSum::div_single(const PowSum& o) const {
  if (o.terms_.size() != 1)
    throw std::invalid_argument("PowSum: division requires single-term divisor");
  PowSum r;
  r.base_ = unify_base(*this, o);
  const auto& d = o.terms_.front();
  for (const auto& t : terms_)
    r.terms_.push_back({t.coeff / d.coeff, Int(t.exp - d.exp)});
  r.normalize();
  return r;
}

int PowSum::sign() const {
  size_t idx = 0;
  while (idx < terms_.size()) {
    // Greedy cluster of nearby exponents.
    size_t j = idx + 1;
    while (j < terms_.size() &&
           terms_[j - 1].exp - terms_[j].exp <= kGap &&
           terms_[idx].exp - terms_[j].exp <= kSpan)
      ++j;
    const Int& emin = terms_[j - 1].exp;
    Rat s = 0;
    for (size_t t = idx; t < j; ++t) {
      const unsigned long sh = Int(terms_[t].exp - emin).get_ui();
      s += terms_[t].coeff * Rat(pow_int(base_, sh));
    }
    if (s == 0) {
      idx = j;
      continue;
    }
    if (j == terms_.size()) return sgn(s);
    // Dominance over the remaining terms: |s| B^emin > (sum |c_i|) B^{e_j}.
    const Int gap = emin - terms_[j].exp;
    Rat rest = 0;
    for (size_t t = j; t < terms_.size(); ++t) rest += rat_abs(terms_[t].coeff);
    const double lhs_bits = log2_rat_abs(s) - 2.0 +
                            mpz_get_d(gap.get_mpz_t()) * std::log2(double(base_));
    const double rhs_bits = log2_rat_abs(rest) + 2.0;
    if (lhs_bits > rhs_bits) return sgn(s);
    if (gap <= kSpan) {
      const Rat lhs = rat_abs(s) * Rat(pow_int(base_, gap.get_ui()));
      if (lhs > rest) return sgn(s);
      // The tail could flip the cluster: fold one more term in and retry by
      // materializing the combined prefix (gap is small, so this is exact).
      throw std::runtime_error("PowSum::sign: dominance failed on small gap");
    }
    throw std::runtime_error("PowSum::sign: undecidable dominance");
  }
  return 0;
}

bool PowSum::materializable(long max_digits) const {
  if (terms_.empty()) return true;
  const Int& emax = terms_.front().exp;
  const Int& emin = terms_.back().exp;
  const Int span = emax - emin;
  if (span > max_digits) return false;
  const double scale =
      std::fabs(mpz_get_d(emax.get_mpz_t())) * std::log10(double(base_));
  if (scale > 4.0 * static_cast<double>(max_digits)) return false;
  return true;
}

Rat PowSum::to_rat(long max_digits) const {
  if (!materializable(max_digits))
    throw std::runtime_error("PowSum: not materializable as a rational");
  if (terms_.empty()) return Rat(0);
  Rat s = 0;
  for (const auto& t : terms_) {
    Rat f;
    if (t.exp >= 0) {
      f = Rat(pow_int(base_, Int(t.exp).get_ui()));
    } else {
      f = Rat(1) / Rat(pow_int(base_, Int(-t.exp).get_ui()));
    }
    s += t.coeff * f;
  }
  return s;
}

Int PowSum::to_int() const {
  const Rat r = to_rat();
  if (r.get_den() != 1) throw std::runtime_error("PowSum: value is not an integer");
  return r.get_num();
}

double PowSum::log10_approx() const {
  if (terms_.empty()) return -std::numeric_limits<double>::infinity();
  const auto& t = terms_.front();
  return log2_rat_abs(t.coeff) * std::log10(2.0) +
         mpz_get_d(t.exp.get_mpz_t()) * std::log10(double(base_));
}

double PowSum::to_double() const {
  if (terms_.empty()) return 0.0;
  const double l = log10_approx();
  if (l > 300.0) return sgn(terms_.front().coeff) > 0
                            ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
  if (l < -300.0) return 0.0;
  double s = 0.0;
  for (const auto& t : terms_)
    s += t.coeff.get_d() *
         std::pow(double(base_), mpz_get_d(t.exp.get_mpz_t()));
  return s;
}

std::string PowSum::to_display() const {
  if (terms_.empty()) return "0";
  if (materializable(64)) {
    const Rat r = to_rat(64);
    return rat_to_string(r);
  }
  std::ostringstream os;
  const auto& t = terms_.front();
  os << t.coeff.get_d() << "*" << base_ << "^" << t.exp;
  if (terms_.size() > 1) os << "+[" << (terms_.size() - 1) << " smaller terms]";
  return os.str();
}

// ---------------------------------------------------------------------------
// RotationSpec
// ---------------------------------------------------------------------------

RotationSpec RotationSpec::rational(const Rat& v) {
  RotationSpec s;
  s.kind_ = Kind::Rational;
  s.rat_ = v;
  return s;
}

RotationSpec RotationSpec::quadratic(const Rat& a, const Rat& b, const Int& d) {
  if (d < 2) throw std::invalid_argument("quadratic spec: need d >= 2");
  Int root;
  mpz_sqrt(root.get_mpz_t(), d.get_mpz_t());
  if (root * root == d)
    throw std::invalid_argument("quadratic spec: d is a perfect square");
  if (b == 0) throw std::invalid_argument("quadratic spec: b must be nonzero");
  RotationSpec s;
  s.kind_ = Kind::Quadratic;
  s.qa_ = a;
  s.qb_ = b;
  s.qd_ = d;
  return s;
}

RotationSpec RotationSpec::golden_mean() {
  return quadratic(Rat(-1, 2), Rat(1, 2), Int(5));
}

RotationSpec RotationSpec::liouville(long base) {
  if (base < 2) throw std::invalid_argument("liouville spec: base must be >= 2");
  RotationSpec s;
  s.kind_ = Kind::Liouville;
  s.base_ = base;
  return s;
}

RotationSpec RotationSpec::parse(const std::string& text) {
  if (text == "golden") return golden_mean();
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (head == "liouville") return liouville(std::stol(tail));
  if (head == "rational") return rational(rat_from_string(tail));
  if (head == "quadratic") {
    const auto c1 = tail.find(',');
    const auto c2 = tail.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("quadratic spec: expected a,b,d");
    return quadratic(rat_from_string(tail.substr(0, c1)),
                     rat_from_string(tail.substr(c1 + 1, c2 - c1 - 1)),
                     Int(tail.substr(c2 + 1)));
  }
  throw std::invalid_argument("unknown rotation spec: " + text);
}

std::string RotationSpec::to_string() const {
  switch (kind_) {
    case Kind::Rational: return "rational:" + rat_to_string(rat_);
    case Kind::Quadratic: {
      std::ostringstream os;
      os << "quadratic:" << rat_to_string(qa_) << "," << rat_to_string(qb_)
         << "," << qd_;
      return os.str();
    }
    case Kind::Liouville: return "liouville:" + std::to_string(base_);
  }
  return "?";
}

const Rat& RotationSpec::rational_value() const {
  if (kind_ != Kind::Rational)
    throw std::logic_error("rotation spec is not rational");
  return rat_;
}

Rat RotationSpec::liouville_truncation_rat(unsigned n) const {
  Rat s = 0;
  for (unsigned j = 1; j <= n; ++j) {
    const Int f = factorial(j);
    s += Rat(1) / Rat(pow_int(base_, f.get_ui()));
  }
  return s;
}

PowSum RotationSpec::liouville_truncation_pow(unsigned n) const {
  PowSum s;
  for (unsigned j = 1; j <= n; ++j)
    s = s + PowSum::power(base_, -factorial(j));
  return s;
}

std::pair<Rat, Rat> RotationSpec::bounds_rat(unsigned level) const {
  switch (kind_) {
    case Kind::Rational:
      return {rat_, rat_};
    case Kind::Quadratic: {
      const unsigned prec = 32 + 32 * level;
      Int scaled = qd_;
      mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * prec);
      Int root;
      mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
      Int two_p = 1;
      mpz_mul_2exp(two_p.get_mpz_t(), two_p.get_mpz_t(), prec);
      const Rat slo = Rat(root) / Rat(two_p);
      const Rat shi = Rat(root + 1) / Rat(two_p);
      Rat lo = qa_ + qb_ * (qb_ > 0 ? slo : shi);
      Rat hi = qa_ + qb_ * (qb_ > 0 ? shi : slo);
      return {lo, hi};
    }
    case Kind::Liouville: {
      const unsigned n = std::min(2u + level, 7u);
      const Rat lo = liouville_truncation_rat(n);
      const Int f = factorial(n + 1);
      const Rat tail = Rat(2) / Rat(pow_int(base_, f.get_ui()));
      return {lo, lo + tail};
    }
  }
  throw std::logic_error("bad rotation kind");
}

std::pair<PowSum, PowSum> RotationSpec::bounds_pow(unsigned level) const {
  if (kind_ == Kind::Liouville) {
    const unsigned n = std::min(2u + level, 18u);
    const PowSum lo = liouville_truncation_pow(n);
    const PowSum hi = lo + PowSum::power(base_, -factorial(n + 1), Rat(2));
    return {lo, hi};
  }
  const auto [lo, hi] = bounds_rat(level);
  return {PowSum(lo), PowSum(hi)};
}

double RotationSpec::to_double() const {
  const auto [lo, hi] = bounds_rat(4);
  return (lo.get_d() + hi.get_d()) / 2.0;
}

// ---------------------------------------------------------------------------
// Continued fractions
// ---------------------------------------------------------------------------

std::vector<std::pair<Int, Int>> convergents(const RotationSpec& omega, int n) {
  std::vector<std::pair<Int, Int>> out;
  std::vector<Int> digits;

  if (omega.is_rational()) {
    Int a = omega.rational_value().get_num();
    Int b = omega.rational_value().get_den();
    while (b != 0 && static_cast<int>(digits.size()) < n) {
      Int t;
      mpz_fdiv_q(t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      digits.push_back(t);
      const Int r = a - t * b;
      a = b;
      b = r;
    }
  } else {
    // Stream the continued fraction through a Moebius transform applied to
    // certified interval bounds, refining until floors agree.
    Int A = 1, B = 0, C = 0, D = 1;  // z = (A w + B) / (C w + D)
    unsigned level = 0;
    const unsigned max_level = 64;
    while (static_cast<int>(digits.size()) < n) {
      bool emitted = false;
      for (; level < max_level; ++level) {
        const auto [lo, hi] = omega.bounds_rat(level);
        const Rat den_lo = Rat(C) * lo + Rat(D);
        const Rat den_hi = Rat(C) * hi + Rat(D);
        if (sgn(den_lo) == 0 || sgn(den_hi) == 0 ||
            sgn(den_lo) != sgn(den_hi))
          continue;
        const Rat z1 = (Rat(A) * lo + Rat(B)) / den_lo;
        const Rat z2 = (Rat(A) * hi + Rat(B)) / den_hi;
        const Int f1 = floor_rat(z1), f2 = floor_rat(z2);
        if (f1 != f2) continue;
        digits.push_back(f1);
        const Int nA = C, nB = D, nC = A - f1 * C, nD = B - f1 * D;
        A = nA; B = nB; C = nC; D = nD;
        emitted = true;
        break;
      }
      if (!emitted)
        break;  // certified precision exhausted; return what we have
    }
  }

  Int h1 = 1, h2 = 0, k1 = 0, k2 = 1;  // numerator/denominator recurrences
  for (const Int& t : digits) {
    const Int h = t * h1 + h2;
    const Int k = t * k1 + k2;
    h2 = h1; h1 = h;
    k2 = k1; k1 = k;
    out.emplace_back(k, h);  // (p, q)
  }
  return out;
}

std::pair<Int, Int> extended_euclid(const Int& p, const Int& q) {
  if (p < 1) throw std::invalid_argument("extended_euclid: p must be >= 1");
  Int g, u, v;
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t(),
             q.get_mpz_t());
  if (g != 1) throw std::invalid_argument("extended_euclid: gcd(p,q) != 1");
  // u p + v q = 1  =>  p t - q s = 1 with t = u, s = -v.
  Int t = u, s = -v;
  Int k;
  mpz_fdiv_q(k.get_mpz_t(), s.get_mpz_t(), p.get_mpz_t());
  s -= k * p;
  t -= k * q;
  if (p * t - q * s != 1) throw std::logic_error("extended_euclid: identity lost");
  return {s, t};
}

// ---------------------------------------------------------------------------
// p', budget a
// ---------------------------------------------------------------------------

Int p_prime(const RotationSpec& omega, const Int& p, const Int& q) {
  if (omega.is_rational())
    throw std::invalid_argument("p_prime: omega must be irrational");
  if (p < 1) throw std::invalid_argument("p_prime: p must be >= 1");
  const Rat qp = Rat(q) / Rat(p);
  for (unsigned level = 0; level < 48; ++level) {
    const auto [lo, hi] = omega.bounds_rat(level);
    if (hi - qp <= 0)
      throw std::invalid_argument("p_prime: omega <= q/p");
    if (lo - qp >= Rat(1) / Rat(p))
      throw std::invalid_argument("p_prime: omega >= (q+1)/p");
    const Rat d_lo = lo - qp, d_hi = hi - qp;
    if (sgn(d_lo) <= 0) continue;
    const Rat x_lo = Rat(1) / (Rat(p) * d_hi);
    const Int cand = floor_rat(x_lo) + 1;
    if (cand < 2) continue;
    // 1/(cand p) < omega - q/p   and   omega - q/p < 1/((cand-1) p)
    if (Rat(cand) * Rat(p) * d_lo >= 1 && Rat(cand - 1) * Rat(p) * d_hi <= 1)
      return cand;
  }
  throw std::runtime_error("p_prime: certified bounds too loose to decide");
}

PowSum p_prime_pow(const RotationSpec& omega, const PowSum& p,
                   const PowSum& q) {
  // Materialized path first.
  if (p.materializable(8000) && q.materializable(8000)) {
    return PowSum(Rat(p_prime(omega, p.to_int(), q.to_int())), p.base());
  }
  if (omega.kind() != RotationSpec::Kind::Liouville)
    throw std::runtime_error("p_prime_pow: symbolic path needs a Liouville spec");
  const PowSum one(Rat(1), p.base());
  for (unsigned level = 0; level < 24; ++level) {
    const auto [wlo, whi] = omega.bounds_pow(level);
    const PowSum qp = q.div_single(p);
    const PowSum d_lo = wlo - qp, d_hi = whi - qp;
    if (d_lo.sign() <= 0) continue;
    // Candidate from the reciprocal of the single-term lower bound.
    const auto& lead = d_lo.terms();
    if (lead.size() != 1 || lead.front().coeff != 1) continue;
    if (p.terms().size() != 1 || p.terms().front().coeff != 1) continue;
    const Int exp_cand = -(lead.front().exp) - p.terms().front().exp;
    for (int off = 0; off <= 1; ++off) {
      const PowSum cand =
          PowSum::power(p.base(), exp_cand) + PowSum(Rat(off), p.base());
      if ((cand * p * d_lo - one).sign() < 0) continue;
      if (((cand - one) * p * d_hi - one).sign() > 0) continue;
      return cand;
    }
  }
  throw std::runtime_error("p_prime_pow: could not certify a candidate");
}

TildeReduction reduce_tilde(const PowSum& pp, const PowSum& pq1) {
  TildeReduction out;
  if (pp.materializable(20000) && pq1.materializable(20000)) {
    const Int a = pp.to_int(), b = pq1.to_int();
    if (a <= 0 || b <= 0)
      throw std::invalid_argument("reduce_tilde: inputs must be positive");
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    out.m = PowSum(Rat(g), pp.base());
    out.p_tilde = PowSum(Rat(a / g), pp.base());
    out.q_tilde = PowSum(Rat(b / g), pp.base());
    return out;
  }
  // Symbolic path: pp = B^E (unit coefficient); the gcd divides B^E, so it
  // is determined by the valuations of pq1 at the primes of B.  A term with
  // exponent 0 and coefficient coprime to B forces gcd 1 (the only case the
  // pipeline produces).
  const auto& t = pp.terms();
  if (t.size() != 1 || t.front().coeff != 1)
    throw std::runtime_error("reduce_tilde: unsupported symbolic shape");
  bool unit = false;
  for (const auto& term : pq1.terms()) {
    if (term.exp == 0 && term.coeff.get_den() == 1) {
      Int g;
      mpz_gcd_ui(g.get_mpz_t(), term.coeff.get_num().get_mpz_t(),
                 static_cast<unsigned long>(pp.base()));
      if (g == 1) unit = true;
    }
    if (term.coeff.get_den() != 1 || term.exp < 0)
      throw std::runtime_error("reduce_tilde: non-integer symbolic input");
  }
  if (!unit)
    throw std::runtime_error("reduce_tilde: symbolic gcd not certifiable");
  out.m = PowSum(Rat(1), pp.base());
  out.p_tilde = pp;
  out.q_tilde = pq1;
  return out;
}

Int budget_a(const Int& p, const Int& q, const RotationSpec& omega,
             const Int& n) {
  if (n < 0) throw std::invalid_argument("budget_a: n must be >= 0");
  if (omega.is_rational()) {
    const Rat val = Rat(n) * rat_abs(Rat(q) - omega.rational_value() * Rat(p));
    return ceil_rat(val);
  }
  for (unsigned level = 0; level < 48; ++level) {
    const auto [lo, hi] = omega.bounds_rat(level);
    const Rat t1 = Rat(q) - hi * Rat(p);
    const Rat t2 = Rat(q) - lo * Rat(p);
    if (sgn(t1) != sgn(t2)) continue;  // straddles zero: refine
    Rat alo = rat_abs(t1), ahi = rat_abs(t2);
    if (alo > ahi) std::swap(alo, ahi);
    const Rat vlo = Rat(n) * alo, vhi = Rat(n) * ahi;
    const Int f = floor_rat(vlo);
    if (vhi <= Rat(f) + 1) return f + 1;  // value in (vlo, vhi) subset (f, f+1]
  }
  throw std::runtime_error("budget_a: interval too wide to decide the ceiling");
}

// ---------------------------------------------------------------------------
// Parameter selection
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  PowSum p, q;       // q/p < omega
  long base;
  unsigned liouville_j = 0;  // truncation index, 0 for materialized
};

// Largest grid value tau = u/v strictly below log_p(gamma/d), verified
// exactly against the certified interval for d; also checks A1's left side.
struct TauChoice {
  bool ok = false;
  long u = 0;  // tau = u / kTauGrid
};

TauChoice choose_tau(const PowSum& p, const PowSum& d_lo, const PowSum& d_hi,
                     const Rat& gamma) {
  constexpr unsigned long v = kTauGrid;
  const PowSum gv = PowSum(gamma, p.base()).pow_ui(v);
  // Estimate u and correct by exact scanning.
  const double logp = p.log10_approx();
  if (logp <= 0) return {};
  const double t_est =
      (std::log10(gamma.get_d() == 0 ? 1.0 : gamma.get_d()) -
       d_hi.log10_approx()) / logp;
  long u = static_cast<long>(std::floor(t_est * v)) + 3;
  const PowSum dhv = d_hi.pow_ui(v);
  const PowSum dlv = d_lo.pow_ui(v);
  int guard = 0;
  while (guard++ < 200) {
    if (u <= 0) return {};
    // A1 right (strict): p^tau < gamma / d_hi.
    if ((p.pow_ui(static_cast<unsigned long>(u)) * dhv - gv).sign() < 0) break;
    --u;
  }
  if (guard >= 200) return {};
  // A1 left: gamma / p^(tau+1) <= d, certified via d_lo.
  if ((p.pow_ui(static_cast<unsigned long>(u) + v) * dlv - gv).sign() < 0)
    return {};
  TauChoice c;
  c.ok = true;
  c.u = u;
  return c;
}

CheckResult make_check(const std::string& name, const PowSum& lhs,
                       const PowSum& rhs, bool pass, const char* scale) {
  CheckResult c;
  c.name = name;
  c.lhs = lhs.to_display();
  c.rhs = rhs.to_display();
  c.pass = pass;
  c.exact = true;
  c.scale_mode = scale;
  return c;
}

}  // namespace

std::vector<CheckResult> ParamSelection::verify(const RotationSpec& omega) const {
  std::vector<CheckResult> out;
  constexpr unsigned long v = kTauGrid;
  const Rat u_rat = tau * Rat(static_cast<long>(v));
  if (u_rat.get_den() != 1)
    throw std::logic_error("ParamSelection: tau is off the 1/16 grid");
  const unsigned long u = u_rat.get_num().get_ui();
  const PowSum gv = PowSum(gamma, base).pow_ui(v);

  // A1 with certified omega bounds, tightening until both sides resolve.
  bool a1l = false, a1r = false;
  for (unsigned level = 0; level < 24 && !(a1l && a1r); ++level) {
    const auto [wlo, whi] = omega.bounds_pow(level);
    const PowSum qp = q.div_single(p);
    const PowSum d_lo = wlo - qp, d_hi = whi - qp;
    if (d_lo.sign() <= 0) continue;
    a1l = (p.pow_ui(u + v) * d_lo.pow_ui(v) - gv).sign() >= 0;
    a1r = (p.pow_ui(u) * d_hi.pow_ui(v) - gv).sign() < 0;
  }
  out.push_back(make_check("A1-left", PowSum(gamma, base),
                           PowSum(Rat(0), base), a1l, "exact"));
  out.push_back(make_check("A1-right", PowSum(gamma, base),
                           PowSum(Rat(0), base), a1r, "exact"));

  // A2: p^(tau - 1 - 2k(k+1)) >= 10 gamma (C_kr / eps)^(2+2k).
  {
    const unsigned long shift = v * static_cast<unsigned long>(1 + 2 * k * (k + 1));
    const Rat thr = Rat(10) * gamma;
    Rat ratio = C_kr / eps;
    Rat pw = 1;
    for (long i = 0; i < 2 + 2 * k; ++i) pw *= ratio;
    const PowSum lhs = p.pow_ui(u);
    const PowSum rhs_exact = p.pow_ui(shift) * PowSum(thr * pw, base).pow_ui(v);
    out.push_back(make_check("A2", lhs, rhs_exact,
                             (lhs - rhs_exact).sign() >= 0, "exact"));
  }

  // A3.
  out.push_back(make_check("A3-eps", PowSum(eps, base),
                           PowSum(C_kr / 10, base), eps <= C_kr / 10, "exact"));
  {
    const PowSum lhs = p.pow_ui(u);  // compare p^u >= (10 gamma)^v p^v
    const PowSum r1 = p.pow_ui(v) * PowSum(Rat(10) * gamma, base).pow_ui(v);
    const PowSum r2 = p.pow_ui(v) * PowSum(Rat(r) * gamma, base).pow_ui(v);
    out.push_back(
        make_check("A3-p-10gamma", lhs, r1, (lhs - r1).sign() >= 0, "exact"));
    out.push_back(
        make_check("A3-p-rgamma", lhs, r2, (lhs - r2).sign() >= 0, "exact"));
  }
  return out;
}

std::vector<CheckResult> certificate_checks(const ParamSelection& sel) {
  std::vector<CheckResult> out;
  constexpr unsigned long v = kTauGrid;
  const Rat u_rat = sel.tau * Rat(static_cast<long>(v));
  if (u_rat.get_den() != 1)
    throw std::logic_error("certificate_checks: tau off the grid");
  const unsigned long u = u_rat.get_num().get_ui();
  const long base = sel.base;
  const PowSum one(Rat(1), base);
  const auto P = [&](const Rat& x) { return PowSum(x, base); };

  // bothestimates1: p^(tau-1)/gamma < p' < 1 + p^tau/gamma.
  {
    const PowSum lhs = sel.p.pow_ui(u - v);
    const PowSum rhs = (P(sel.gamma) * sel.p_prime).pow_ui(v);
    out.push_back(make_check("bothestimates1-left", lhs, rhs,
                             (lhs - rhs).sign() < 0, "exact"));
    const PowSum l2 = ((sel.p_prime - one) * P(sel.gamma)).pow_ui(v);
    const PowSum r2 = sel.p.pow_ui(u);
    out.push_back(make_check("bothestimates1-right", l2, r2,
                             (l2 - r2).sign() < 0, "exact"));
  }

  // choiceN2: the N window [n_lo, n_hi] contains an integer >= 30.
  {
    const bool nonempty = (sel.n_lo - P(Rat(30))).sign() >= 0 &&
                          (sel.n_hi - sel.n_lo - one).sign() >= 0;
    out.push_back(
        make_check("choiceN2-window", sel.n_lo, sel.n_hi, nonempty, "exact"));
  }

  // qp-QP at both endpoints of the Omega window.
  {
    // Lower endpoint: q~ - Omega p~ = 0 identically.
    out.push_back(make_check("qp-QP-low", PowSum(Rat(0), base),
                             P(Rat(11, 10) * sel.gamma), true, "exact"));
    // Upper endpoint: |q~ - Omega p~| = 1/(m (p'-1)).
    const PowSum lhs = sel.p.pow_ui(u - v);
    const PowSum rhs = P(Rat(11, 10) * sel.gamma).pow_ui(v) *
                       (sel.m * (sel.p_prime - one)).pow_ui(v);
    out.push_back(make_check("qp-QP-high", lhs, rhs, (lhs - rhs).sign() <= 0,
                             "exact"));
  }

  // orderoneaction: (N/6)(eps/C_k)(eps/(C_kr p^(k+1)))^k > 12 C r (2r+1),
  // with N at the window's lower end.
  {
    const PowSum pk1 = sel.p.pow_ui(static_cast<unsigned long>(sel.k + 1));
    const PowSum factor =
        P(sel.eps / sel.C_kr).div_single(pk1).pow_ui(
            static_cast<unsigned long>(sel.k));
    const PowSum lhs = sel.n_lo * P(sel.eps / (Rat(6) * sel.C_k)) * factor;
    const PowSum rhs =
        P(Rat(12) * sel.C * Rat(sel.r) * Rat(2 * sel.r + 1));
    out.push_back(make_check("orderoneaction", lhs, rhs,
                             (lhs - rhs).sign() > 0, "exact"));
  }

  // A2alternative: gamma/p^(tau-1) <= (1/10)(eps/C_kr)^2 (eps/(C_kr p^(k+1)))^(2k).
  {
    Rat c = Rat(10) * sel.gamma;
    Rat ratio = sel.C_kr / sel.eps;
    for (int i = 0; i < 2; ++i) c *= ratio;
    for (long i = 0; i < 2 * sel.k; ++i) c *= ratio;
    const unsigned long pshift =
        v * static_cast<unsigned long>((sel.k + 1) * 2 * sel.k);
    const PowSum lhs = P(c).pow_ui(v) * sel.p.pow_ui(pshift);
    const PowSum rhs = sel.p.pow_ui(u - v);
    const bool pass_exact = (lhs - rhs).sign() <= 0;
    out.push_back(make_check("A2alternative", lhs, rhs, pass_exact, "exact"));
  }

  // Case-2 budget (basicclosenessestimate): the near-periodicity allowance
  // (10/4) N gamma r / p^(tau-1) fits under r (eps/C_kr)(eps/(C_kr p^(k+1)))^k,
  // with N at the window's upper end.
  {
    const PowSum pk1 = sel.p.pow_ui(static_cast<unsigned long>(sel.k + 1));
    const PowSum factor =
        P(sel.eps / sel.C_kr).div_single(pk1).pow_ui(
            static_cast<unsigned long>(sel.k));
    const PowSum rhs_lin = P(Rat(sel.r) * sel.eps / sel.C_kr) * factor;
    const PowSum lhs_lin =
        P(Rat(10, 4) * sel.gamma * Rat(sel.r)) * sel.n_hi;
    // Compare lhs_lin / p^(tau-1) <= rhs_lin via v-th powers.
    const PowSum lhs = lhs_lin.pow_ui(v);
    const PowSum rhs = rhs_lin.pow_ui(v) * sel.p.pow_ui(u - v);
    const bool pass_exact = (lhs - rhs).sign() <= 0;
    out.push_back(
        make_check("basiccloseness-case2", lhs, rhs, pass_exact, "exact"));
  }
  return out;
}

SelectionOutcome select_parameters(const RotationSpec& omega, const Rat& gamma,
                                   const Rat& sigma, long k, long r,
                                   const Rat& eps, const Rat& C, const Rat& C_k,
                                   long search_bound, const Rat& relax_factor) {
  SelectionOutcome out;
  if (!(sigma > Rat(1 + 2 * k * (k + 1)))) {
    out.failure = SelectionFailure::SigmaTooSmall;
    out.note = "need sigma > 1 + 2k(k+1) strictly";
    return out;
  }
  if (omega.is_rational()) {
    out.failure = SelectionFailure::RationalOmega;
    return out;
  }
  if (gamma <= 0 || eps <= 0 || C <= 0 || C_k <= 0 || k < 2 || r < 1)
    throw std::invalid_argument("select_parameters: bad parameters");
  const Rat C_kr = Rat(12) * C * C_k * Rat((2 * r + 1) * (2 * r + 1));
  const bool relaxed = (relax_factor != 1);

  std::vector<Candidate> cands;
  long base = 10;
  if (omega.kind() == RotationSpec::Kind::Liouville) {
    base = omega.liouville_base();
    for (unsigned j = 2; j <= 16; ++j) {
      const Int fj = factorial(j);
      // Materialized bound applies only when the denominator is small.
      const double digits = mpz_get_d(fj.get_mpz_t()) * std::log10(double(base));
      if (relaxed && digits > std::log10(double(search_bound)) + 0.5) break;
      Candidate c;
      c.base = base;
      c.liouville_j = j;
      c.p = PowSum::power(base, fj);
      PowSum q;
      for (unsigned i = 1; i <= j; ++i)
        q = q + PowSum::power(base, fj - factorial(i));
      c.q = q;
      cands.push_back(std::move(c));
    }
  } else {
    const auto conv = convergents(omega, 48);
    const double w = omega.to_double();
    for (const auto& [p, q] : conv) {
      if (p < 2 || p > search_bound) continue;
      if (mpz_get_d(q.get_mpz_t()) / mpz_get_d(p.get_mpz_t()) >= w) continue;
      Candidate c;
      c.base = base;
      c.p = PowSum(Rat(p), base);
      c.q = PowSum(Rat(q), base);
      cands.push_back(std::move(c));
    }
  }

  bool quality_reached = false;
  for (const auto& cand : cands) {
    // Certified d = omega - q/p interval, refined until positive.
    PowSum d_lo, d_hi;
    bool have_d = false;
    const unsigned level0 =
        cand.liouville_j > 1 ? cand.liouville_j - 1 : 0;
    for (unsigned level = level0; level < level0 + 12; ++level) {
      const auto [wlo, whi] = omega.bounds_pow(level);
      const PowSum qp = cand.q.div_single(cand.p);
      d_lo = wlo - qp;
      d_hi = whi - qp;
      if (d_lo.sign() > 0) {
        have_d = true;
        break;
      }
    }
    if (!have_d) continue;

    const TauChoice tc = choose_tau(cand.p, d_lo, d_hi, gamma);
    if (!tc.ok) continue;
    const Rat tau = Rat(tc.u) / Rat(static_cast<long>(kTauGrid));
    out.best_tau_seen = std::max(out.best_tau_seen,
                                 tau.get_d());
    const bool tau_ok = relaxed ? (tau > 2) : (tau >= sigma);
    if (!tau_ok) continue;
    quality_reached = quality_reached || tau >= sigma;

    // A3 structural gates.
    if (!(eps <= C_kr / 10)) continue;
    constexpr unsigned long v = kTauGrid;
    const unsigned long u = static_cast<unsigned long>(tc.u);
    const PowSum pu = cand.p.pow_ui(u);
    const PowSum pv = cand.p.pow_ui(v);
    if ((pu - pv * PowSum(Rat(10) * gamma, cand.base).pow_ui(v)).sign() < 0)
      continue;
    if ((pu - pv * PowSum(Rat(r) * gamma, cand.base).pow_ui(v)).sign() < 0)
      continue;

    // A2 (true scale); in relaxed mode the result is recorded, not gating.
    const unsigned long shift = v * static_cast<unsigned long>(1 + 2 * k * (k + 1));
    Rat thr = Rat(10) * gamma;
    {
      Rat ratio = C_kr / eps;
      for (long i = 0; i < 2 + 2 * k; ++i) thr *= ratio;
    }
    const bool a2_true =
        (pu - cand.p.pow_ui(shift) * PowSum(thr, cand.base).pow_ui(v)).sign() >= 0;
    if (!relaxed && !a2_true) continue;

    // Admissible: assemble the selection.
    ParamSelection sel;
    sel.gamma = gamma;
    sel.sigma = sigma;
    sel.tau = tau;
    sel.k = k;
    sel.r = r;
    sel.eps = eps;
    sel.C = C;
    sel.C_k = C_k;
    sel.C_kr = C_kr;
    sel.base = cand.base;
    sel.p = cand.p;
    sel.q = cand.q;
    sel.relax_factor = relax_factor;
    sel.tau_ge_sigma = tau >= sigma;
    sel.p_prime = p_prime_pow(omega, cand.p, cand.q);
    const PowSum one(Rat(1), cand.base);
    const auto tilde = reduce_tilde(sel.p_prime * cand.p,
                                    sel.p_prime * cand.q + one);
    sel.m = tilde.m;
    sel.p_tilde = tilde.p_tilde;
    sel.q_tilde = tilde.q_tilde;

    // N window: 3 (C_kr/eps)^(k+1) p^(k(k+1)) and 11/10 of it.
    {
      Rat c3 = Rat(3);
      Rat ratio = C_kr / eps;
      for (long i = 0; i < k + 1; ++i) c3 *= ratio;
      sel.n_lo = PowSum(c3, cand.base) *
                 cand.p.pow_ui(static_cast<unsigned long>(k * (k + 1)));
      sel.n_hi = PowSum(Rat(11, 10), cand.base) * sel.n_lo;
    }

    // Drift budget a.
    if (sel.p_tilde.materializable(4000) && sel.n_lo.materializable(4000)) {
      const Int pt = sel.p_tilde.to_int();
      const Int qt = sel.q_tilde.to_int();
      const Int n_int = ceil_rat(sel.n_lo.to_rat(4000)) + 3;
      sel.a = PowSum(Rat(budget_a(pt, qt, omega, n_int * pt)), cand.base);
      sel.a_is_upper_bound = false;
    } else {
      // Exact upper bound (N_hi + 3) p~ (11/10) gamma / p^(tau-1) + 1;
      // p^(tau-1) is an exact power because kTauGrid divides the exponent.
      const Int pexp = cand.p.terms().front().exp;
      const Int num = pexp * Int(static_cast<long>(u - v));
      if (num % Int(static_cast<long>(v)) == 0) {
        const PowSum ptau1 =
            PowSum::power(cand.base, num / Int(static_cast<long>(v)));
        sel.a = (sel.n_hi + PowSum(Rat(3), cand.base)) * sel.p_tilde *
                    PowSum(Rat(11, 10) * gamma, cand.base).div_single(ptau1) +
                one;
        sel.a_is_upper_bound = true;
      } else {
        sel.a = PowSum();  // exponent off-grid: no certified budget stored
        sel.a_is_upper_bound = true;
      }
    }

    out.selection = std::move(sel);
    return out;
  }

  out.failure = quality_reached ? SelectionFailure::BoundTooSmall
                                : SelectionFailure::NotLiouvilleEnough;
  out.note = quality_reached
                 ? "an admissible tau existed but another gate failed in range"
                 : "best tau stayed below sigma across all approximants";
  return out;
}

}  // namespace fk
