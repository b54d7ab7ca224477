#include "fklab/runner.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fk {

Rat parse_rat(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_rat: empty string");
  if (text.find('/') != std::string::npos) {
    Rat v(text);
    v.canonicalize();
    return v;
  }
  // Decimal with optional exponent: [-]digits[.digits][e[+-]digits]
  size_t pos = 0;
  bool neg = false;
  if (text[pos] == '+' || text[pos] == '-') neg = text[pos++] == '-';
  std::string digits;
  long frac_len = 0;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_dot) ++frac_len;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  long exp10 = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E'))
    exp10 = std::stol(text.substr(pos + 1));
  else if (pos < text.size())
    throw std::invalid_argument("parse_rat: bad number: " + text);
  if (digits.empty()) throw std::invalid_argument("parse_rat: no digits: " + text);
  const Int mantissa(digits);
  Rat v(mantissa);
  const long e = exp10 - frac_len;
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10u, static_cast<unsigned long>(std::labs(e)));
  if (e > 0) v *= Rat(scale);
  if (e < 0) v /= Rat(scale);
  if (neg) v = -v;
  v.canonicalize();
  return v;
}

json RunConfig::echo() const {
  return json{{"subcommand", subcommand},
              {"family", family},
              {"lambda", lambda},
              {"p", p},
              {"q", q},
              {"eps", eps},
              {"k", k},
              {"r", r},
              {"gamma", gamma},
              {"sigma", sigma},
              {"tol", tol},
              {"starts", starts},
              {"seed", seed},
              {"mode", mode},
              {"omega", omega},
              {"i1", i1},
              {"i2", i2},
              {"xi_minus", xi_minus},
              {"xi_plus", xi_plus},
              {"input", input},
              {"search_bound", search_bound}};
}

namespace {

Rat relax_from_mode(const std::string& mode) {
  if (mode == "exact" || mode.empty()) return Rat(1);
  const std::string prefix = "relaxed:";
  if (mode.rfind(prefix, 0) == 0) return parse_rat(mode.substr(prefix.size()));
  throw std::invalid_argument("unknown mode: " + mode);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool gated_pass(const std::vector<CheckResult>& checks, bool relaxed) {
  bool all = true;
  for (const auto& c : checks) {
    if (relaxed && c.scale_mode == "exact" &&
        (c.name == "A2" || c.name == "A2alternative" ||
         c.name == "basiccloseness-case2"))
      continue;
    all = all && c.pass;
  }
  return all;
}

FamilyPtr rebuild_perturbed(const RunConfig& rc,
                            const DestructionCertificate& cert) {
  FamilyPtr F = builtin(rc.family, rc.lambda);
  if (cert.bump1) F = perturb(F, *cert.bump1);
  if (cert.bump2) F = perturb(F, *cert.bump2);
  return F;
}

}  // namespace

RunResult run_config(const RunConfig& rc) {
  RunResult out;
  json& a = out.artifact;
  a["run_config"] = rc.echo();

  if (rc.subcommand == "verify") {
    const FamilyPtr F = builtin(rc.family, rc.lambda);
    std::vector<PeriodicConfig> samples;
    for (int s = 0; s < 8; ++s)
      samples.push_back(jittered_profile(rc.p, rc.q, 0.1 * s, 0.3, rc.seed,
                                         static_cast<std::uint64_t>(s)));
    const double band = std::fabs(static_cast<double>(rc.q) / rc.p) + 2.0;
    const ConditionReport rep = verify_conditions(*F, samples, band);
    a["conditions"] = to_json(rep);
    out.pass = rep.ok();
  } else if (rc.subcommand == "minimize") {
    const FamilyPtr F = builtin(rc.family, rc.lambda);
    const MinimizerSet ms =
        minimizer_set(*F, rc.p, rc.q, rc.starts, rc.seed, rc.tol);
    a["result"] = to_json(ms);
    out.pass = !ms.minimizers.empty();
  } else if (rc.subcommand == "gaps") {
    PeriodicConfig x;
    if (!rc.input.empty()) {
      x = config_from_csv(slurp(rc.input), rc.p, rc.q);
    } else {
      const FamilyPtr F = builtin(rc.family, rc.lambda);
      const MinimizerSet ms =
          minimizer_set(*F, rc.p, rc.q, rc.starts, rc.seed, rc.tol);
      if (ms.minimizers.empty())
        throw std::runtime_error("gaps: no converged minimizer");
      x = ms.minimizers.front().config;
      for (const auto& m : ms.minimizers)
        if (m.action < periodic_action(*F, x)) x = m.config;
    }
    const ExtendedOrbit orb = extended_orbit(x);
    json gaps = json::array();
    for (const auto& g : find_gaps(orb)) gaps.push_back(to_json(g));
    a["config"] = to_json(x);
    a["points"] = orb.points;
    a["gaps"] = std::move(gaps);
    out.pass = !orb.points.empty();
  } else if (rc.subcommand == "bump") {
    const BumpSpec b = make_bump(rc.xi_minus, rc.xi_plus, rc.eps, rc.k);
    a["bump"] = to_json(b);
    const double norm = b.ck_norm_sampled(4001);
    a["ck_norm_sampled"] = norm;
    json samples = json::array();
    for (int i = 0; i <= 16; ++i) {
      const double xi = static_cast<double>(i) / 16.0;
      samples.push_back(json{{"xi", xi}, {"phi", b(xi)}});
    }
    a["samples"] = std::move(samples);
    out.pass = norm <= rc.eps;
  } else if (rc.subcommand == "near-periodicity") {
    const RotationSpec w = RotationSpec::parse(rc.omega);
    const NearPeriodicityResult res = near_periodicity_verify(
        rigid_rotation(0.0, w.to_double()), w, rc.p, rc.q, rc.r, rc.i1, rc.i2);
    a["result"] = to_json(res);
    out.pass = res.within_bound;
  } else if (rc.subcommand == "confine") {
    const RotationSpec w = RotationSpec::parse(rc.omega);
    const ConfinementResult res =
        confine(rigid_rotation(0.0, w.to_double()), w, rc.p, rc.q, rc.i1, rc.i2);
    a["result"] = to_json(res);
    out.pass = res.lower_slack >= -1e-12 && res.upper_slack >= -1e-12 &&
               res.y_birkhoff;
  } else if (rc.subcommand == "select-params") {
    const FamilyPtr F = builtin(rc.family, rc.lambda);
    const RotationSpec w = RotationSpec::parse(rc.omega);
    const Rat relax = relax_from_mode(rc.mode);
    const Rat C = rat_from_double_exact(F->derivative_bound(3.0));
    const Rat Ck = rat_from_double_exact(certified_ck(rc.k));
    const SelectionOutcome sel = select_parameters(
        w, parse_rat(rc.gamma), parse_rat(rc.sigma), rc.k, rc.r,
        rat_from_double_exact(rc.eps), C, Ck, rc.search_bound, relax);
    a["outcome"] = to_json(sel);
    if (sel.selection) {
      std::vector<CheckResult> checks = sel.selection->verify(w);
      const auto chain = certificate_checks(*sel.selection);
      checks.insert(checks.end(), chain.begin(), chain.end());
      json jc = json::array();
      for (const auto& c : checks) jc.push_back(to_json(c));
      a["checks"] = std::move(jc);
      out.pass = gated_pass(checks, relax != 1);
    } else {
      out.pass = false;
    }
  } else if (rc.subcommand == "destroy-periodic") {
    const FamilyPtr F = builtin(rc.family, rc.lambda);
    const DestroyPeriodicResult res = destroy_periodic(
        F, rc.p, rc.q, rc.eps, rc.k, rc.tol, rc.starts, rc.seed);
    a["result"] = to_json(res);
    out.pass = res.report.all_translates &&
               res.report.probe_excess >= res.report.probe_bound - 1e-9;
  } else if (rc.subcommand == "destroy") {
    const FamilyPtr F = builtin(rc.family, rc.lambda);
    const RotationSpec w = RotationSpec::parse(rc.omega);
    const Rat relax = relax_from_mode(rc.mode);
    const PipelineResult res = run_destruction(
        F, w, parse_rat(rc.gamma), parse_rat(rc.sigma), rc.k, rc.r,
        rat_from_double_exact(rc.eps), relax, rc.starts, rc.seed, rc.tol,
        rc.search_bound);
    a["result"] = to_json(res);
    out.pass = res.cert.pass;
  } else if (rc.subcommand == "check-cert") {
    const json doc = json::parse(slurp(rc.input));
    const json& cj = doc.contains("certificate")
                         ? doc.at("certificate")
                         : (doc.contains("result")
                                ? doc.at("result").at("certificate")
                                : doc);
    const DestructionCertificate cert = certificate_from_json(cj);
    const RotationSpec w = RotationSpec::parse(rc.omega);
    const std::vector<CheckResult> checks = check_certificate(w, cert);
    json jc = json::array();
    for (const auto& c : checks) jc.push_back(to_json(c));
    a["checks"] = std::move(jc);
    out.pass = gated_pass(checks, cert.params.relax_factor != 1);
  } else if (rc.subcommand == "probe") {
    const json doc = json::parse(slurp(rc.input));
    const json& cj = doc.contains("certificate")
                         ? doc.at("certificate")
                         : (doc.contains("result")
                                ? doc.at("result").at("certificate")
                                : doc);
    const DestructionCertificate cert = certificate_from_json(cj);
    const RotationSpec w = RotationSpec::parse(rc.omega);
    const FamilyPtr F2 = rebuild_perturbed(rc, cert);
    if (!cert.params.p.materializable(18))
      throw std::runtime_error("probe: certificate p is not desk-scale");
    const long p = cert.params.p.to_int().get_si();
    const long q = cert.params.q.to_int().get_si();
    const long pp = cert.params.p_prime.to_int().get_si();
    std::vector<Rat> omegas;
    omegas.push_back(Rat(pp * q + 1, pp * p));
    omegas.push_back(Rat((pp - 1) * q + 1, (pp - 1) * p));
    omegas.push_back(Rat((2 * pp - 1) * q + 2, (2 * pp - 1) * p));
    for (auto& o : omegas) o.canonicalize();
    const auto probes = probe_gap_minimizers(F2, w, omegas, cert, rc.starts,
                                             rc.seed, rc.tol);
    json jp = json::array();
    bool any = false;
    for (const auto& pr : probes) {
      any |= pr.violation;
      jp.push_back(to_json(pr));
    }
    a["probes"] = std::move(jp);
    out.pass = !any;
  } else {
    throw std::invalid_argument("unknown subcommand: " + rc.subcommand);
  }
  a["pass"] = out.pass;
  return out;
}

}  // namespace fk
