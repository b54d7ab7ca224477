#include "fklab/io.hpp"

#include <stdexcept>

namespace fk {

json to_json(const Rat& v) {
  return json{{"num", v.get_num().get_str()}, {"den", v.get_den().get_str()}};
}

Rat rat_from_json(const json& j) {
  Rat v(Int(j.at("num").get<std::string>()),
        Int(j.at("den").get<std::string>()));
  v.canonicalize();
  return v;
}

json to_json(const PowSum& v) {
  // Small values are stored as plain rationals; huge ones keep the exact
  // base/terms form.
  if (v.materializable(10000)) {
    json j = to_json(v.to_rat());
    j["approx"] = v.to_double();
    return j;
  }
  json terms = json::array();
  for (const auto& t : v.terms())
    terms.push_back(json{{"num", t.coeff.get_num().get_str()},
                         {"den", t.coeff.get_den().get_str()},
                         {"exp", t.exp.get_str()}});
  return json{{"base", v.base()},
              {"terms", std::move(terms)},
              {"log10", v.log10_approx()}};
}

PowSum powsum_from_json(const json& j) {
  if (j.contains("num")) return PowSum(rat_from_json(j));
  const long base = j.at("base").get<long>();
  PowSum s(Rat(0), base);
  for (const auto& t : j.at("terms")) {
    Rat c(Int(t.at("num").get<std::string>()),
          Int(t.at("den").get<std::string>()));
    c.canonicalize();
    s = s + PowSum::power(base, Int(t.at("exp").get<std::string>()), c);
  }
  return s;
}

json to_json(const PeriodicConfig& x) {
  return json{{"p", x.p}, {"q", x.q}, {"values", x.values}};
}

PeriodicConfig config_from_json(const json& j) {
  return PeriodicConfig(j.at("p").get<long>(), j.at("q").get<long>(),
                        j.at("values").get<std::vector<double>>());
}

json to_json(const GapInterval& g) {
  return json{{"lo", g.lo},
              {"hi", g.hi},
              {"length", g.length()},
              {"endpoints_in_orbit", g.endpoints_in_orbit}};
}

json to_json(const BumpSpec& b) {
  return json{{"xi_minus", b.xi_minus}, {"xi_plus", b.xi_plus},
              {"eps", b.eps},           {"k", b.k},
              {"ck", b.ck},             {"plateau", b.plateau_value()}};
}

BumpSpec bump_from_json(const json& j) {
  BumpSpec b;
  b.xi_minus = j.at("xi_minus").get<double>();
  b.xi_plus = j.at("xi_plus").get<double>();
  b.eps = j.at("eps").get<double>();
  b.k = j.at("k").get<int>();
  b.ck = j.at("ck").get<double>();
  return b;
}

json to_json(const MinimizeResult& m) {
  json j{{"config", to_json(m.config)},
         {"action", m.action},
         {"grad_norm", m.grad_norm},
         {"iterations", m.iterations},
         {"converged", m.converged},
         {"multiplicity", m.multiplicity}};
  if (m.merge_witness)
    j["merge_witness"] = json{{"k", m.merge_witness->k},
                              {"l", m.merge_witness->l}};
  return j;
}

json to_json(const MinimizerSet& s) {
  json arr = json::array();
  for (const auto& m : s.minimizers) arr.push_back(to_json(m));
  return json{{"minimizers", std::move(arr)},
              {"discarded_nonminimal", s.discarded_nonminimal},
              {"failed", s.failed},
              {"best_action", s.best_action}};
}

namespace {
json to_json(const ConditionFinding& f) {
  return json{{"status", to_string(f.status)},
              {"detail", f.detail},
              {"witness_value", f.witness_value}};
}
}  // namespace

json to_json(const ConditionReport& r) {
  return json{{"A", to_json(r.a)},      {"B", to_json(r.b)},
              {"C", to_json(r.c)},      {"D", to_json(r.d)},
              {"E", to_json(r.e)},      {"bound_C", r.bound_C},
              {"domain", r.domain},     {"ok", r.ok()}};
}

json to_json(const NearPeriodicityResult& r) {
  return json{{"i0", r.i0},
              {"achieved", r.achieved},
              {"bound", r.bound},
              {"a", r.a},
              {"n_translates", r.n_translates},
              {"within_bound", r.within_bound}};
}

json to_json(const ConfinementResult& r) {
  json table = json::array();
  for (const auto& e : r.psi_table)
    table.push_back(json{{"arg", e.arg}, {"val", e.val}});
  return json{{"y", to_json(r.y)},
              {"a", r.a},
              {"psi_table", std::move(table)},
              {"lower_slack", r.lower_slack},
              {"upper_slack", r.upper_slack},
              {"y_birkhoff", r.y_birkhoff},
              {"mirrored", r.mirrored}};
}

json to_json(const DestroyPeriodicResult& r) {
  return json{
      {"family", r.perturbed ? r.perturbed->name() : ""},
      {"family_params", r.perturbed ? r.perturbed->params_json() : "{}"},
      {"y_min", to_json(r.y_min)},
      {"gap", to_json(r.gap)},
      {"bump", to_json(r.bump)},
      {"report",
       json{{"n_starts", r.report.n_starts},
            {"unperturbed_classes", r.report.unperturbed_classes},
            {"perturbed_classes", r.report.perturbed_classes},
            {"discarded_nonminimal", r.report.discarded_nonminimal},
            {"failed", r.report.failed},
            {"all_translates", r.report.all_translates},
            {"probe_excess", r.report.probe_excess},
            {"probe_bound", r.report.probe_bound}}}};
}

json to_json(const CheckResult& c) {
  return json{{"name", c.name},   {"lhs", c.lhs},
              {"rhs", c.rhs},     {"pass", c.pass},
              {"exact", c.exact}, {"scale_mode", c.scale_mode}};
}

CheckResult check_from_json(const json& j) {
  CheckResult c;
  c.name = j.at("name").get<std::string>();
  c.lhs = j.at("lhs").get<std::string>();
  c.rhs = j.at("rhs").get<std::string>();
  c.pass = j.at("pass").get<bool>();
  c.exact = j.at("exact").get<bool>();
  c.scale_mode = j.at("scale_mode").get<std::string>();
  return c;
}

json to_json(const ParamSelection& s) {
  return json{{"gamma", to_json(s.gamma)},
              {"sigma", to_json(s.sigma)},
              {"tau", to_json(s.tau)},
              {"k", s.k},
              {"r", s.r},
              {"eps", to_json(s.eps)},
              {"C", to_json(s.C)},
              {"C_k", to_json(s.C_k)},
              {"C_kr", to_json(s.C_kr)},
              {"base", s.base},
              {"p", to_json(s.p)},
              {"q", to_json(s.q)},
              {"p_prime", to_json(s.p_prime)},
              {"m", to_json(s.m)},
              {"p_tilde", to_json(s.p_tilde)},
              {"q_tilde", to_json(s.q_tilde)},
              {"a", to_json(s.a)},
              {"a_is_upper_bound", s.a_is_upper_bound},
              {"n_lo", to_json(s.n_lo)},
              {"n_hi", to_json(s.n_hi)},
              {"relax_factor", to_json(s.relax_factor)},
              {"tau_ge_sigma", s.tau_ge_sigma}};
}

ParamSelection selection_from_json(const json& j) {
  ParamSelection s;
  s.gamma = rat_from_json(j.at("gamma"));
  s.sigma = rat_from_json(j.at("sigma"));
  s.tau = rat_from_json(j.at("tau"));
  s.k = j.at("k").get<long>();
  s.r = j.at("r").get<long>();
  s.eps = rat_from_json(j.at("eps"));
  s.C = rat_from_json(j.at("C"));
  s.C_k = rat_from_json(j.at("C_k"));
  s.C_kr = rat_from_json(j.at("C_kr"));
  s.base = j.at("base").get<long>();
  s.p = powsum_from_json(j.at("p"));
  s.q = powsum_from_json(j.at("q"));
  s.p_prime = powsum_from_json(j.at("p_prime"));
  s.m = powsum_from_json(j.at("m"));
  s.p_tilde = powsum_from_json(j.at("p_tilde"));
  s.q_tilde = powsum_from_json(j.at("q_tilde"));
  s.a = powsum_from_json(j.at("a"));
  s.a_is_upper_bound = j.at("a_is_upper_bound").get<bool>();
  s.n_lo = powsum_from_json(j.at("n_lo"));
  s.n_hi = powsum_from_json(j.at("n_hi"));
  s.relax_factor = rat_from_json(j.at("relax_factor"));
  s.tau_ge_sigma = j.at("tau_ge_sigma").get<bool>();
  return s;
}

json to_json(const SelectionOutcome& s) {
  json j{{"best_tau_seen", s.best_tau_seen}, {"note", s.note}};
  switch (s.failure) {
    case SelectionFailure::None: j["failure"] = "none"; break;
    case SelectionFailure::SigmaTooSmall: j["failure"] = "sigma-too-small"; break;
    case SelectionFailure::RationalOmega: j["failure"] = "rational-omega"; break;
    case SelectionFailure::BoundTooSmall: j["failure"] = "bound-too-small"; break;
    case SelectionFailure::NotLiouvilleEnough:
      j["failure"] = "not-liouville-enough";
      break;
  }
  if (s.selection) j["selection"] = to_json(*s.selection);
  return j;
}

json to_json(const Stage1Result& s) {
  return json{{"y_min", to_json(s.y_min)},
              {"gap", to_json(s.gap)},
              {"bump", to_json(s.bump)},
              {"xi", s.xi},
              {"band_hi", s.band_hi},
              {"plateau_penalty", s.plateau_penalty},
              {"penalty_bound", s.penalty_bound},
              {"budget_sampled", s.budget_sampled}};
}

json to_json(const Stage2Result& s) {
  return json{{"x_min", to_json(s.x_min)},
              {"gap2", to_json(s.gap2)},
              {"bump", to_json(s.bump)},
              {"eta", s.eta},
              {"gap2_guarantee", s.gap2_guarantee},
              {"gap2_ok", s.gap2_ok},
              {"probe_excess", s.probe_excess},
              {"probe_bound", s.probe_bound},
              {"plateau_site_count", s.plateau_site_count},
              {"site_count_bound", s.site_count_bound},
              {"reminimize_drift", s.reminimize_drift},
              {"action_drift", s.action_drift},
              {"budget_sampled", s.budget_sampled}};
}

json to_json(const OmegaProbeReport& r) {
  json j{{"Omega", to_json(r.Omega)},
         {"in_delta_window", r.in_delta_window},
         {"in_qp_window", r.in_qp_window},
         {"n_classes", r.n_classes},
         {"violation", r.violation},
         {"closest_point", r.closest_point}};
  if (r.violation) j["witness"] = to_json(r.witness);
  return j;
}

json to_json(const DestructionCertificate& c) {
  json j{{"params", to_json(c.params)},
         {"family_id", c.family_id},
         {"xi", c.xi},
         {"eta_minus", c.eta_minus},
         {"eta_plus", c.eta_plus},
         {"delta", to_json(c.delta)},
         {"pass", c.pass}};
  if (c.bump1) j["bump1"] = to_json(*c.bump1);
  if (c.bump2) j["bump2"] = to_json(*c.bump2);
  json checks = json::array();
  for (const auto& ch : c.checks) checks.push_back(to_json(ch));
  j["checks"] = std::move(checks);
  return j;
}

DestructionCertificate certificate_from_json(const json& j) {
  DestructionCertificate c;
  c.params = selection_from_json(j.at("params"));
  c.family_id = j.at("family_id").get<std::string>();
  c.xi = j.at("xi").get<double>();
  c.eta_minus = j.at("eta_minus").get<double>();
  c.eta_plus = j.at("eta_plus").get<double>();
  c.delta = rat_from_json(j.at("delta"));
  c.pass = j.at("pass").get<bool>();
  if (j.contains("bump1")) c.bump1 = bump_from_json(j.at("bump1"));
  if (j.contains("bump2")) c.bump2 = bump_from_json(j.at("bump2"));
  for (const auto& ch : j.at("checks")) c.checks.push_back(check_from_json(ch));
  return c;
}

json to_json(const PipelineResult& r) {
  json j{{"mode_note", r.mode_note},
         {"stages_run", r.stages_run},
         {"certificate", to_json(r.cert)}};
  if (r.stage1) j["stage1"] = to_json(*r.stage1);
  if (r.stage2) j["stage2"] = to_json(*r.stage2);
  json probes = json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  j["probes"] = std::move(probes);
  return j;
}

}  // namespace fk
