#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "nsaudit/audit.hpp"
#include "nsaudit/errors.hpp"

namespace nsaudit::audit {

const std::vector<InequalityInfo>& inequality_registry() {
  static const std::vector<InequalityInfo> table = {
      {ids::energy_inequality, Class::monitor, 0.0,
       "sup ‖q‖² + ∫‖∇q‖² <= ‖q0‖² + ‖f‖_{L2(Q_T)} (no ν weighting)"},
      {ids::energy_balance, Class::pass, 0.0,
       "|E(t) + 2ν∫‖∇q‖² - E(0) - 2∫<f,q>| <= tol·E(0)"},
      {ids::pressure_l2, Class::monitor, 0.0, "‖p‖ <= 3 ‖∇q‖^{3/2} ‖q‖^{1/2}"},
      {ids::pressure_gradient, Class::monitor, 0.0,
       "|∇p̃| <= |FT|q|²|/|k| + |f̃|/|k|² + |∇f̃|/|k| + 3|∇FT|q|²|, min over k"},
      {ids::moment_x2, Class::monitor, 0.0, "∫|x|²|q|² + ∫∫|x|²|∇q|² bounded"},
      {ids::moment_x4, Class::monitor, 0.0, "∫|x|⁴|q|² + ∫∫|x|⁴|∇q|² bounded"},
      {ids::moment_k1, Class::monitor, 0.0, "‖∇q̃‖ + ∫∫|k|²|∇q̃|² bounded"},
      {ids::moment_k2, Class::monitor, 0.0, "‖∇²q̃‖ + ∫∫|k|²|∇²q̃|² bounded"},
      {ids::sup_k0, Class::monitor, 0.0, "max|q̃| <= max|q̃0| + (T/2)(sup‖q‖² + ∫‖∇q‖²)"},
      {ids::sup_k1, Class::monitor, 0.0, "max|∇q̃| <= max|∇q̃0| + (T/2)(first-moment bracket)"},
      {ids::sup_k2, Class::monitor, 0.0, "max|∇²q̃| <= max|∇²q̃0| + (T/2)(second-moment bracket)"},
      {ids::difference_bound, Class::pass, 1e-3,
       "|q̃(κ,t)| <= |q̃0(κ)| + (2ν)^{-1/2} C0^{1/2} / |κ|, κ = |k|(e_k - e_λ)"},
      {ids::duhamel_replay, Class::pass, 0.0, "Duhamel replay residual <= tol"},
      {ids::bound_state_energy, Class::pass, 0.0, "E_j² <= ∫|q ψ_j|²"},
      {ids::bound_state_sup, Class::pass, 0.0, "max|ψ_j| <= 2‖q ψ_j‖"},
      {ids::discrete_projection, Class::monitor, 0.0,
       "max|P_D q| <= 2‖q‖ ‖q‖_R max|ψ_j|"},
      {ids::continuous_projection, Class::monitor, 0.0,
       "max|P_Ac q| / ‖q‖ (realized constant, rhs = configured C)"},
      {ids::parseval_split, Class::pass, 0.0, "|‖q‖² - ‖P_D q‖² - ‖P_Ac q‖²| <= 1e-10 ‖q‖²"},
      {ids::rollnik_plancherel, Class::monitor, 0.0,
       "∬ q q / |x - y|² <= C (‖q‖ + max|q̃|)²"},
      {ids::contraction_constant, Class::monitor, 0.0, "K <= 8/7"},
      {ids::scaled_ta_norm, Class::monitor, 0.0, "‖A_i‖_TA < 1 for the scaled components"},
      {ids::scaled_bs_bound, Class::monitor, 0.0,
       "Birman-Schwinger bound < 1 for the scaled components"},
  };
  return table;
}

const InequalityInfo& inequality_info(const std::string& id) {
  for (const auto& info : inequality_registry())
    if (id == info.id) return info;
  throw std::out_of_range("unknown inequality id '" + id + "'");
}

const Margin& AuditRecord::margin(const std::string& id) const {
  for (const auto& m : margins)
    if (m.id == id) return m;
  throw std::out_of_range("record has no margin '" + id + "'");
}

std::string Verdict::label() const {
  if (!present) return "MISSING";
  if (cls == Class::pass) return ok ? "PASS" : "FAIL";
  return ok ? "MONITOR+" : "MONITOR-";
}

void AuditReport::summarize() {
  std::map<std::string, Verdict> by_id;
  for (const auto& info : inequality_registry()) {
    Verdict v;
    v.id = info.id;
    v.cls = info.cls;
    v.ok = true;
    by_id.emplace(info.id, v);
  }
  auto fold = [&](const Margin& m, double t) {
    const auto& info = inequality_info(m.id);
    Verdict& v = by_id.at(m.id);
    v.present = true;
    ++v.count;
    const double slack = m.rhs + info.tol * std::abs(m.rhs) - m.lhs;
    const bool good = info.cls == Class::pass ? slack >= 0.0 : m.margin() >= 0.0;
    if (!good || !std::isfinite(slack)) v.ok = false;
    if (m.margin() < v.worst_margin || std::isnan(m.margin())) {
      v.worst_margin = m.margin();
      v.worst_time = t;
    }
  };
  for (const auto& r : records)
    for (const auto& m : r.margins) fold(m, r.t);
  for (const auto& m : extra) fold(m, std::nan(""));

  verdicts.clear();
  for (const auto& info : inequality_registry()) {
    Verdict v = by_id.at(info.id);
    if (!v.present) v.ok = false;
    verdicts.push_back(v);
  }
}

const Verdict& AuditReport::verdict(const std::string& id) const {
  for (const auto& v : verdicts)
    if (v.id == id) return v;
  throw std::out_of_range("no verdict for '" + id + "'");
}

std::vector<std::string> AuditReport::monitor_ids() const {
  std::vector<std::string> out;
  for (const auto& info : inequality_registry())
    if (info.cls == Class::monitor) out.emplace_back(info.id);
  return out;
}

bool AuditReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) {
    return v.cls == Class::monitor || !v.present || v.ok;
  });
}

ConstantsK compute_K(double nu, double C, double C0) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("compute_K needs ν > 0");
  const double cc = C * C0;
  if (!(cc >= 0.0)) throw InvalidInput("compute_K needs C·C0 >= 0");
  ConstantsK out;
  out.A0 = 4.0 / (std::cbrt(nu) * std::cbrt((cc + 1.0) * (cc + 1.0)));
  const double root = std::sqrt(nu / out.A0);
  const double denom = root - 4.0 * std::numbers::pi * cc / (out.A0 * out.A0);
  out.contractive = denom > 0.0;
  out.K = root / denom;
  out.pass = out.contractive && out.K <= 8.0 / 7.0;
  return out;
}

}  // namespace nsaudit::audit
