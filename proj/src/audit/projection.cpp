#include <algorithm>
#include <cmath>

#include "nsaudit/audit.hpp"
#include "nsaudit/errors.hpp"

namespace nsaudit::audit {

ProjectionAudit projection_audit(const scatter::PotentialSample& q,
                                 const scatter::BoundStateSet& states, double C) {
  const Grid3& g = q.q.grid;
  if (!(states.grid == g)) throw InvalidInput("bound states live on a different grid");
  const double dv = g.cell_volume();
  const auto& qv = q.q.values;
  const std::size_t N = g.size();
  ProjectionAudit out;

  auto l2 = [dv](const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s * dv);
  };
  auto sup = [](const std::vector<double>& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
  };

  double psi_sup = 0.0;
  std::vector<double> pd(N, 0.0), qpsi(N);
  for (std::size_t j = 0; j < states.count(); ++j) {
    const auto& psi = states.psi[j];
    double overlap = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
      qpsi[p] = qv[p] * psi[p];
      overlap += qv[p] * psi[p] * dv;
    }
    const double qpsi_norm = l2(qpsi);
    const double E = states.E[j];
    out.margins.push_back({ids::bound_state_energy, E * E, qpsi_norm * qpsi_norm});
    out.margins.push_back({ids::bound_state_sup, sup(psi), 2.0 * qpsi_norm});
    psi_sup = std::max(psi_sup, sup(psi));
    for (std::size_t p = 0; p < N; ++p) pd[p] += overlap * psi[p];
  }
  std::vector<double> pac(N);
  for (std::size_t p = 0; p < N; ++p) pac[p] = qv[p] - pd[p];

  out.q_norm = l2(qv);
  out.pd_norm = l2(pd);
  out.pac_norm = l2(pac);
  out.pd_sup = sup(pd);
  out.pac_sup = sup(pac);
  const double rollnik = scatter::rollnik_norm(q, scatter::RollnikMethod::direct).direct;

  // empty spectrum: 0 <= 0
  out.margins.push_back(
      {ids::discrete_projection, out.pd_sup, 2.0 * out.q_norm * std::sqrt(rollnik) * psi_sup});
  const double q2 = out.q_norm * out.q_norm;
  out.margins.push_back({ids::continuous_projection,
                         out.q_norm > 0.0 ? out.pac_sup / out.q_norm : 0.0, C});
  out.margins.push_back({ids::parseval_split,
                         std::abs(q2 - out.pd_norm * out.pd_norm - out.pac_norm * out.pac_norm),
                         1e-10 * q2});
  const double qt_sup = spectral::spectral_sup_physical(q.q, 0);
  out.margins.push_back({ids::rollnik_plancherel, rollnik,
                         C * (out.q_norm + qt_sup) * (out.q_norm + qt_sup)});
  return out;
}

std::vector<ComponentCheck> scaled_component_checks(const FlowState& s, double dissipation, double A0,
                                                const ScatterSettings& settings,
                                                AuditReport* report) {
  const auto comps = scale_to_potentials(s, dissipation, A0);
  const Grid3& g = s.grid();
  const double kmax = settings.kmax > 0.0 ? settings.kmax : 0.95 * scatter::resolvable_k(g);
  const auto sphere = scatter::sphere_grid(settings.lebedev);
  const auto kg = scatter::k_grid(settings.nk, kmax);
  std::vector<ComponentCheck> out;
  for (int i = 0; i < 3; ++i) {
    scatter::PotentialSample q(comps[i], "velocity-" + std::to_string(i));
    ComponentCheck c;
    c.component = i;
    for (double v : q.q.values) c.max_abs = std::max(c.max_abs, std::abs(v));
    scatter::BornOptions bo;
    bo.warn_rollnik = false;
    c.ta_norm = scatter::ta_norm(scatter::born_series_amplitude(q, kg, sphere, settings.born_order, bo));
    c.bs_bound = scatter::birman_schwinger_bound(q);
    c.bound_states =
        c.max_abs == 0.0 ? 0 : scatter::bound_states(q, 64, scatter::EigenMethod::lanczos).count();
    if (report) {
      report->add({ids::scaled_ta_norm, c.ta_norm, 1.0});
      report->add({ids::scaled_bs_bound, c.bs_bound, 1.0});
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace nsaudit::audit
