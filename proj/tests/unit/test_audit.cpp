#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "nsaudit/audit.hpp"
#include "nsaudit/errors.hpp"

using namespace nsaudit;
using namespace nsaudit::audit;
using std::numbers::pi;

namespace {

FlowState init(const std::string& name, int n, double amplitude = 1.0) {
  flow::InitOptions opts;
  opts.name = name;
  opts.amplitude = amplitude;
  opts.seed = 4;
  return flow::init_flow(Grid3(n, 2 * pi), opts);
}

std::vector<FlowState> history(FlowState s, const FluidParams& p,
                               const ForcingSpec& f = ForcingSpec::none()) {
  std::vector<FlowState> out;
  flow::evolve(std::move(s), p, f, [&](const FlowState& st) { out.push_back(st); });
  return out;
}

FlowState shear(int n, double a) {
  const Grid3 g(n, 2 * pi);
  spectral::VectorField f(g);
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i) f.comp[0][g.index(i, b, c)] = a * std::sin(g.point(i, b, c)[1]);
  return {0.0, spectral::to_spectral(f)};
}

}  // namespace

TEST_CASE("compute_K arithmetic") {
  const auto unit = compute_K(1.0, 1.0, 7.0);
  CHECK(unit.A0 == 1.0);
  CHECK(compute_K(8.0, 1.0, 0.0).A0 == doctest::Approx(2.0).epsilon(1e-15));

  // Both algebraic forms of K agree.
  for (double cc0 : {1e-3, 0.05, 0.5, 3.0}) {
    const double nu = 0.3;
    const auto k = compute_K(nu, 1.0, cc0);
    const double alt = std::sqrt(nu) / (std::sqrt(nu) - 4 * pi * cc0 / std::pow(k.A0, 1.5));
    CHECK(k.K == doctest::Approx(alt).epsilon(1e-12));
    CHECK(k.contractive == (alt > 0));
  }
  CHECK(compute_K(0.3, 1.0, 1e-3).pass);
  CHECK_FALSE(compute_K(1.0, 1.0, 7.0).contractive);

  double prev = compute_K(0.5, 1.0, 0.0).A0;
  for (double cc0 : {0.1, 1.0, 10.0}) {
    const double a = compute_K(0.5, 1.0, cc0).A0;
    CHECK(a < prev);
    prev = a;
  }
  CHECK_THROWS_AS(compute_K(0.0, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(compute_K(1.0, -1.0, 1.0), InvalidInput);
}

TEST_CASE("registry lists each inequality once with the expected PASS set") {
  std::set<std::string> seen, pass;
  for (const auto& info : inequality_registry()) {
    CHECK(seen.insert(info.id).second);
    if (info.cls == Class::pass) pass.insert(info.id);
  }
  const std::set<std::string> expected = {ids::energy_balance,   ids::difference_bound,
                                          ids::duhamel_replay,   ids::bound_state_energy,
                                          ids::bound_state_sup,  ids::parseval_split};
  CHECK(pass == expected);
  CHECK_THROWS(inequality_info("no-such-id"));
}

TEST_CASE("zero flow gives zero margins and constants") {
  const Grid3 g(8, 2 * pi);
  std::vector<FlowState> h;
  for (int i = 0; i < 4; ++i) h.push_back({0.1 * i, SpectralVector(g)});
  const auto report = audit_history(h, ForcingSpec::none(), 0.5);
  for (const auto& r : report.records) {
    CHECK(r.C0 == 0.0);
    CHECK(r.C2 == 0.0);
    CHECK(r.C4 == 0.0);
    CHECK(r.dissipation == 0.0);
    CHECK(r.balance_residual == 0.0);
    CHECK(r.duhamel_residual == 0.0);
    for (const auto& m : r.margins) {
      CAPTURE(m.id);
      CHECK(m.lhs == 0.0);
      if (m.id != std::string(ids::duhamel_replay)) CHECK(m.rhs == 0.0);
    }
  }
  const auto potentials = scale_to_potentials(h.back(), 0.0, report.constants.A0);
  for (const auto& p : potentials)
    for (double v : p.values) CHECK(v == 0.0);
}

TEST_CASE("Stokes-regime shear flow: exact replay and literal energy margin") {
  const double nu = 0.2;
  const auto h = history(shear(8, 1.3), {nu, 0.05, 1.0});
  CHECK(duhamel_residual(h, ForcingSpec::none(), nu) <= 1e-14);
  const auto report = audit_history(h, ForcingSpec::none(), nu);
  double prev_sup = report.records.front().sup[0];
  for (const auto& r : report.records) {
    CHECK(r.duhamel_residual <= 1e-14);
    CHECK(r.sup[0] <= prev_sup * (1 + 1e-15));
    prev_sup = r.sup[0];
    // sup ‖q‖² is the initial energy, so the literal margin is -∫‖∇q‖².
    const auto& m = r.margin(ids::energy_inequality);
    CHECK(m.margin() == doctest::Approx(-r.dissipation).epsilon(1e-12));
  }
  const auto e = audit_energy(h, ForcingSpec::none(), nu);
  CHECK(e.margins.size() == h.size());
}

TEST_CASE("Taylor-Green run: PASS-class audits hold and integrals grow") {
  const double nu = 0.1;
  const auto h = history(init("taylor-green", 16), {nu, 0.01, 0.5});
  const auto report = audit_history(h, ForcingSpec::none(), nu);
  const auto e0 = report.records.front().energy;
  for (std::size_t i = 1; i < report.records.size(); ++i) {
    const auto &a = report.records[i - 1], &b = report.records[i];
    CHECK(b.dissipation >= a.dissipation);
    CHECK(b.C0 >= a.C0);
    CHECK(b.C2 >= a.C2);
    CHECK(b.C4 >= a.C4);
    CHECK(std::abs(b.balance_residual) <= 1e-4 * e0);
    CHECK(b.duhamel_residual <= 1e-4);
  }
  CHECK(report.verdict(ids::energy_balance).label() == "PASS");
  CHECK(report.verdict(ids::duhamel_replay).label() == "PASS");
  CHECK(report.verdict(ids::difference_bound).label() == "PASS");
  CHECK(report.verdict(ids::contraction_constant).present);
  CHECK(std::isfinite(report.records.back().C0));
  // at t = 0 the difference bound is tight: C0 = 0 and both sides agree
  for (double m : report.records.front().pair_margins) CHECK(m == doctest::Approx(0.0));
}

TEST_CASE("C0 is stable under halving the audit cadence") {
  const double nu = 0.1;
  const auto h = history(init("taylor-green", 16), {nu, 0.01, 0.4});
  std::vector<FlowState> every_other;
  for (std::size_t i = 0; i < h.size(); i += 2) every_other.push_back(h[i]);
  const auto fine = compute_C(h, ForcingSpec::none(), nu);
  const auto coarse = compute_C(every_other, ForcingSpec::none(), nu);
  CHECK(coarse[0] == doctest::Approx(fine[0]).epsilon(0.01));
}

TEST_CASE("Duhamel replay residual falls with the step size") {
  const double nu = 0.1;
  auto residual = [&](double dt) {
    return duhamel_residual(history(init("taylor-green", 16), {nu, dt, 0.4}), ForcingSpec::none(), nu);
  };
  const double coarse = residual(0.04), fine = residual(0.01);
  MESSAGE("replay residual " << coarse << " -> " << fine);
  CHECK(fine < coarse / 8);
}

TEST_CASE("pressure audit matches the Poisson norm and handles forcing-only states") {
  const auto s = init("random-solenoidal", 16);
  const auto pa = audit_pressure(s, SpectralVector(s.grid()));
  CHECK(pa.norm == doctest::Approx(spectral::norm_l2(flow::pressure_from_velocity(s, SpectralVector(s.grid())))));
  CHECK(pa.l2.rhs > 0.0);

  const FlowState still{0.0, SpectralVector(s.grid())};
  const auto zero = audit_pressure(still, SpectralVector(s.grid()));
  CHECK(zero.l2.lhs == 0.0);
  CHECK(zero.gradient.margin() == 0.0);

  const auto f = flow::forcing_at(ForcingSpec::analytic("gradient", 1.0), s.grid(), 0.0);
  const auto forced = audit_pressure(still, f);
  CHECK(forced.norm > 0.0);
  CHECK(std::isfinite(forced.gradient.margin()));
}

TEST_CASE("moment series satisfy the k-space Parseval cross-check") {
  const auto s = init("random-solenoidal", 16);
  const auto report = audit_history({s}, ForcingSpec::none(), 0.1);
  const auto& r = report.records.front();
  CHECK(r.mom2 == doctest::Approx(r.kgrad1 * r.kgrad1 / std::pow(2 * pi, 3)).epsilon(1e-6));
  CHECK(r.mom4 > 0.0);
  CHECK(r.kgrad2 > 0.0);
  for (const char* id : {ids::moment_x2, ids::moment_x4, ids::moment_k1, ids::moment_k2})
    CHECK(r.margin(id).margin() > 0.0);
}

TEST_CASE("every time-series inequality appears once per record") {
  const auto h = history(init("taylor-green", 8), {0.1, 0.1, 0.3});
  const auto report = audit_history(h, ForcingSpec::none(), 0.1);
  for (const auto& r : report.records) {
    std::set<std::string> ids_seen;
    for (const auto& m : r.margins) CHECK(ids_seen.insert(m.id).second);
    CHECK(ids_seen.size() == 13);
  }
  CHECK(report.monitor_ids().size() == inequality_registry().size() - 6);
}

TEST_CASE("auditor input validation") {
  const Grid3 g(8, 2 * pi);
  std::vector<FlowState> h = {{0.0, SpectralVector(g)}, {0.1, SpectralVector(g)}};
  CHECK_THROWS_AS(duhamel_residual(h, ForcingSpec::none(), 0.1), InvalidInput);
  h.push_back({0.35, SpectralVector(g)});
  CHECK_THROWS_AS(audit_history(h, ForcingSpec::none(), 0.1), InvalidInput);

  AuditOptions bad;
  bad.pairs = {{1.0, {1, 0, 0}, {1, 0, 0}}};
  CHECK_THROWS_AS(Auditor(g, {0.1, 0.1, 1.0}, ForcingSpec::none(), bad), InvalidInput);

  // denominator of the potential scaling is at least A0 + 1
  const auto s = init("taylor-green", 8);
  const auto q = scale_to_potentials(s, 0.0, 0.0);
  const auto raw = spectral::to_physical(s.u);
  CHECK(q[0].values[5] == doctest::Approx(raw.comp[0][5]));
}
