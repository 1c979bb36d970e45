#include <cmath>

#include "doctest.h"
#include "nsaudit/audit.hpp"

using namespace nsaudit;
using namespace nsaudit::audit;

namespace {

const Margin* find(const std::vector<Margin>& ms, const std::string& id) {
  for (const auto& m : ms)
    if (m.id == id) return &m;
  return nullptr;
}

}  // namespace

TEST_CASE("projection audit without bound states") {
  const Grid3 g(12, 8.0);
  const auto q = scatter::gaussian_potential(g, 0.8);  // repulsive: no bound states
  const auto states = scatter::bound_states(q);
  REQUIRE(states.count() == 0);
  const auto a = projection_audit(q, states);
  CHECK(a.pd_sup == 0.0);
  CHECK(find(a.margins, ids::bound_state_energy) == nullptr);
  REQUIRE(find(a.margins, ids::discrete_projection));
  CHECK(find(a.margins, ids::discrete_projection)->lhs == 0.0);
  CHECK(find(a.margins, ids::discrete_projection)->rhs == 0.0);
  const auto* c = find(a.margins, ids::continuous_projection);
  REQUIRE(c);
  double qmax = 0.0;
  for (double v : q.q.values) qmax = std::max(qmax, std::abs(v));
  CHECK(c->lhs == doctest::Approx(qmax / a.q_norm).epsilon(1e-14));
  CHECK(find(a.margins, ids::parseval_split)->lhs == 0.0);
  CHECK(find(a.margins, ids::rollnik_plancherel));
}

TEST_CASE("projection audit on a deep well") {
  const Grid3 g(16, 8.0);
  const auto q = scatter::gaussian_potential(g, -50.0);
  const auto states = scatter::bound_states(q);
  REQUIRE(states.count() > 0);
  const auto a = projection_audit(q, states);
  std::size_t energy = 0, sup = 0;
  for (const auto& m : a.margins) {
    if (m.id == ids::bound_state_energy) {
      ++energy;
      CHECK(m.margin() >= 0.0);
    }
    if (m.id == ids::bound_state_sup) {
      ++sup;
      CHECK(m.margin() >= 0.0);
    }
  }
  CHECK(energy == states.count());
  CHECK(sup == states.count());
  const auto* split = find(a.margins, ids::parseval_split);
  REQUIRE(split);
  CHECK(split->margin() >= 0.0);
  CHECK(a.pd_norm > 0.0);
  CHECK(find(a.margins, ids::discrete_projection));
}

TEST_CASE("scaled components of the zero flow") {
  const Grid3 g(16, 2 * std::numbers::pi);
  flow::FlowState s{0.0, spectral::SpectralVector(g)};
  ScatterSettings set;
  set.nk = 8;
  set.lebedev = 6;
  AuditReport report;
  const auto cs = scaled_component_checks(s, 0.0, 1.0, set, &report);
  REQUIRE(cs.size() == 3);
  for (const auto& c : cs) {
    CHECK(c.ta_norm == 0.0);
    CHECK(c.bs_bound == 0.0);
    CHECK(c.bound_states == 0);
  }
  CHECK(report.extra.size() == 6);
}
