#pragma once
// Run-time auditing of a Navier-Stokes trajectory: energy, pressure, moment
// and spectral-sup estimates, the Duhamel replay and the constants that feed
// the contraction argument. Every estimate is recorded as (lhs, rhs) with
// margin = rhs - lhs.
//
// PASS-class entries are identities or bounds that the discrete system must
// satisfy; MONITOR-class entries are computed and reported, never asserted.

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nsaudit/flow.hpp"
#include "nsaudit/scattering.hpp"

namespace nsaudit::audit {

using flow::FlowState;
using flow::FluidParams;
using flow::ForcingSpec;
using spectral::ScalarField;
using spectral::SpectralVector;

enum class Class { pass, monitor };

// Identifiers of every audited inequality.
namespace ids {
inline constexpr const char* energy_inequality = "energy-inequality";
inline constexpr const char* energy_balance = "energy-balance";
inline constexpr const char* pressure_l2 = "pressure-l2";
inline constexpr const char* pressure_gradient = "pressure-gradient";
inline constexpr const char* moment_x2 = "moment-x2";
inline constexpr const char* moment_x4 = "moment-x4";
inline constexpr const char* moment_k1 = "moment-k1";
inline constexpr const char* moment_k2 = "moment-k2";
inline constexpr const char* sup_k0 = "sup-k0";
inline constexpr const char* sup_k1 = "sup-k1";
inline constexpr const char* sup_k2 = "sup-k2";
inline constexpr const char* difference_bound = "difference-bound";
inline constexpr const char* duhamel_replay = "duhamel-replay";
inline constexpr const char* bound_state_energy = "bound-state-energy";
inline constexpr const char* bound_state_sup = "bound-state-sup";
inline constexpr const char* discrete_projection = "discrete-projection";
inline constexpr const char* continuous_projection = "continuous-projection";
inline constexpr const char* parseval_split = "parseval-split";
inline constexpr const char* rollnik_plancherel = "rollnik-plancherel";
inline constexpr const char* contraction_constant = "contraction-constant";
inline constexpr const char* scaled_ta_norm = "scaled-ta-norm";
inline constexpr const char* scaled_bs_bound = "scaled-bs-bound";
}  // namespace ids

struct InequalityInfo {
  const char* id;
  Class cls;
  double tol;  // an entry passes when lhs <= rhs + tol·|rhs|
  const char* description;
};

// Every inequality, each exactly once.
const std::vector<InequalityInfo>& inequality_registry();
const InequalityInfo& inequality_info(const std::string& id);

struct Margin {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

struct AuditRecord {
  double t = 0.0;
  double energy = 0.0;       // ‖q‖²
  double dissipation = 0.0;  // ∫₀ᵗ ‖∇q‖² dτ
  double pressure_norm = 0.0;
  double mom2 = 0.0, mom4 = 0.0;  // ∫|x - c|^{2m} |q|², m = 1, 2
  bool decay_warning = false;
  double kgrad1 = 0.0, kgrad2 = 0.0;  // ‖∇_k q̃‖, ‖∇²_k q̃‖ over dk
  std::array<double, 3> sup{};       // max_k |∇_k^m q̃|
  double C0 = 0.0, C2 = 0.0, C4 = 0.0;
  double balance_residual = 0.0;  // E(t) + 2ν∫‖∇q‖² - E(0) - 2∫⟨f, q⟩
  double pair_margin_min = 0.0;
  std::vector<double> pair_margins;
  double duhamel_residual = 0.0;
  std::vector<Margin> margins;

  const Margin& margin(const std::string& id) const;
};

// Sample point |k|(e_k - e_λ) of the difference bound.
struct PairSpec {
  double k = 0.0;
  Vec3 e_k{}, e_l{};
};

// 8 direction pairs × 4 magnitudes placing |k||e_k - e_λ| inside the
// dealiased band; pairs with |e_k - e_λ| < 0.1 are skipped.
std::vector<PairSpec> default_pairs(const Grid3& g);

struct AuditOptions {
  double C = 1.0;
  std::vector<PairSpec> pairs;  // empty: default_pairs
  double moment_factor = 10.0;
  double balance_tol = 1e-4;  // relative to E(0)
  double duhamel_tol = 1e-4;
};

struct ConstantsK {
  double A0 = 0.0;
  double K = 0.0;
  bool contractive = false;  // denominator > 0
  bool pass = false;         // contractive and K <= 8/7
};

// A₀ = 4 / (ν^{1/3} (C·C₀ + 1)^{2/3}) and
// K = (ν/A₀)^{1/2} ((ν/A₀)^{1/2} - 4π C C₀ / A₀²)⁻¹.
ConstantsK compute_K(double nu, double C, double C0);

struct Verdict {
  std::string id;
  Class cls = Class::monitor;
  bool present = false;
  bool ok = false;  // PASS class: all entries within tolerance. MONITOR: all margins >= 0
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_time = 0.0;
  std::size_t count = 0;
  std::string label() const;  // PASS | FAIL | MONITOR+ | MONITOR- | MISSING
};

struct AuditReport {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<AuditRecord> records;
  // Margins without a time series (projection, Rollnik, scaled potentials).
  std::vector<Margin> extra;
  double C = 1.0;
  ConstantsK constants;
  std::vector<Verdict> verdicts;

  void add(Margin m) { extra.push_back(std::move(m)); }
  // Rebuilds verdicts from records and extra margins.
  void summarize();
  const Verdict& verdict(const std::string& id) const;
  std::vector<std::string> monitor_ids() const;
  bool all_pass() const;
};

// Streaming auditor. The first observed state is the initial condition;
// later states must follow at a uniform cadence (the Duhamel replay uses
// composite Simpson weights, with a 3/8 panel when the interval count is
// odd and a trapezoid for the very first interval).
class Auditor {
 public:
  Auditor(const Grid3& g, const FluidParams& params, ForcingSpec forcing, AuditOptions opts = {});

  void observe(const FlowState& s);
  const std::vector<AuditRecord>& records() const { return records_; }
  AuditReport finish() const;

 private:
  struct Replay;
  Grid3 grid_;
  FluidParams params_;
  ForcingSpec forcing_;
  AuditOptions opts_;
  std::vector<AuditRecord> records_;

  SpectralVector q0_;
  double e0_ = 0.0, forcing_norm_qt_ = 0.0;
  std::array<double, 4> moment_scale_{};
  std::array<double, 3> sup0_{};
  double h_ = 0.0;
  double prev_t_ = 0.0, prev_g_ = 0.0, prev_work_ = 0.0;
  std::array<double, 2> prev_wgrad_{}, prev_kdiss_{};
  std::array<double, 3> prev_c_{};
  double sup_energy_ = 0.0, sup_kgrad1_ = 0.0, sup_kgrad2_ = 0.0;
  double work_ = 0.0;
  std::array<double, 2> wgrad_int_{}, kdiss_int_{};
  std::shared_ptr<Replay> replay_;
};

// Literal energy inequality margins and balance residuals for a history.
struct EnergyAudit {
  std::vector<double> margins;
  std::vector<double> balance;
};
EnergyAudit audit_energy(const std::vector<FlowState>& history, const ForcingSpec& f, double nu);

// Pressure L2 bound and pointwise gradient bound (min over k ≠ 0).
struct PressureAudit {
  double norm = 0.0;
  Margin l2;
  Margin gradient;
};
PressureAudit audit_pressure(const FlowState& s, const SpectralVector& forcing, bool dealias = true);

// (C₀, C₂, C₄): trapezoid integrals of max_k |∇_k^m F̃₁|² with F̃₁ the Duhamel
// integrand.
std::array<double, 3> compute_C(const std::vector<FlowState>& history, const ForcingSpec& f,
                                double nu);

// Difference-bound margins, one vector of per-pair margins per state.
std::vector<std::vector<double>> difference_bound_audit(const std::vector<FlowState>& history,
                                                        const ForcingSpec& f, double nu,
                                                        const std::vector<PairSpec>& pairs);

// max_k |replayed - stored| / max_k |stored| at the final time. Needs at
// least 3 states at uniform spacing.
double duhamel_residual(const std::vector<FlowState>& history, const ForcingSpec& f, double nu);

// Runs a full Auditor over a stored history.
AuditReport audit_history(const std::vector<FlowState>& history, const ForcingSpec& f, double nu,
                          AuditOptions opts = {});

// q'_i = q_i / (∫₀ᵀ ‖∇q‖² dt + A₀ + 1) for each velocity component.
std::array<ScalarField, 3> scale_to_potentials(const FlowState& s, double dissipation, double A0);

// Bound-state and projection margins for a potential: E_j² vs ∫|qψ_j|² and
// max|ψ_j| vs 2‖qψ_j‖ per state, max|P_D q| vs 2‖q‖‖q‖_R max|ψ|, the
// realized max|P_Ac q|/‖q‖ against C, the Parseval split and the Rollnik
// Plancherel bound ∬|q||q|/|x - y|² vs C(‖q‖ + max|q̃|)². ‖q‖_R is the
// square root of the Rollnik double integral.
struct ProjectionAudit {
  std::vector<Margin> margins;
  double pd_sup = 0.0, pac_sup = 0.0;
  double q_norm = 0.0, pd_norm = 0.0, pac_norm = 0.0;
};
ProjectionAudit projection_audit(const scatter::PotentialSample& q,
                                 const scatter::BoundStateSet& states, double C = 1.0);

struct ScatterSettings {
  int nk = 64;
  double kmax = 0.0;  // 0: 0.95 of the resolvable k
  int lebedev = 26;
  int born_order = 1;
};

struct ComponentCheck {
  int component = 0;
  double ta_norm = 0.0;
  double bs_bound = 0.0;
  std::size_t bound_states = 0;
  double max_abs = 0.0;
};

// Scales each velocity component by (∫‖∇q‖² + A₀ + 1) and evaluates the
// TA norm of its amplitude table, the Birman-Schwinger bound and the bound
// state count. Adds scaled-ta-norm and scaled-bs-bound margins to `report`
// when given.
std::vector<ComponentCheck> scaled_component_checks(const FlowState& s, double dissipation, double A0,
                                                const ScatterSettings& settings,
                                                AuditReport* report = nullptr);

}  // namespace nsaudit::audit
