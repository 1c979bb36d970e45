#pragma once
// Configuration, file formats and the run commands behind the CLI.
//
// Config: line-based `key = value`, `[section]` headers prefix keys with
// "section.", `#` starts a comment. Unknown keys are errors.
//
// Snapshot (.nsfs), little-endian: "NSFS", u32 version = 1, u32 n, f64 L,
// f64 t, u32 ncomp, then ncomp·n³ f64, component-major with x fastest.
//
// Amplitude table (.nsat), little-endian: "NSAT", u32 version = 1, u32 nk,
// u32 ns, u32 born_order, u32 id length, id bytes, nk f64 k values, ns
// nodes (3 f64 each), ns f64 weights, then nk·ns·ns (re, im) f64 pairs in
// table order.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsaudit/audit.hpp"
#include "nsaudit/flow.hpp"
#include "nsaudit/scattering.hpp"

namespace nsaudit::harness {

namespace fs = std::filesystem;

struct RunConfig {
  // resolved key → value text, in file order of first appearance
  std::vector<std::pair<std::string, std::string>> entries;

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;  // ConfigError when absent
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
};

// Every accepted key.
const std::vector<std::string>& known_keys();

// Parses and validates syntax, key names and numeric fields. Errors carry
// the line number.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const fs::path& path);
std::string format_config(const RunConfig& c);

enum class Command { simulate, audit, scatter, reconstruct, rollnik, selftest };
// Throws ConfigError naming the first missing key for the command.
void require_keys(const RunConfig& c, Command cmd);

Grid3 grid_of(const RunConfig& c);
flow::FluidParams fluid_of(const RunConfig& c);
flow::InitOptions init_of(const RunConfig& c);
flow::ForcingSpec forcing_of(const RunConfig& c);
audit::AuditOptions audit_options_of(const RunConfig& c, const Grid3& g);
audit::ScatterSettings scatter_settings_of(const RunConfig& c);

struct Snapshot {
  int n = 0;
  double length = 0.0;
  double t = 0.0;
  std::vector<std::vector<double>> comps;  // each n³, x fastest

  Grid3 grid() const { return Grid3(n, length); }
};

std::uintmax_t snapshot_bytes(int n, int ncomp);
void save_snapshot(const Snapshot& s, const fs::path& path);
Snapshot load_snapshot(const fs::path& path);
Snapshot snapshot_of(const flow::FlowState& s);
flow::FlowState flow_of(const Snapshot& s);
scatter::PotentialSample potential_of(const Snapshot& s, const std::string& id);

void save_table(const scatter::AmplitudeTable& A, const fs::path& path);
scatter::AmplitudeTable load_table(const fs::path& path);

// CSV report: fixed header, 17 significant digits, trailing comment lines
// with K, A0, verdicts, extra margins and the resolved config.
inline constexpr const char* report_header =
    "t,energy,dissipation,p_l2,mom2,mom4,sup0,sup1,sup2,C0,C2,C4,margin_36,margin_41,margin_42,"
    "margin_47,margin_48,margin_49,margin_52_min,duhamel_residual";
void write_report(const audit::AuditReport& r, const RunConfig& c, std::ostream& out);
void write_report(const audit::AuditReport& r, const RunConfig& c, const fs::path& path);

// Exit codes.
inline constexpr int exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_selftest = 3;

struct SimulateResult {
  audit::AuditReport report;
  std::size_t snapshots = 0;
};
// Evolves, writes snap_NNNNNN.nsfs every time.snapshot_every steps plus
// config.cfg and report.csv into out_dir.
SimulateResult simulate(const RunConfig& c, const fs::path& out_dir);

// Re-audits a run directory from its snapshots and config.cfg, adding the
// scaled-component and projection margins at the first and last snapshot.
audit::AuditReport audit_run(const fs::path& run_dir);

// Scaled-component checks and a projection audit on each scaled component,
// appended to `report` as extra margins. `dissipation` is ∫₀ᵀ‖∇q‖² over the
// whole run.
void add_scaled_checks(audit::AuditReport& report, const flow::FlowState& s, double dissipation,
                       const audit::ScatterSettings& settings, double C);

// potential.kind = gaussian on the config grid, with potential.amplitude
// and potential.width (default 1).
scatter::PotentialSample potential_from_config(const RunConfig& c);

scatter::AmplitudeTable scatter_table(const RunConfig& c, const scatter::PotentialSample& q);

// Targets: reconstruct.targets_n (default 9) points per axis at
// reconstruct.spacing (default 0.5), centred on (c, c, c) with
// c = reconstruct.centre. Energies are the comma-separated
// reconstruct.energies.
scatter::TargetGrid targets_of(const RunConfig& c);
std::vector<double> energies_of(const RunConfig& c);

// CSV: x,y,z,primary,literal,flagged.
void write_reconstruction(const scatter::Reconstruction& r, std::ostream& out);

struct SelftestLine {
  std::string name;
  bool ok = false;
  std::string detail;
};
std::vector<SelftestLine> selftest();

}  // namespace nsaudit::harness
