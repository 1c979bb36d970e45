// nsaudit: simulate, audit, scatter, reconstruct, rollnik, selftest.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "nsaudit/errors.hpp"
#include "nsaudit/harness.hpp"

using namespace nsaudit;
using namespace nsaudit::harness;

namespace {

void print_verdicts(const audit::AuditReport& r) {
  for (const auto& v : r.verdicts)
    std::cout << std::left << std::setw(24) << v.id << " " << std::setw(9) << v.label()
              << " worst margin " << std::setprecision(6) << v.worst_margin << "\n";
  std::cout << "K = " << std::setprecision(17) << r.constants.K
            << (r.constants.contractive ? "" : " (NOT-CONTRACTIVE)") << ", A0 = " << r.constants.A0
            << "\n";
}

scatter::PotentialSample potential_arg(const std::string& file, const std::string& config) {
  if (!file.empty()) return potential_of(load_snapshot(file), fs::path(file).stem().string());
  if (config.empty()) throw ConfigError("need --potential or --config with potential.* keys");
  return potential_from_config(load_config(config));
}

int run(int argc, char** argv) {
  CLI::App app{"Navier-Stokes estimate auditor and inverse-scattering toolkit"};
  app.require_subcommand(1);

  std::string config, out, run_dir, report, potential, table, method = "both", save_potential;
  std::string bound_potential;

  auto* sim = app.add_subcommand("simulate", "advance a flow, writing snapshots and report.csv");
  sim->add_option("--config", config, "run config")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "output directory")->required();

  auto* aud = app.add_subcommand("audit", "recompute every margin from a run directory");
  aud->add_option("--run", run_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);
  aud->add_option("--report", report, "CSV report path")->required();

  auto* sca = app.add_subcommand("scatter", "build an amplitude table from a potential");
  sca->add_option("--config", config, "config with scatter.* keys")->required()->check(CLI::ExistingFile);
  sca->add_option("--potential", potential, "potential snapshot (1 component)")->check(CLI::ExistingFile);
  sca->add_option("--out", table, "table path (.nsat)")->required();
  sca->add_option("--save-potential", save_potential, "also write the potential as a snapshot");

  auto* rec = app.add_subcommand("reconstruct", "invert an amplitude table to a potential estimate");
  rec->add_option("--config", config, "config with reconstruct.* keys")->required()->check(CLI::ExistingFile);
  rec->add_option("--table", table, "amplitude table")->required()->check(CLI::ExistingFile);
  rec->add_option("--bound-states", bound_potential,
                  "potential snapshot whose bound states enter the Blaschke factor")
      ->check(CLI::ExistingFile);
  rec->add_option("--out", out, "CSV output (default stdout)");

  auto* rol = app.add_subcommand("rollnik", "Rollnik norm and Birman-Schwinger bound");
  rol->add_option("--potential", potential, "potential snapshot (1 component)")->check(CLI::ExistingFile);
  rol->add_option("--config", config, "config with potential.* keys")->check(CLI::ExistingFile);
  rol->add_option("--method", method, "direct, spectral or both")
      ->check(CLI::IsMember({"direct", "spectral", "both"}));

  auto* self = app.add_subcommand("selftest", "identity battery, Parseval and oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (*sim) {
    const auto cfg = load_config(config);
    const auto res = simulate(cfg, out);
    std::cout << "snapshots: " << res.snapshots << ", records: " << res.report.records.size() << "\n";
    print_verdicts(res.report);
    return exit_ok;
  }
  if (*aud) {
    const auto r = audit_run(run_dir);
    write_report(r, load_config(fs::path(run_dir) / "config.cfg"), fs::path(report));
    print_verdicts(r);
    return exit_ok;
  }
  if (*sca) {
    const auto cfg = load_config(config);
    require_keys(cfg, Command::scatter);
    const auto q = potential.empty() ? potential_from_config(cfg)
                                     : potential_of(load_snapshot(potential), fs::path(potential).stem().string());
    if (!save_potential.empty()) {
      Snapshot s{q.q.grid.n(), q.q.grid.length(), 0.0, {q.q.values}};
      save_snapshot(s, save_potential);
    }
    const auto A = scatter_table(cfg, q);
    save_table(A, table);
    std::cout << "table: nk " << A.nk() << ", ns " << A.ns() << ", kmax " << A.kmax() << ", order "
              << A.born_order << "\n";
    for (const auto& w : A.warnings) std::cerr << "warning: " << w << "\n";
    return exit_ok;
  }
  if (*rec) {
    const auto cfg = load_config(config);
    require_keys(cfg, Command::reconstruct);
    const auto A = load_table(table);
    scatter::Blaschke delta = scatter::no_bound_states();
    if (!bound_potential.empty()) {
      const auto q = potential_of(load_snapshot(bound_potential), "bound");
      delta = scatter::blaschke_of(scatter::bound_states(q));
    }
    const auto r = scatter::reconstruct_potential(A, delta, targets_of(cfg), energies_of(cfg));
    if (out.empty()) {
      write_reconstruction(r, std::cout);
    } else {
      std::ofstream f(out, std::ios::trunc);
      if (!f) throw ConfigError("cannot write '" + out + "'");
      write_reconstruction(r, f);
    }
    return exit_ok;
  }
  if (*rol) {
    const auto q = potential_arg(potential, config);
    const auto m = method == "direct"   ? scatter::RollnikMethod::direct
                   : method == "spectral" ? scatter::RollnikMethod::spectral
                                          : scatter::RollnikMethod::both;
    const auto v = scatter::rollnik_norm(q, m);
    std::cout << std::setprecision(17);
    if (m != scatter::RollnikMethod::spectral) std::cout << "direct   " << v.direct << "\n";
    if (m != scatter::RollnikMethod::direct) std::cout << "spectral " << v.spectral << "\n";
    if (m == scatter::RollnikMethod::both)
      std::cout << "ratio    " << v.direct / v.spectral << "\ngap      " << v.gap() << "\n";
    const double direct = m == scatter::RollnikMethod::spectral ? v.spectral : v.direct;
    std::cout << "birman-schwinger bound " << direct / (16 * std::numbers::pi * std::numbers::pi) << "\n";
    return exit_ok;
  }
  if (*self) {
    bool ok = true;
    for (const auto& l : selftest()) {
      std::cout << (l.ok ? "ok   " : "FAIL ") << l.name << " (" << l.detail << ")\n";
      ok = ok && l.ok;
    }
    return ok ? exit_ok : exit_selftest;
  }
  return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}
