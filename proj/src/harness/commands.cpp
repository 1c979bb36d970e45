#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "nsaudit/errors.hpp"
#include "nsaudit/harness.hpp"
#include "nsaudit/line.hpp"
#include "nsaudit/quadrature.hpp"
#include "nsaudit/simd.hpp"

namespace nsaudit::harness {

namespace {

std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06ld.nsfs", step);
  return buf;
}

std::vector<fs::path> snapshots_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("snap_", 0) == 0 && e.path().extension() == ".nsfs")
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void add_scaled_checks(audit::AuditReport& report, const flow::FlowState& s, double dissipation,
                       const audit::ScatterSettings& settings, double C) {
  const double A0 = report.constants.A0;
  audit::scaled_component_checks(s, dissipation, A0, settings, &report);
  const auto comps = audit::scale_to_potentials(s, dissipation, A0);
  for (int i = 0; i < 3; ++i) {
    scatter::PotentialSample q(comps[i], "velocity-" + std::to_string(i));
    const bool zero =
        std::all_of(q.q.values.begin(), q.q.values.end(), [](double v) { return v == 0.0; });
    const auto states = zero ? scatter::BoundStateSet{q.q.grid, {}, {}}
                             : scatter::bound_states(q, 64, scatter::EigenMethod::lanczos);
    for (auto& m : audit::projection_audit(q, states, C).margins) report.add(std::move(m));
  }
}

SimulateResult simulate(const RunConfig& c, const fs::path& out_dir) {
  require_keys(c, Command::simulate);
  const Grid3 g = grid_of(c);
  const auto params = fluid_of(c);
  const auto forcing = forcing_of(c);
  const auto opts = audit_options_of(c, g);
  const long every = c.integer_or("time.snapshot_every", 1);
  if (every < 1) throw ConfigError("time.snapshot_every must be >= 1");
  // The audit replay needs a uniform cadence, so no shortened last step.
  const double steps = params.t_end / params.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
    throw ConfigError("time.t_end must be a whole number of time.dt steps");

  fs::create_directories(out_dir);
  {
    std::ofstream cfg(out_dir / "config.cfg", std::ios::trunc);
    if (!cfg) throw ConfigError("cannot write into '" + out_dir.string() + "'");
    cfg << format_config(c);
  }

  SimulateResult res;
  audit::Auditor auditor(g, params, forcing, opts);
  long step = 0;
  const auto last = flow::evolve(init_flow(g, init_of(c)), params, forcing, [&](const flow::FlowState& s) {
    auditor.observe(s);
    if (step % every == 0) {
      save_snapshot(snapshot_of(s), out_dir / snapshot_name(step));
      ++res.snapshots;
    }
    ++step;
  });
  res.report = auditor.finish();
  add_scaled_checks(res.report, last, res.report.records.back().dissipation, scatter_settings_of(c),
                    opts.C);
  res.report.summarize();
  write_report(res.report, c, out_dir / "report.csv");
  return res;
}

audit::AuditReport audit_run(const fs::path& run_dir) {
  const RunConfig c = load_config(run_dir / "config.cfg");
  const auto files = snapshots_in(run_dir);
  if (files.empty()) throw ConfigError("no snapshots in '" + run_dir.string() + "'");
  const Grid3 g = grid_of(c);
  const auto params = fluid_of(c);
  const auto opts = audit_options_of(c, g);
  audit::Auditor auditor(g, params, forcing_of(c), opts);
  std::optional<flow::FlowState> first, last;
  for (const auto& f : files) {
    auto s = flow_of(load_snapshot(f));
    if (!(s.grid() == g)) throw ConfigError("'" + f.string() + "' does not match grid.n/grid.length");
    auditor.observe(s);
    if (!first) first = s;
    last = std::move(s);
  }
  auto report = auditor.finish();
  const double dissipation = report.records.back().dissipation;
  const auto settings = scatter_settings_of(c);
  add_scaled_checks(report, *first, dissipation, settings, opts.C);
  if (files.size() > 1) add_scaled_checks(report, *last, dissipation, settings, opts.C);
  report.summarize();
  return report;
}

scatter::PotentialSample potential_from_config(const RunConfig& c) {
  const std::string kind = c.text("potential.kind");
  if (kind != "gaussian") throw ConfigError("unknown potential.kind '" + kind + "'");
  const Grid3 g = grid_of(c);
  const double amp = c.number("potential.amplitude");
  const double width = c.number_or("potential.width", 1.0);
  if (!(width > 0.0)) throw ConfigError("potential.width must be positive");
  return scatter::gaussian_potential(g, amp, width);
}

scatter::AmplitudeTable scatter_table(const RunConfig& c, const scatter::PotentialSample& q) {
  const auto s = scatter_settings_of(c);
  if (s.nk < 1) throw ConfigError("scatter.nk must be >= 1");
  if (s.born_order < 1) throw ConfigError("scatter.born_order must be >= 1");
  if (s.kmax < 0.0) throw ConfigError("scatter.kmax must be >= 0");
  const double kmax = s.kmax > 0.0 ? s.kmax : 0.95 * scatter::resolvable_k(q.q.grid);
  try {
    return scatter::born_series_amplitude(q, scatter::k_grid(s.nk, kmax), scatter::sphere_grid(s.lebedev),
                                          s.born_order);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("scatter: ") + e.what());
  }
}

scatter::TargetGrid targets_of(const RunConfig& c) {
  scatter::TargetGrid t;
  t.n = static_cast<int>(c.integer_or("reconstruct.targets_n", 9));
  t.spacing = c.number_or("reconstruct.spacing", 0.5);
  if (t.n < 1 || !(t.spacing > 0.0)) throw ConfigError("reconstruct targets need n >= 1 and spacing > 0");
  const double centre = c.number_or("reconstruct.centre", 0.0);
  const double o = centre - 0.5 * (t.n - 1) * t.spacing;
  t.origin = {o, o, o};
  return t;
}

std::vector<double> energies_of(const RunConfig& c) {
  std::vector<double> z;
  std::stringstream ss(c.text("reconstruct.energies"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (...) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || !(v > 0.0) || !std::isfinite(v))
      throw ConfigError("reconstruct.energies: bad entry '" + item + "'");
    z.push_back(v);
  }
  if (z.size() < 3) throw ConfigError("reconstruct.energies needs at least 3 values");
  return z;
}

void write_reconstruction(const scatter::Reconstruction& r, std::ostream& out) {
  out << "x,y,z,primary,literal,flagged\n" << std::setprecision(17);
  const auto& t = r.targets;
  for (int l = 0; l < t.n; ++l)
    for (int j = 0; j < t.n; ++j)
      for (int i = 0; i < t.n; ++i) {
        const std::size_t p = (static_cast<std::size_t>(l) * t.n + j) * t.n + i;
        const auto x = t.point(i, j, l);
        out << x[0] << "," << x[1] << "," << x[2] << "," << r.primary[p] << "," << r.literal[p]
            << "," << (r.flagged[p] ? 1 : 0) << "\n";
      }
  out << "# energies=";
  for (std::size_t i = 0; i < r.z.size(); ++i) out << (i ? "," : "") << r.z[i];
  out << "\n# max_iterations=" << r.max_iterations << "\n";
}

std::vector<SelftestLine> selftest() {
  using std::numbers::pi;
  std::vector<SelftestLine> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  auto sci = [](double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
  };

  const auto plemelj = line::plemelj_selftest(line::default_battery());
  for (const auto& chk : plemelj.checks)
    add("plemelj " + chk.identity + " / " + chk.function, chk.ok(),
        "error " + sci(chk.error) + " tol " + sci(chk.tol));

  {
    const Grid3 g(32, 5.0);
    std::mt19937_64 rng(97);
    std::normal_distribution<double> nd;
    spectral::ScalarField f(g);
    for (auto& v : f.values) v = nd(rng);
    const auto back = spectral::to_physical(spectral::to_spectral(f));
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      err = std::max(err, std::abs(back.values[i] - f.values[i]));
      ref = std::max(ref, std::abs(f.values[i]));
    }
    add("fft round trip n=32", err <= 1e-12 * ref, "relative " + sci(err / ref));
    const double a = spectral::norm_l2(f), b = spectral::norm_l2(spectral::to_spectral(f));
    add("parseval n=32", std::abs(a - b) <= 1e-12 * a, "relative " + sci(std::abs(a - b) / a));
  }

  {
    const auto k = audit::compute_K(1.0, 1.0, 7.0);
    add("compute_K arithmetic", k.A0 == 1.0, "A0 " + sci(k.A0));
  }

  add("snapshot length n=8 ncomp=1", snapshot_bytes(8, 1) == 4128,
      std::to_string(snapshot_bytes(8, 1)) + " bytes");

  {
    const double r = quad::cube_mean_helmholtz(0.0, 1.0).real();
    add("cube mean of 1/r", std::abs(r - 2.380077363979553) < 1e-10, "value " + sci(r));
  }

  {
    const Grid3 g(32, 12.0);
    const auto q = scatter::gaussian_potential(g, 1.0);
    const auto r = scatter::rollnik_norm(q);
    const double exact = pi * pi * pi;
    const double worst = std::max(std::abs(r.direct / exact - 1), std::abs(r.spectral / exact - 1));
    add("rollnik gaussian vs pi^3", worst < 0.01 && r.gap() < 0.01,
        "direct " + sci(r.direct) + " spectral " + sci(r.spectral));
    const Grid3 c(16, 12.0);
    const auto a = scatter::rollnik_norm(scatter::gaussian_potential(c, 1.0));
    const auto h = scatter::rollnik_norm(scatter::gaussian_potential(c, 0.5));
    const double e = std::max(std::abs(h.direct / a.direct - 0.25), std::abs(h.spectral / a.spectral - 0.25));
    add("rollnik scaling", e <= 1e-10, "error " + sci(e));
  }

  {
    const Grid3 g(24, 10.0);
    const auto q = scatter::gaussian_potential(g, 0.3);
    const double k = 1.1;
    const Vec3 in{0, 0, 1}, outd{1, 0, 0};
    // Gaussian transform π^{3/2} e^{-|p|²/4} with the centre phase e^{ip·c}
    const Vec3 p{k * (in[0] - outd[0]), k * (in[1] - outd[1]), k * (in[2] - outd[2])};
    const double p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double cen = 5.0;
    const cplx phase = std::exp(cplx(0.0, cen * (p[0] + p[1] + p[2])));
    const cplx expect = -0.3 * std::pow(pi, 1.5) * std::exp(-p2 / 4) * phase / (4 * pi);
    const cplx got = scatter::born_amplitude(q, k, outd, in);
    const double err = std::abs(got - expect) / std::abs(expect);
    add("born gaussian closed form", err < 1e-6, "relative " + sci(err));
  }

  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 1003;
    std::vector<cplx> x(n);
    std::vector<double> a(n), px(n), py(n), pz(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = {u(rng), u(rng)};
      a[i] = u(rng);
      px[i] = std::floor(8 * u(rng));
      py[i] = std::floor(8 * u(rng));
      pz[i] = std::floor(8 * u(rng));
      w[i] = u(rng);
    }
    const auto& s = simd::scalar_kernels();
    const auto& v = simd::kernels();
    const double e1 = std::abs(s.sum_abs2(x.data(), n) - v.sum_abs2(x.data(), n));
    const double e2 = std::abs(s.inverse_square_sum(px.data(), py.data(), pz.data(), w.data(), n, 0.5, 0.5, 0.5) -
                               v.inverse_square_sum(px.data(), py.data(), pz.data(), w.data(), n, 0.5, 0.5, 0.5));
    add(std::string("simd ") + std::string(simd::isa_name(simd::active_isa())) + " vs scalar",
        e1 < 1e-10 && e2 < 1e-10, "differences " + sci(e1) + ", " + sci(e2));
  }
  return out;
}

}  // namespace nsaudit::harness
