#include "nsaudit/line.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nsaudit/errors.hpp"
#include "nsaudit/spectral.hpp"

namespace nsaudit::line {

using std::numbers::pi;
constexpr cplx I{0.0, 1.0};

double lorentz(double s) { return 1.0 / (pi * (1.0 + s * s)); }
double lorentz_hl(double s) { return s / (pi * (1.0 + s * s)); }

namespace {

bool ends_small(const std::vector<cplx>& v) {
  double peak = 0.0;
  for (const auto& z : v) peak = std::max(peak, std::abs(z));
  return std::abs(v.front()) <= 1e-3 * peak && std::abs(v.back()) <= 1e-3 * peak;
}

}  // namespace

LineFunction::LineFunction(double S, std::vector<cplx> samples, bool decays, cplx a, cplx b)
    : S_(S), samples_(std::move(samples)), decays_(decays), a_(a), b_(b) {
  const std::size_t m = samples_.size();
  if (!(S > 0.0) || !std::isfinite(S)) throw InvalidInput("line function needs S > 0");
  if (m < 64 || (m & (m - 1)) != 0)
    throw InvalidInput("line function needs a power-of-two sample count >= 64");
  if (decays_ && !ends_small(samples_))
    throw InvalidInput("line function flagged as decaying is not small at the ends");
}

LineFunction LineFunction::sample(double S, int m, const std::function<cplx(double)>& f,
                                  bool decays) {
  if (m < 64) throw InvalidInput("line function needs m >= 64");
  std::vector<cplx> v(m);
  const double h = 2.0 * S / m;
  for (int j = 0; j < m; ++j) v[j] = f(-S + (j + 0.5) * h);
  return LineFunction(S, std::move(v), decays);
}

cplx LineFunction::value(int j) const {
  const double s = node(j);
  return samples_[j] + a_ * lorentz(s) + b_ * lorentz_hl(s);
}

std::vector<cplx> LineFunction::values() const {
  std::vector<cplx> v(samples_.size());
  for (int j = 0; j < m(); ++j) v[j] = value(j);
  return v;
}

LineFunction LineFunction::operator+(const LineFunction& o) const {
  if (o.m() != m() || o.S_ != S_) throw InvalidInput("line functions on different grids");
  std::vector<cplx> v(samples_);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += o.samples_[j];
  return LineFunction(S_, std::move(v), false, a_ + o.a_, b_ + o.b_).with_decay(decays_ && o.decays_);
}

LineFunction LineFunction::operator-(const LineFunction& o) const { return *this + o * -1.0; }

LineFunction LineFunction::operator*(cplx s) const {
  std::vector<cplx> v(samples_);
  for (auto& z : v) z *= s;
  return LineFunction(S_, std::move(v), false, a_ * s, b_ * s).with_decay(decays_);
}

LineFunction LineFunction::with_decay(bool flag) const {
  LineFunction out = *this;
  out.decays_ = flag;
  return out;
}

double LineFunction::sup(double r) const {
  double out = 0.0;
  for (int j = 0; j < m(); ++j)
    if (std::abs(node(j)) <= r) out = std::max(out, std::abs(value(j)));
  return out;
}

LineFunction cauchy_project(const LineFunction& f, Side side) {
  if (!f.decays())
    throw InvalidInput("cauchy_project needs a decaying line function (decay flag unset)");
  const int m = f.m();

  // Move the discrete mass into the L tail.
  std::vector<cplx> r = f.samples();
  cplx mass{};
  double lmass = 0.0;
  for (int j = 0; j < m; ++j) {
    mass += r[j];
    lmass += lorentz(f.node(j));
  }
  const cplx alpha = mass / lmass;
  for (int j = 0; j < m; ++j) r[j] -= alpha * lorentz(f.node(j));
  const cplx A = f.tail_l() + alpha, B = f.tail_hl();

  std::vector<cplx> t = r;
  spectral::fft1_inplace(t, -1);
  for (int k = 0; k < m; ++k) t[k] *= (k < m / 2 ? 0.5 : -0.5) / m;
  spectral::fft1_inplace(t, +1);

  cplx a = -0.5 * I * B, b = 0.5 * I * A;
  const double sign = side == Side::plus ? 0.5 : side == Side::minus ? -0.5 : 0.0;
  for (int j = 0; j < m; ++j) t[j] += sign * r[j];
  a += sign * A;
  b += sign * B;
  LineFunction out(f.half_width(), std::move(t), false, a, b);
  return out.with_decay(true);
}

bool PlemeljReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.ok(); });
}

std::string PlemeljReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.ok() ? "ok   " : "FAIL ") << c.identity << " [" << c.function << "] error "
       << c.error << " (tol " << c.tol << ")\n";
  return os.str();
}

std::vector<NamedLineFunction> default_battery(double S, int m) {
  std::vector<NamedLineFunction> out;
  out.push_back({"gaussian", LineFunction::sample(S, m, [](double s) { return cplx(std::exp(-s * s)); })});
  out.push_back({"lorentzian", LineFunction::sample(S, m, [](double s) { return cplx(1.0 / (1.0 + s * s)); })});
  out.push_back({"bump", LineFunction::sample(S, m, [](double s) {
                   return std::abs(s) < 1.0 ? cplx(std::exp(-1.0 / (1.0 - s * s))) : cplx{};
                 })});
  return out;
}

PlemeljReport plemelj_selftest(const std::vector<NamedLineFunction>& battery) {
  PlemeljReport rep;
  auto diff = [](const LineFunction& x, const LineFunction& y) {
    return (x - y).with_decay(true).sup(x.half_width());
  };
  for (const auto& [name, f] : battery) {
    const auto T = cauchy_project(f, Side::principal);
    const auto Tp = cauchy_project(f, Side::plus);
    const auto Tm = cauchy_project(f, Side::minus);
    const double tol = 1e-8;
    rep.checks.push_back({"TT = I/4", name, diff(cauchy_project(T, Side::principal), f * 0.25), tol});
    rep.checks.push_back({"TT+ = T+/2", name, diff(cauchy_project(Tp, Side::principal), Tp * 0.5), tol});
    rep.checks.push_back({"TT- = -T-/2", name, diff(cauchy_project(Tm, Side::principal), Tm * -0.5), tol});
    rep.checks.push_back({"T+ = T + I/2", name, diff(Tp, T + f * 0.5), tol});
    rep.checks.push_back({"T- = T - I/2", name, diff(Tm, T - f * 0.5), tol});
  }

  // Jump reconstruction with Φ₊ = 1/(x + i)², analytic above, and
  // Φ₋ = 1/(x - i)², analytic below; both vanish at infinity.
  if (!battery.empty()) {
    const double S = battery.front().f.half_width();
    const int m = battery.front().f.m();
    auto phi_p = [](double x) { return 1.0 / ((x + I) * (x + I)); };
    auto phi_m = [](double x) { return 1.0 / ((x - I) * (x - I)); };
    const auto g = LineFunction::sample(S, m, [&](double x) { return phi_p(x) - phi_m(x); });
    const auto up = cauchy_project(g, Side::plus), down = cauchy_project(g, Side::minus);
    double ep = 0.0, em = 0.0;
    for (int j = 0; j < m; ++j) {
      const double x = g.node(j);
      if (std::abs(x) > S / 2) continue;
      ep = std::max(ep, std::abs(up.value(j) - phi_p(x)));
      em = std::max(em, std::abs(down.value(j) - phi_m(x)));
    }
    rep.checks.push_back({"Phi+ = T+ g", "1/(x+i)^2 jump", ep, 1e-7});
    rep.checks.push_back({"Phi- = T- g", "1/(x+i)^2 jump", em, 1e-7});
  }
  return rep;
}

}  // namespace nsaudit::line
