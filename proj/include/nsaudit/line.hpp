#pragma once
// Cauchy-integral operators on the real line.
//
// A LineFunction is sampled at cell centres s_j = -S + (j + 1/2) h,
// h = 2S/m, plus an exactly represented tail a·L(s) + b·HL(s) with
// L = 1/(π(1 + s²)) and HL = s/(π(1 + s²)) its Hilbert transform.
//
// T f = (1/2πi) p.v.∫ f(s)/(s - x) ds has Fourier multiplier sgn(ω)/2
// (f̂(ω) = ∫ f e^{-iωs} ds). The sampled part is transformed with the
// periodic discrete multiplier, sgn(0) = +1. Before that, its discrete mass
// is moved into the L component, so the periodic image sees a zero-mean
// function and the slow 1/x tail of T f is carried analytically.
// T(L) = (i/2) HL and T(HL) = -(i/2) L, so T T = I/4 holds to rounding.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "nsaudit/grid.hpp"

namespace nsaudit::line {

class LineFunction {
 public:
  // m must be a power of two >= 64; S > 0. When decays is set the sampled
  // part must be below 1e-3 of its max at both ends.
  LineFunction(double S, std::vector<cplx> samples, bool decays = true, cplx a = {},
               cplx b = {});
  static LineFunction sample(double S, int m, const std::function<cplx(double)>& f,
                             bool decays = true);

  int m() const { return static_cast<int>(samples_.size()); }
  double half_width() const { return S_; }
  double h() const { return 2.0 * S_ / m(); }
  double node(int j) const { return -S_ + (j + 0.5) * h(); }
  bool decays() const { return decays_; }
  const std::vector<cplx>& samples() const { return samples_; }
  cplx tail_l() const { return a_; }
  cplx tail_hl() const { return b_; }

  // Sampled part plus tail at node j.
  cplx value(int j) const;
  std::vector<cplx> values() const;

  LineFunction operator+(const LineFunction& o) const;
  LineFunction operator-(const LineFunction& o) const;
  LineFunction operator*(cplx s) const;
  // Copy with the decay flag replaced, without the end check.
  LineFunction with_decay(bool flag) const;
  // max_j |value(j)| over |s_j| <= r
  double sup(double r) const;

 private:
  double S_;
  std::vector<cplx> samples_;
  bool decays_;
  cplx a_, b_;
};

double lorentz(double s);     // 1/(π(1 + s²))
double lorentz_hl(double s);  // s/(π(1 + s²))

enum class Side { plus, minus, principal };

// T f, T₊ f = T f + f/2 or T₋ f = T f - f/2. Throws InvalidInput if the
// decay flag is unset.
LineFunction cauchy_project(const LineFunction& f, Side side);

struct IdentityCheck {
  std::string identity;
  std::string function;
  double error = 0.0;  // sup over |s| <= S/2
  double tol = 0.0;
  bool ok() const { return error <= tol; }
};

struct PlemeljReport {
  std::vector<IdentityCheck> checks;
  bool ok() const;
  std::string summary() const;
};

struct NamedLineFunction {
  std::string name;
  LineFunction f;
};

// Gaussian, Lorentzian and compact bump on [-S, S] with m samples.
std::vector<NamedLineFunction> default_battery(double S = 4096.0, int m = 65536);

// The five algebraic identities on every battery entry (tol 1e-8), and the
// jump reconstruction Φ± = T±(Φ₊ - Φ₋) for Φ± = 1/(x ± i)² (tol 1e-7).
PlemeljReport plemelj_selftest(const std::vector<NamedLineFunction>& battery);

}  // namespace nsaudit::line
