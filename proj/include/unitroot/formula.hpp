#pragma once

#include <map>
#include <string>
#include <vector>

#include "unitroot/sympow.hpp"

namespace ur {

// Truncated power series in the coefficient variables Lambda_1..Lambda_T (one per monomial of H).
struct LambdaSeries {
  std::map<std::vector<int>, PadicScalar> terms;
  int d = 0;  // total-degree truncation

  PadicScalar constant(const TowerConfig& t) const;
};

LambdaSeries ls_mul(const LambdaSeries& a, const LambdaSeries& b);
LambdaSeries ls_inverse(const LambdaSeries& a);
// Lambda -> Lambda^k, truncated.
LambdaSeries ls_power_substitute(const LambdaSeries& a, std::uint64_t k);
// Sum over terms of total degree <= dmax (-1: all).
PadicScalar ls_eval(const LambdaSeries& a, const std::vector<PadicScalar>& point, int dmax = -1);

struct ExpPiHCaps {
  Rational W_gamma, W_x;
  int d_Lambda = 0;
};
// d_Lambda = 2 N p^2 / (p - 1); weight caps of the unit monoids from the sym truncation.
ExpPiHCaps default_exp_caps(const SpecializedFamily& G, const TowerConfig& t);

struct ExpPiHSeries {
  const TowerConfig* tower = nullptr;
  int s = 0, n = 0;
  std::vector<LatticePoint> monomials;  // gamma ++ v of each Lambda variable; f-terms first
  ExpPiHCaps caps;
  std::map<LatticePoint, LambdaSeries> coeffs;  // A_{gamma,u}, (gamma, u) in M0(Gamma) x M0(f) slices
  std::size_t terms = 0;
  bool weights_dominated = false;  // w_Gamma + w <= w_H on every stored cell
};

ExpPiHSeries exp_pi_h(const LaurentFamily& fam, const ExpPiHCaps& caps, const TowerConfig& t);

// pi^k / k! exactly, k = 0..kmax.
std::vector<PadicScalar> exp_pi_coefficients(int kmax, const TowerConfig& t);

struct EtaVector {
  LambdaSeries J00;
  // Raw coordinates A_{-gamma,-u} / A_{0,0} at lambda^{-gamma} x^{-u}; entry (0,0) = 1.
  std::map<LatticePoint, LambdaSeries> Q;
};
EtaVector build_eta(const ExpPiHSeries& series);

// Teichmüller coefficients of G in the order of ExpPiHSeries::monomials.
std::vector<PadicScalar> teichmuller_point(const SpecializedFamily& G, const TowerConfig& t);

// J00(Lambda) / J00(Lambda^{p^m}) = prod_{i<m} F(Lambda^{p^i}).
LambdaSeries f_ratio_series(const ExpPiHSeries& series, int m);

enum class FMethod { TruncatedRatio, DualPowerIteration };

struct FValue {
  PadicScalar value;
  int precision = 0;
  bool certified = false;  // false: observed stabilization only
  int m = 1;
  int iterations = 0;
};
// F_{a d(t)} at the Teichmüller point of G.
FValue f_ratio_eval(const SpecializedFamily& G, const ExpPiHSeries& series, const TowerConfig& t, FMethod method);

struct EigenResidual {
  PadicScalar F_kappa;
  int F_precision = 0;
  Rational min_residual;  // least normalized valuation of beta* v - F^kappa v, capped at N
  std::size_t support = 0;
  bool off_support_zero = false;  // rows with lambda-exponent outside M0(Gamma) vanish to the residual
  bool projection_ok = false;     // lambda-support of omega avoids M0(Gamma)
  int certified = 0;
};
EigenResidual eigen_residual(const SpecializedFamily& G, const KappaExponent& kappa, const SymTruncation& tr,
                             const ExpPiHCaps& caps, const TowerConfig& t);

struct VerifyOptions {
  int d_T = 4;              // det(1 - beta T)
  int fiber_degree = 3;     // route (a)
  int fiber_deg_bound = 4;  // L-polynomial degree bound per fiber
  int total_extra = 2;      // route (d) working precision above N
  int total_d_T = 8;
  bool total_route = true;  // only used for kappa = 1
  SymTruncation trunc;      // zero W_total: default
};

struct RouteValue {
  std::string name;
  PadicScalar value;
  int precision = 0;
  bool certified = true;
};

struct MainTheoremReport {
  std::vector<RouteValue> routes;
  std::vector<std::vector<long>> agreement;
  int joint = 0;
  bool ok = false;
};

MainTheoremReport verify_main_theorem(const SpecializedFamily& G, const KappaExponent& kappa, const VerifyOptions& opt,
                                      const TowerConfig& t);

}  // namespace ur
