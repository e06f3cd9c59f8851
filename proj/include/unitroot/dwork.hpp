#pragma once

#include <map>
#include <utility>
#include <vector>

#include "unitroot/charsum.hpp"
#include "unitroot/family.hpp"
#include "unitroot/padic.hpp"
#include "unitroot/splitting.hpp"

namespace ur {

using Exponent = std::vector<long>;
using SparseSeries = std::map<Exponent, PadicScalar>;

// Product with terms vanishing modulo p^N removed.
SparseSeries series_product(const SparseSeries& a, const SparseSeries& b);

// Teichmüller lift of a code of F into t; F must be a subfield of F_{p^{t.a}}.
PadicScalar lift_code(const FqField& F, FqField::Elem c, const TowerConfig& t);

struct FrobeniusSeries {
  int m = 1;
  int s = 0, n = 0;
  SparseSeries terms;  // key = gamma ++ u
  Rational cap_gamma, cap_x;
};

// F_m(t_hat, lambda, x) with lambda symbolic. Tower unramified degree must be a * t_degree.
FrobeniusSeries frobenius_series(const SpecializedFamily& G, int m, const Rational& cap_gamma, const Rational& cap_x,
                                 const TowerConfig& t);

// Sparse columns; entries are raw (unnormalized basis).
struct NuclearMatrix {
  const TowerConfig* tower = nullptr;
  std::vector<LatticePoint> index;
  std::vector<Rational> weight;  // row-floor weight of each index
  std::vector<std::vector<std::pair<int, PadicScalar>>> cols;
  int certified = 0;  // p-digits to which Fredholm data of the truncation equal those of the operator
  // Normalized valuation of entry (i,j), in units of 1/scale: raw_hat * scale / e + phi[j] - phi[i]; scale 0 = none.
  long scale = 0;
  std::vector<long> phi;

  std::size_t dim() const { return index.size(); }
  PadicScalar at(int row, int col) const;
  std::vector<std::vector<PadicScalar>> dense() const;
};

NuclearMatrix mat_mul(const NuclearMatrix& a, const NuclearMatrix& b);
PadicScalar trace(const NuclearMatrix& a);
// Tr(a b) without forming the product.
PadicScalar trace_product(const NuclearMatrix& a, const NuclearMatrix& b);

// Smallest cap with ((p-1)/p)^2 * cap >= N, plus a margin of 2.
Rational truncation_rule_cap(const TowerConfig& t);
// Certified digits when all indices of weight above cap are dropped.
int certified_from_cap(const TowerConfig& t, const Rational& cap, long D);

// Tower for a fiber of degree deg_lambda.
Tower fiber_tower(const SpecializedFamily& G, int deg_lambda, int N);

// Matrix of psi_x^m o F_m at the Teichmüller point over lambda, m = a d(t) d(lambda).
NuclearMatrix fiber_matrix(const SpecializedFamily& G, const ClosedPoint& lambda, const Rational& cap_x, const TowerConfig& t);

struct FredholmSeries {
  std::vector<PadicScalar> coeffs;
  std::vector<int> certified;
  std::vector<PadicScalar> traces;  // Tr(M^k), k = 1..d_T
};

// det(1 - M T) to degree d_T via traces of powers and Newton's identities.
FredholmSeries fredholm(const NuclearMatrix& m, int d_T);
// Same from given power traces.
FredholmSeries fredholm_from_traces(const std::vector<PadicScalar>& traces, int certified);

PadicScalar divide_int(const PadicScalar& x, std::uint64_t j);

struct TraceCheck {
  int m = 1;
  CyclotomicInteger sum;
  PadicScalar lhs, rhs;
  long agreement = 0;
  int certified = 0;
  bool ok = false;
};

TraceCheck trace_formula_check(const SpecializedFamily& G, const ClosedPoint& lambda, int m, const Rational& cap_x,
                               const TowerConfig& t);

LSeriesReport fiber_l_via_dwork(const SpecializedFamily& G, const ClosedPoint& lambda, int d_T, const Rational& cap_x,
                                const TowerConfig& t);

// psi^{a d(t)} o F_{a d(t)} in (lambda, x) jointly, on M(Gamma) x M(f) up to the cap of w_Gamma + w.
NuclearMatrix total_family_matrix(const SpecializedFamily& G, const Rational& cap, const TowerConfig& t);

// Sum over the (s+n)-torus of F_{q_t^m} against (q_t^m - 1)^{s+n} Tr(A^m).
TraceCheck total_trace_check(const SpecializedFamily& G, int m, const Rational& cap, const TowerConfig& t);

}  // namespace ur
