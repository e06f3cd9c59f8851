#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "unitroot/cyclotomic.hpp"
#include "unitroot/family.hpp"
#include "unitroot/padic.hpp"

namespace ur {

using NewtonPolygon = std::vector<std::pair<int, Rational>>;

struct LSeriesReport {
  std::uint64_t p = 0;
  std::vector<CyclotomicInteger> exact;  // exact coefficients, when known
  std::vector<PadicScalar> padic;        // p-adic coefficients
  std::vector<int> certified;            // per-coefficient certified p-digits of `padic`
  struct Recovered {
    std::vector<CyclotomicRational> num, den;
    bool from_degree_bound = false;
  };
  std::optional<Recovered> recovered;
  std::optional<PadicScalar> unit_root;
  int unit_root_precision = 0;
  NewtonPolygon newton_polygon;

  int degree() const { return (int)std::max(exact.size(), padic.size()) - 1; }
};

// Sum over the n-torus of F_{q_t^{deg(lambda) m}} of Psi(Tr G(t, lambda, x)).
CyclotomicInteger exp_sum(const SpecializedFamily& G, const std::vector<FqField::Elem>& lambda, int lambda_degree, int m);
// Sum over the (s+n)-torus of F_{q_t^m} with lambda free.
CyclotomicInteger total_exp_sum(const SpecializedFamily& G, int m);

LSeriesReport l_series(const std::vector<CyclotomicInteger>& sums, int d_T);
// Inverse series (alternation for even n).
LSeriesReport invert_exact(const LSeriesReport& r);
LSeriesReport rational_recover(const LSeriesReport& report, int max_degree);

// Lower convex hull of (j, ord c_j); zero coefficients sit at height N.
NewtonPolygon newton_polygon(const std::vector<PadicScalar>& coeffs);
int slope_zero_length(const NewtonPolygon& np);

PadicScalar unit_root(LSeriesReport& report, const TowerConfig& t);

struct FiberUnitRoot {
  ClosedPoint lambda;
  LSeriesReport L;  // L^{(-1)^{n+1}} as a polynomial
  PadicScalar pi0;
};

// L-polynomial of one fiber from the first deg_bound sums.
LSeriesReport fiber_l_polynomial(const SpecializedFamily& G, const ClosedPoint& lambda, int deg_bound);
std::vector<FiberUnitRoot> fiber_unit_roots(const SpecializedFamily& G, int max_degree, int deg_bound, const TowerConfig& t);

LSeriesReport unit_l_function(const std::vector<FiberUnitRoot>& fibers, const KappaExponent& kappa, int d_T, const TowerConfig& t);
LSeriesReport unit_l_function(const SpecializedFamily& G, const KappaExponent& kappa, int d_T, int deg_bound, const TowerConfig& t);

LSeriesReport delta_q(const LSeriesReport& report, std::uint64_t q);

struct SeriesRoot {
  PadicScalar root;
  int precision = 0;
  Rational gap;  // slope of the first positive Newton segment
};
SeriesRoot series_unit_root(const LSeriesReport& report, const TowerConfig& t);
// s_{m+1}/s_m from the power sums of the reciprocal zeros.
SeriesRoot power_sum_unit_root(const LSeriesReport& report, const TowerConfig& t);

// Exact power series helpers over R.
std::vector<PadicScalar> series_mul(const std::vector<PadicScalar>& a, const std::vector<PadicScalar>& b, int deg);
std::vector<PadicScalar> series_inverse(const std::vector<PadicScalar>& a, int deg);

}  // namespace ur
