#pragma once

#include <map>
#include <optional>
#include <vector>

#include "unitroot/dwork.hpp"

namespace ur {

// Sorted positions into SymBasis::points; empty = the monomial 1.
using SymIndex = std::vector<int>;

struct SymTruncation {
  int L_max = 0;  // 0: only weights bound the length
  Rational W_sym, W_gamma, W_total;
  int d_T = 4;
  int prune = 0;  // drop entries of normalized valuation >= prune digits (capped at N); 0: the certified digits
};

// Smallest caps certifying N - 1 digits; L_max left to the weights.
SymTruncation default_sym_truncation(const SpecializedFamily& G, const TowerConfig& t);

struct SymBasis {
  std::vector<LatticePoint> points;  // nonzero points of M(f) with weight <= W_sym
  std::vector<Rational> point_weight;
  std::vector<SymIndex> indices;
  std::vector<Rational> weights;
  std::map<SymIndex, int> position;

  std::size_t size() const { return indices.size(); }
};

SymBasis sym_basis(const LaurentFamily& fam, const SymTruncation& tr);

struct SymEntry {
  LatticePoint gamma;
  int row;  // position in the sym basis
  PadicScalar value;
};

// Columns of B(lambda) = sum_gamma b_gamma lambda^gamma over the sym basis (primal e_u or dual e*_u).
struct SymMatrixFamily {
  const TowerConfig* tower = nullptr;
  bool dual = false;
  KappaExponent kappa;
  std::optional<std::uint64_t> integer_power;  // finite approximation: k_m in place of kappa
  SymTruncation trunc;
  SymBasis basis;
  int m = 1;           // a d(t)
  std::uint64_t q = 0;  // p^m
  Rational tau;        // normalized-basis exponent, (p-1)/(p^{m-1} p^2)
  PadicScalar c0;      // constant term of Upsilon alpha(1)
  Rational nu_Y, nu_Z;  // least pseudo-valuation of a factor image and of alpha(1)/c0 - 1, in p-digits
  std::vector<std::vector<SymEntry>> cols;
  std::size_t pruned = 0;
};

SymMatrixFamily alpha_kappa_matrix(const SpecializedFamily& G, const KappaExponent& kappa, const SymTruncation& tr,
                                   const TowerConfig& t);
SymMatrixFamily dual_alpha_matrix(const SpecializedFamily& G, const KappaExponent& kappa, const SymTruncation& tr,
                                  const TowerConfig& t);
// [alpha]_(kappa; k): integer power k, columns longer than k zeroed.
SymMatrixFamily alpha_finite_matrix(const SpecializedFamily& G, std::uint64_t k, const SymTruncation& tr, const TowerConfig& t);
SymMatrixFamily dual_alpha_finite_matrix(const SpecializedFamily& G, std::uint64_t k, const SymTruncation& tr,
                                         const TowerConfig& t);

// Index of beta: (gamma, sym position) as gamma ++ {position}; weight w_Gamma + w.
NuclearMatrix beta_matrix(const SpecializedFamily& G, const SymMatrixFamily& fam);
NuclearMatrix dual_beta_matrix(const SpecializedFamily& G, const SymMatrixFamily& fam);

// Products and traces with entries of normalized valuation >= N dropped.
NuclearMatrix mat_mul_pruned(const NuclearMatrix& a, const NuclearMatrix& b);
FredholmSeries fredholm_pruned(const NuclearMatrix& m, int d_T);

// Normalized valuation of an entry, in p-digits.
Rational normalized_valuation(const NuclearMatrix& M, int row, int col);

struct ProjectorCheck {
  bool unit_corner = false;  // (0,0) entry is a 1-unit
  bool rest_small = false;   // every other entry has positive normalized valuation
  bool det_ok = false;       // Fredholm det = 1 - T mod pi_hat
  bool ok() const { return unit_corner && rest_small && det_ok; }
};
ProjectorCheck projector_check(const NuclearMatrix& beta, const FredholmSeries& det);

struct EigenResult {
  PadicScalar value;
  std::vector<PadicScalar> vector;  // raw coordinates, component at the constant index = 1 before normalization
  int iterations = 0;
  int stable_digits = 0;
};
// Unit eigenvalue by iterating from the constant basis vector until the ratio is stable mod p^N.
EigenResult power_iteration(const NuclearMatrix& M, int max_iter = 400);

struct L0Result {
  LSeriesReport series;  // L^(0)^{(-1)^{s+1}} as delta_q^s of the Fredholm series
  FredholmSeries det;
  PadicScalar unit_root;
  int certified = 0;
  EigenResult eigen;
};
L0Result l0_unit_root(const SpecializedFamily& G, const NuclearMatrix& beta, int d_T);

// sum over lambda in F_{q_t}^* of pi_0^kappa / Q(1/pi_0), with det(1 - alpha_lambda T) = (1 - pi_0 T) Q(T).
struct SymTraceOracle {
  PadicScalar fiber_sum;
  PadicScalar beta_side;  // (q_t - 1)^s Tr(beta)
  long agreement = 0;
  int certified = 0;
  bool ok = false;
};
SymTraceOracle sym_trace_check(const SpecializedFamily& G, const KappaExponent& kappa, const NuclearMatrix& beta,
                               int certified, const TowerConfig& t);

// Entrywise adjointness B[v][u] m(v)! (kappa)_|u| = B*[u][v] m(u)! (kappa)_|v| with falling factorials.
struct AdjointCheck {
  std::size_t compared = 0;
  long min_agreement = 0;
  bool ok = false;
};
AdjointCheck adjoint_check(const NuclearMatrix& beta, const NuclearMatrix& dual, const SymMatrixFamily& fam, int certified);

struct FiniteApproxStep {
  std::uint64_t k = 0;
  long distance = 0;   // min normalized valuation of [alpha]_kappa - [alpha]_(kappa;k), in pi_hat units
  Rational distance_p;
  Rational bound;      // min(v(kappa - k) + min_l (l nu_Z - floor(log_p l)), (k + 1) nu_Y)
  std::vector<PadicScalar> det;  // Fredholm coefficients of beta_(kappa;k)
};
struct FiniteApproxReport {
  std::vector<FiniteApproxStep> steps;
  std::vector<PadicScalar> det_kappa;
  bool monotone = false;
  bool bounds_ok = false;
  bool det_converges = false;
};
FiniteApproxReport finite_sym_approx(const SpecializedFamily& G, const KappaExponent& kappa, const std::vector<std::uint64_t>& k_list,
                                     const SymTruncation& tr, const TowerConfig& t);

// Certified digits of the truncated beta (capped by N and by the pruning level).
int sym_certified(const SpecializedFamily& G, const SymTruncation& tr, const TowerConfig& t);

}  // namespace ur
