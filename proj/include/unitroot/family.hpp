#pragma once

#include <cstdint>
#include <vector>

#include "unitroot/ffield.hpp"
#include "unitroot/geometry.hpp"

namespace ur {

// G(t, lambda, x) = f(t, x) + P(lambda, x) with f = sum t_u x^u and P = sum A(gamma, v) lambda^gamma x^v.
struct LaurentFamily {
  struct FTerm {
    LatticePoint u;
    bool var = true;          // coefficient supplied by t_bar
    std::uint64_t coeff = 0;  // F_q code when fixed
    bool operator==(const FTerm&) const = default;
  };
  struct PTerm {
    LatticePoint gamma;
    LatticePoint v;
    std::uint64_t coeff = 1;  // F_q code
    bool operator==(const PTerm&) const = default;
  };

  std::uint64_t p = 0;
  int a = 1;
  int n = 1;
  int s = 1;
  std::vector<FTerm> f;
  std::vector<PTerm> P;

  WeightedGeometry geom_f;
  WeightedGeometry geom_gamma;
  long D = 1;  // common weight denominator of M(f) and M(Gamma)

  // Validates supports, builds both polytopes; throws on violations of the standing hypotheses.
  void finalize();
  int var_count() const;
};

// t_bar residues: one nonzero code in F_{q^t_degree} per variable f-term.
struct FiberParameter {
  int t_degree = 1;
  std::vector<std::uint64_t> t_bar;
};

// All coefficients of G at t_bar as codes of one field F_{q_t}.
struct SpecializedFamily {
  const LaurentFamily* family = nullptr;
  Field field;  // F_{q_t}
  int t_degree = 1;
  std::vector<FqField::Elem> f_coeffs;
  std::vector<FqField::Elem> P_coeffs;
};

SpecializedFamily specialize(const LaurentFamily& fam, const FiberParameter& t);

// n! times the volume of the Newton polytope of f (n <= 2).
long normalized_volume(const WeightedGeometry& g);

}  // namespace ur
