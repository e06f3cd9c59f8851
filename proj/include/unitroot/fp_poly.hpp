#pragma once

#include <cstdint>
#include <vector>

namespace ur {

// Dense polynomials over F_p, coefficients low to high, no trailing zeros (zero polynomial is empty).
using FpPoly = std::vector<std::uint64_t>;

bool is_prime(std::uint64_t n);
std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m);

void fp_trim(FpPoly& f);
FpPoly fp_mul(const FpPoly& a, const FpPoly& b, std::uint64_t p);
FpPoly fp_sub(const FpPoly& a, const FpPoly& b, std::uint64_t p);
FpPoly fp_rem(const FpPoly& a, const FpPoly& m, std::uint64_t p);
FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint64_t p);
FpPoly fp_powmod(const FpPoly& base, std::uint64_t e, const FpPoly& m, std::uint64_t p);

bool fp_irreducible(const FpPoly& f, std::uint64_t p);

// Monic irreducible of degree k, least in the order of the integer sum_{i<k} c_i p^i.
FpPoly least_irreducible(std::uint64_t p, int k);

}  // namespace ur
