#pragma once

#include <vector>

#include "unitroot/cyclotomic.hpp"
#include "unitroot/padic.hpp"

namespace ur {

// theta(T) = exp(pi (T - T^p)) = sum theta_i T^i.
struct SplittingSeries {
  std::vector<PadicScalar> coeffs;
  int imax = 0;
};

// Default truncation: beyond it every theta_i vanishes modulo p^N.
int theta_default_imax(const TowerConfig& t);
SplittingSeries theta(const TowerConfig& t, int imax);

// pi^k / k! exactly, using p = -pi^{p-1}.
PadicScalar pi_power_over_factorial(const TowerConfig& t, int k);

// zeta_p := theta(1).
PadicScalar zeta_embed(const TowerConfig& t);
PadicScalar zeta_embed(const CyclotomicInteger& x, const TowerConfig& t);
PadicScalar zeta_embed(const CyclotomicRational& x, const TowerConfig& t);  // denominators must be p-adic units

}  // namespace ur
