#include "unitroot/splitting.hpp"

#include <map>
#include <mutex>
#include <tuple>
#include <stdexcept>

namespace ur {

int theta_default_imax(const TowerConfig& t) {
  // (p-1) i / p^2 >= N
  std::uint64_t p2 = t.p * t.p;
  return (int)(((std::uint64_t)t.N * p2 + (t.p - 2)) / (t.p - 1)) + 1;
}

PadicScalar pi_power_over_factorial(const TowerConfig& t, int k) {
  // k! = p^v * u with u a unit; pi^k / p^v = (-1)^v pi^{k - (p-1) v}
  int v = 0;
  std::uint64_t u = 1 % t.modulus;
  for (int j = 2; j <= k; ++j) {
    std::uint64_t jj = (std::uint64_t)j;
    while (jj % t.p == 0) jj /= t.p, ++v;
    u = t.mul(u, jj % t.modulus);
  }
  std::uint64_t uinv = inv_mod(u, t.modulus);
  if (v % 2) uinv = t.neg(uinv);
  long expo = (long)k - (long)(t.p - 1) * v;
  return PadicScalar::pi(t).pow((std::uint64_t)expo).scale(uinv);
}

SplittingSeries theta(const TowerConfig& t, int imax) {
  if (imax < (int)t.p) throw std::invalid_argument("theta truncation must reach p");
  std::vector<PadicScalar> e(imax + 1);
  for (int k = 0; k <= imax; ++k) e[k] = pi_power_over_factorial(t, k).compact();
  SplittingSeries s;
  s.imax = imax;
  s.coeffs.assign(imax + 1, PadicScalar(t));
  for (int j = 0; (std::uint64_t)j * t.p <= (std::uint64_t)imax; ++j) {
    PadicScalar ej = (j % 2) ? -e[j] : e[j];
    for (int i = j * (int)t.p; i <= imax; ++i) s.coeffs[i] += e[i - j * (int)t.p] * ej;
  }
  for (auto& c : s.coeffs) c = c.compact();
  return s;
}

PadicScalar zeta_embed(const TowerConfig& t) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, int, int, int>, std::pair<Tower, PadicScalar>> cache;
  auto key = std::make_tuple(t.p, t.a, t.D, t.N);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    Tower own = make_tower(t.p, t.a, t.D, t.N);
    auto th = theta(*own, theta_default_imax(*own));
    PadicScalar z(*own);
    for (auto& c : th.coeffs) z += c;
    it = cache.emplace(key, std::make_pair(own, z.compact())).first;
  }
  return it->second.second.to_tower(t);
}

PadicScalar zeta_embed(const CyclotomicInteger& x, const TowerConfig& t) {
  PadicScalar z = zeta_embed(t), acc(t), zp = PadicScalar::from_int(t, 1);
  mpz_class mod = 1;
  for (int i = 0; i < t.N; ++i) mod *= (unsigned long)t.p;
  for (auto& c : x.coeffs()) {
    mpz_class r = c % mod;
    if (r < 0) r += mod;
    acc += zp.scale(r.get_ui());
    zp = zp * z;
  }
  return acc;
}

PadicScalar zeta_embed(const CyclotomicRational& x, const TowerConfig& t) {
  PadicScalar z = zeta_embed(t), acc(t), zp = PadicScalar::from_int(t, 1);
  mpz_class mod = 1;
  for (int i = 0; i < t.N; ++i) mod *= (unsigned long)t.p;
  for (auto& c : x.coeffs()) {
    mpz_class num = c.get_num() % mod, den = c.get_den() % mod;
    if (num < 0) num += mod;
    mpz_class dinv;
    if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
      throw std::domain_error("denominator divisible by p in cyclotomic embedding");
    mpz_class r = num * dinv % mod;
    acc += zp.scale(r.get_ui());
    zp = zp * z;
  }
  return acc;
}

}  // namespace ur
