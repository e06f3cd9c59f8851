#include "unitroot/fp_poly.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace ur {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 r = 1 % m, x = b % m;
  while (e) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return (std::uint64_t)r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
  __int128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr != 0) {
    __int128 q = r / nr, tmp = t - q * nt;
    t = nt, nt = tmp;
    tmp = r - q * nr;
    r = nr, nr = tmp;
  }
  if (r != 1) throw std::domain_error("not invertible modulo m");
  if (t < 0) t += m;
  return (std::uint64_t)t;
}

void fp_trim(FpPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  FpPoly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  fp_trim(c);
  return c;
}

FpPoly fp_sub(const FpPoly& a, const FpPoly& b, std::uint64_t p) {
  FpPoly c(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::uint64_t x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
    c[i] = (x + p - y) % p;
  }
  fp_trim(c);
  return c;
}

FpPoly fp_rem(const FpPoly& a, const FpPoly& m, std::uint64_t p) {
  if (m.empty()) throw std::domain_error("polynomial division by zero");
  FpPoly r = a;
  fp_trim(r);
  std::uint64_t lead_inv = inv_mod(m.back(), p);
  while (r.size() >= m.size()) {
    std::uint64_t c = r.back() * lead_inv % p;
    std::size_t shift = r.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) r[shift + i] = (r[shift + i] + p * p - c * m[i] % p) % p;
    fp_trim(r);
  }
  return r;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint64_t p) {
  fp_trim(a);
  fp_trim(b);
  while (!b.empty()) {
    FpPoly r = fp_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    std::uint64_t li = inv_mod(a.back(), p);
    for (auto& c : a) c = c * li % p;
  }
  return a;
}

FpPoly fp_powmod(const FpPoly& base, std::uint64_t e, const FpPoly& m, std::uint64_t p) {
  FpPoly r{1}, x = fp_rem(base, m, p);
  r = fp_rem(r, m, p);
  while (e) {
    if (e & 1) r = fp_rem(fp_mul(r, x, p), m, p);
    x = fp_rem(fp_mul(x, x, p), m, p);
    e >>= 1;
  }
  return r;
}

bool fp_irreducible(const FpPoly& f, std::uint64_t p) {
  int k = (int)f.size() - 1;
  if (k < 1) return false;
  if (k == 1) return true;
  FpPoly x{0, 1}, xp = x;
  for (int i = 1; i <= k / 2; ++i) {
    xp = fp_powmod(xp, p, f, p);
    if (fp_gcd(fp_sub(xp, x, p), f, p).size() != 1) return false;
  }
  return true;
}

FpPoly least_irreducible(std::uint64_t p, int k) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, int>, FpPoly> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, k);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (k < 1) throw std::invalid_argument("degree must be positive");
  for (std::uint64_t code = 0;; ++code) {
    FpPoly f(k + 1, 0);
    std::uint64_t c = code;
    for (int i = 0; i < k; ++i) f[i] = c % p, c /= p;
    if (c != 0) throw std::logic_error("no irreducible polynomial found");
    f[k] = 1;
    if (k > 1 && f[0] == 0) continue;
    if (fp_irreducible(f, p)) return cache[key] = f;
  }
}

}  // namespace ur
