#include "unitroot/padic.hpp"

#include <gmpxx.h>

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ur {

namespace {

using ZqVec = std::vector<std::uint64_t>;

void zq_mul_into(const TowerConfig& t, const std::uint64_t* x, const std::uint64_t* y, std::uint64_t* out) {
  const int a = t.a;
  if (a == 1) {
    out[0] = t.mul(x[0], y[0]);
    return;
  }
  std::uint64_t prod[64];
  if (2 * a - 1 > 64) throw std::length_error("unramified degree too large");
  for (int k = 0; k < 2 * a - 1; ++k) prod[k] = 0;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) prod[i + j] = t.add(prod[i + j], t.mul(x[i], y[j]));
  for (int k = 2 * a - 2; k >= a; --k) {
    std::uint64_t c = prod[k];
    if (!c) continue;
    for (int i = 0; i < a; ++i) prod[k - a + i] = t.sub(prod[k - a + i], t.mul(c, t.unramified_minpoly[i]));
  }
  for (int i = 0; i < a; ++i) out[i] = prod[i];
}

ZqVec zq_mul(const TowerConfig& t, const ZqVec& x, const ZqVec& y) {
  ZqVec out(t.a);
  zq_mul_into(t, x.data(), y.data(), out.data());
  return out;
}

ZqVec zq_one(const TowerConfig& t) {
  ZqVec o(t.a, 0);
  o[0] = 1 % t.modulus;
  return o;
}

ZqVec zq_pow(const TowerConfig& t, ZqVec x, std::uint64_t e) {
  ZqVec r = zq_one(t);
  while (e) {
    if (e & 1) r = zq_mul(t, r, x);
    x = zq_mul(t, x, x);
    e >>= 1;
  }
  return r;
}

ZqVec zq_inverse(const TowerConfig& t, const ZqVec& z) {
  std::uint64_t q = t.q();
  ZqVec y = zq_pow(t, z, q - 2);
  for (int prec = 1; prec < t.N; prec *= 2) {
    ZqVec zy = zq_mul(t, z, y);
    for (auto& c : zy) c = t.neg(c);
    zy[0] = t.add(zy[0], 2 % t.modulus);
    y = zq_mul(t, y, zy);
  }
  return y;
}

int ord_p_u64(std::uint64_t c, std::uint64_t p, int cap) {
  if (c == 0) return cap;
  int v = 0;
  while (c % p == 0) c /= p, ++v;
  return v;
}

}  // namespace

std::uint64_t TowerConfig::q() const {
  std::uint64_t r = 1;
  for (int i = 0; i < a; ++i) r *= p;
  return r;
}

std::uint64_t TowerConfig::from_signed(std::int64_t x) const {
  __int128 r = (__int128)x % (__int128)modulus;
  if (r < 0) r += modulus;
  return (std::uint64_t)r;
}

Tower make_tower(std::uint64_t p, int a, int D, int N) {
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime (composite)");
  if (a < 1 || D < 1 || N < 1) throw std::invalid_argument("tower parameters must be positive");
  auto t = std::make_shared<TowerConfig>();
  t->p = p;
  t->a = a;
  t->D = D;
  t->N = N;
  unsigned __int128 m = 1;
  for (int i = 0; i < N; ++i) {
    m *= p;
    if (m >= ((unsigned __int128)1 << 62)) throw std::overflow_error("p^N exceeds the 62-bit working modulus");
  }
  t->modulus = (std::uint64_t)m;
  t->e = (int)((p - 1) * p * p * D);
  t->pi_index = t->e / (int)(p - 1);
  t->pitilde_index = (int)((p - 1) * (p - 1) * D);
  t->residue_minpoly = least_irreducible(p, a);
  t->unramified_minpoly.assign(t->residue_minpoly.begin(), t->residue_minpoly.end());

  // sigma(X): the root of the minimal polynomial congruent to X^p, by Newton iteration
  t->sigma_matrix.assign((std::size_t)a * a, 0);
  if (a == 1) {
    t->sigma_matrix[0] = 1 % t->modulus;
  } else {
    const TowerConfig& tc = *t;
    ZqVec X(a, 0);
    X[1] = 1;
    ZqVec r = zq_pow(tc, X, p);
    auto eval = [&](const ZqVec& z, bool derivative) {
      ZqVec acc(a, 0);
      for (int i = 0; i <= a; ++i) {
        std::uint64_t c = tc.unramified_minpoly[i];
        if (derivative) {
          if (i == 0) continue;
          c = tc.mul(c, i);
        }
        int k = derivative ? i - 1 : i;
        ZqVec pw = zq_pow(tc, z, k);
        for (int j = 0; j < a; ++j) acc[j] = tc.add(acc[j], tc.mul(c, pw[j]));
      }
      return acc;
    };
    for (int it = 0; it < 2 * N + 2; ++it) {
      ZqVec g = eval(r, false), dg = eval(r, true);
      ZqVec corr = zq_mul(tc, g, zq_inverse(tc, dg));
      for (int j = 0; j < a; ++j) r[j] = tc.sub(r[j], corr[j]);
    }
    ZqVec pw = zq_one(tc);
    for (int j = 0; j < a; ++j) {
      for (int i = 0; i < a; ++i) t->sigma_matrix[(std::size_t)i * a + j] = pw[i];
      pw = zq_mul(tc, pw, r);
    }
  }
  return t;
}

Tower retower(const TowerConfig& t, int N) { return make_tower(t.p, t.a, t.D, N); }

PadicScalar::PadicScalar(const TowerConfig& t) : t_(&t), step_(t.e), c_(t.a, 0), floor_((long)t.e * t.N) {}

PadicScalar PadicScalar::from_uint(const TowerConfig& t, std::uint64_t x) {
  PadicScalar r(t);
  r.c_[0] = x % t.modulus;
  r.floor_ = (long)ord_p_u64(r.c_[0], t.p, t.N) * t.e;
  return r;
}

PadicScalar PadicScalar::from_int(const TowerConfig& t, std::int64_t x) {
  PadicScalar r(t);
  r.c_[0] = t.from_signed(x);
  r.floor_ = (long)ord_p_u64(r.c_[0], t.p, t.N) * t.e;
  return r;
}

PadicScalar PadicScalar::from_unramified(const TowerConfig& t, const std::vector<std::uint64_t>& coeffs) {
  if ((int)coeffs.size() > t.a) throw std::invalid_argument("too many unramified coefficients");
  PadicScalar r(t);
  for (std::size_t j = 0; j < coeffs.size(); ++j) r.c_[j] = coeffs[j] % t.modulus;
  r.floor_ = r.valuation_hat();
  return r;
}

PadicScalar PadicScalar::pi_hat_power(const TowerConfig& t, int k) {
  if (k < 0) throw std::invalid_argument("negative pi_hat power");
  return from_uint(t, 1).shift_hat(k);
}

std::uint64_t PadicScalar::coeff(int i, int j) const {
  if (i % step_) return 0;
  return c_[(std::size_t)(i / step_) * t_->a + j];
}

bool PadicScalar::is_zero() const {
  for (auto c : c_)
    if (c) return false;
  return true;
}

long PadicScalar::valuation_hat() const {
  const long cap = (long)t_->e * t_->N;
  long best = cap;
  const int a = t_->a, r = slots();
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < a; ++j) {
      std::uint64_t c = c_[(std::size_t)k * a + j];
      if (!c) continue;
      long v = (long)ord_p_u64(c, t_->p, t_->N) * t_->e + (long)k * step_;
      best = std::min(best, v);
    }
  return best;
}

PadicScalar PadicScalar::with_step(int s) const {
  if (s == step_) return *this;
  PadicScalar r;
  r.t_ = t_;
  r.step_ = s;
  r.floor_ = floor_;
  const int a = t_->a, ratio = step_ / s, rs = t_->e / s;
  r.c_.assign((std::size_t)rs * a, 0);
  for (int k = 0; k < slots(); ++k)
    for (int j = 0; j < a; ++j) r.c_[(std::size_t)k * ratio * a + j] = c_[(std::size_t)k * a + j];
  return r;
}

PadicScalar PadicScalar::compact() const {
  const int a = t_->a, r = slots();
  int g = t_->e;
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < a; ++j)
      if (c_[(std::size_t)k * a + j]) g = std::gcd(g, k * step_);
  if (g == step_) return *this;
  PadicScalar out;
  out.t_ = t_;
  out.step_ = g;
  out.floor_ = floor_;
  const int ratio = g / step_, rs = t_->e / g;
  out.c_.assign((std::size_t)rs * a, 0);
  for (int k = 0; k < rs; ++k)
    for (int j = 0; j < a; ++j) out.c_[(std::size_t)k * a + j] = c_[(std::size_t)k * ratio * a + j];
  return out;
}

PadicScalar PadicScalar::operator-() const {
  PadicScalar r = *this;
  for (auto& c : r.c_) c = t_->neg(c);
  return r;
}

PadicScalar operator+(const PadicScalar& x, const PadicScalar& y) {
  if (x.step_ == y.step_) {
    PadicScalar r = x;
    const TowerConfig& t = *x.t_;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = t.add(r.c_[i], y.c_[i]);
    r.floor_ = std::min(x.floor_, y.floor_);
    return r;
  }
  int g = std::gcd(x.step_, y.step_);
  return x.with_step(g) + y.with_step(g);
}

PadicScalar operator-(const PadicScalar& x, const PadicScalar& y) { return x + (-y); }

PadicScalar operator*(const PadicScalar& x, const PadicScalar& y) {
  if (x.step_ != y.step_) {
    int g = std::gcd(x.step_, y.step_);
    return x.with_step(g) * y.with_step(g);
  }
  const TowerConfig& t = *x.t_;
  const int a = t.a, r = x.slots();
  PadicScalar z;
  z.t_ = x.t_;
  z.step_ = x.step_;
  z.floor_ = std::min(x.floor_ + y.floor_, (long)t.e * t.N);
  if (a == 1 && r == 1) {
    z.c_.assign(1, t.mul(x.c_[0], y.c_[0]));
    return z;
  }
  z.c_.assign((std::size_t)r * a, 0);
  if (a == 1) {
    const std::uint64_t mp = t.neg(t.p % t.modulus);
    for (int k = 0; k < r; ++k) {
      std::uint64_t xk = x.c_[k];
      if (!xk) continue;
      for (int l = 0; l < r; ++l) {
        std::uint64_t yl = y.c_[l];
        if (!yl) continue;
        std::uint64_t pr = t.mul(xk, yl);
        int s = k + l;
        if (s >= r) {
          s -= r;
          pr = t.mul(pr, mp);
        }
        z.c_[s] = t.add(z.c_[s], pr);
      }
    }
    return z;
  }
  std::uint64_t tmp[64];
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) {
      zq_mul_into(t, &x.c_[(std::size_t)k * a], &y.c_[(std::size_t)l * a], tmp);
      int s = k + l;
      bool wrap = s >= r;
      if (wrap) s -= r;
      for (int j = 0; j < a; ++j) {
        std::uint64_t v = wrap ? t.neg(t.mul(tmp[j], t.p)) : tmp[j];
        z.c_[(std::size_t)s * a + j] = t.add(z.c_[(std::size_t)s * a + j], v);
      }
    }
  return z;
}

bool operator==(const PadicScalar& x, const PadicScalar& y) {
  if (x.step_ == y.step_) return x.c_ == y.c_;
  int g = std::gcd(x.step_, y.step_);
  return x.with_step(g).c_ == y.with_step(g).c_;
}

PadicScalar PadicScalar::scale(std::uint64_t k) const {
  PadicScalar r = *this;
  k %= t_->modulus;
  for (auto& c : r.c_) c = t_->mul(c, k);
  r.floor_ = std::min((long)t_->e * t_->N, floor_ + (long)ord_p_u64(k, t_->p, t_->N) * t_->e);
  return r;
}

PadicScalar PadicScalar::pow(std::uint64_t k) const {
  PadicScalar r = from_uint(*t_, 1), x = *this;
  while (k) {
    if (k & 1) r = r * x;
    x = x * x;
    k >>= 1;
  }
  return r;
}

PadicScalar PadicScalar::inverse() const {
  if (!is_unit()) throw std::domain_error("inverse of a non-unit");
  const TowerConfig& t = *t_;
  ZqVec x0(c_.begin(), c_.begin() + t.a);
  PadicScalar y = from_unramified(t, zq_inverse(t, x0));
  const long target = (long)t.e * t.N;
  long prec = step_;
  PadicScalar two = from_uint(t, 2);
  while (true) {
    y = y * (two - *this * y);
    prec *= 2;
    if (prec >= target) break;
  }
  y.floor_ = 0;
  return y;
}

PadicScalar PadicScalar::shift_hat(int k) const {
  if (k < 0) throw std::invalid_argument("negative shift");
  if (k == 0) return *this;
  const TowerConfig& t = *t_;
  int g = std::gcd(step_, k);
  PadicScalar x = with_step(g);
  const int a = t.a, r = t.e / g;
  const int sh = k / g;
  PadicScalar out = x;
  std::fill(out.c_.begin(), out.c_.end(), 0);
  for (int idx = 0; idx < r; ++idx) {
    int ni = idx + sh;
    int wraps = ni / r;
    ni %= r;
    for (int j = 0; j < a; ++j) {
      std::uint64_t c = x.c_[(std::size_t)idx * a + j];
      for (int w = 0; w < wraps && c; ++w) c = t.neg(t.mul(c, t.p));
      out.c_[(std::size_t)ni * a + j] = t.add(out.c_[(std::size_t)ni * a + j], c);
    }
  }
  out.floor_ = std::min((long)t.e * t.N, floor_ + k);
  return out;
}

PadicScalar PadicScalar::unshift_hat(int k) const {
  if (k < 0) throw std::invalid_argument("negative shift");
  if (k == 0) return *this;
  const TowerConfig& t = *t_;
  int g = std::gcd(step_, k);
  PadicScalar x = with_step(g);
  const int a = t.a, r = t.e / g;
  const int sh = k / g;
  PadicScalar out = x;
  std::fill(out.c_.begin(), out.c_.end(), 0);
  for (int idx = 0; idx < r; ++idx) {
    int ni = idx - sh;
    for (int j = 0; j < a; ++j) {
      std::uint64_t c = x.c_[(std::size_t)idx * a + j];
      int n2 = ni;
      while (n2 < 0) {
        if (c % t.p) throw std::domain_error("unshift of a non-divisible element");
        c = t.neg(c / t.p);
        n2 += r;
      }
      out.c_[(std::size_t)n2 * a + j] = t.add(out.c_[(std::size_t)n2 * a + j], c);
    }
  }
  out.floor_ = std::max(0L, floor_ - k);
  return out;
}

std::vector<std::uint64_t> PadicScalar::residue() const {
  std::vector<std::uint64_t> r(t_->a);
  for (int j = 0; j < t_->a; ++j) r[j] = c_[j] % t_->p;
  return r;
}

PadicScalar PadicScalar::to_tower(const TowerConfig& t) const {
  if (t.p != t_->p || t.a != t_->a || t.e != t_->e) throw std::invalid_argument("incompatible towers");
  PadicScalar r = *this;
  r.t_ = &t;
  for (auto& c : r.c_) c %= t.modulus;
  r.floor_ = std::min(floor_, (long)t.e * t.N);
  return r;
}

PadicScalar PadicScalar::truncate(int prec) const {
  if (prec >= t_->N) return *this;
  std::uint64_t m = 1;
  for (int i = 0; i < prec; ++i) m *= t_->p;
  PadicScalar r = *this;
  for (auto& c : r.c_) c %= m;
  return r;
}

long PadicScalar::agreement(const PadicScalar& y) const {
  return (*this - y).valuation_hat() / t_->e;
}

std::string PadicScalar::digits(int prec) const {
  prec = std::min(prec, t_->N);
  std::ostringstream os;
  os << "p^" << prec << ":[";
  const int a = t_->a;
  for (int i = 0; i < t_->e; ++i)
    for (int j = 0; j < a; ++j) {
      if (i || j) os << ';';
      std::uint64_t c = coeff(i, j);
      for (int d = 0; d < prec; ++d) {
        os << (d ? "," : "") << c % t_->p;
        c /= t_->p;
      }
    }
  os << ']';
  return os.str();
}

std::string PadicScalar::pretty(int prec) const {
  prec = std::min(prec, t_->N);
  std::uint64_t m = 1;
  for (int i = 0; i < prec; ++i) m *= t_->p;
  std::ostringstream os;
  bool any = false;
  const int a = t_->a;
  for (int i = 0; i < t_->e; ++i) {
    std::vector<std::uint64_t> v(a);
    bool nz = false;
    for (int j = 0; j < a; ++j) {
      v[j] = coeff(i, j) % m;
      nz |= v[j] != 0;
    }
    if (!nz) continue;
    if (any) os << " + ";
    any = true;
    if (a == 1) {
      os << v[0];
    } else {
      os << '(';
      for (int j = 0; j < a; ++j) os << (j ? "," : "") << v[j];
      os << ')';
    }
    if (i) os << "*h^" << i;
  }
  if (!any) os << '0';
  os << " mod p^" << prec;
  return os.str();
}

KappaExponent KappaExponent::from_integer(std::uint64_t p, std::uint64_t k) {
  KappaExponent kx;
  kx.exact = true;
  while (k) kx.digits.push_back(k % p), k /= p;
  kx.M = (int)kx.digits.size();
  return kx;
}

KappaExponent KappaExponent::from_digits(std::vector<std::uint64_t> digits, int M) {
  KappaExponent kx;
  kx.digits = std::move(digits);
  if ((int)kx.digits.size() > M) kx.digits.resize(M);
  kx.M = M;
  return kx;
}

KappaExponent KappaExponent::ones(int M) { return from_digits(std::vector<std::uint64_t>(M, 1), M); }

std::string KappaExponent::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < digits.size(); ++i) os << (i ? "," : "") << digits[i];
  os << ')';
  if (exact) os << " exact";
  else os << " mod p^" << M;
  return os.str();
}

int kappa_precision_rule(const TowerConfig& t) {
  // N + ceil(log_p(N (p-1) e))
  std::uint64_t x = (std::uint64_t)t.N * (t.p - 1) * t.e;
  int l = 0;
  std::uint64_t pw = 1;
  while (pw < x) pw *= t.p, ++l;
  return t.N + l;
}

PadicScalar teichmuller(const std::vector<std::uint64_t>& residue, const TowerConfig& t) {
  if ((int)residue.size() > t.a) throw std::invalid_argument("residue has too many coefficients");
  ZqVec x(t.a, 0);
  for (std::size_t j = 0; j < residue.size(); ++j) x[j] = residue[j] % t.p;
  const std::uint64_t q = t.q();
  for (int i = 0; i < t.N; ++i) x = zq_pow(t, x, q);
  return PadicScalar::from_unramified(t, x);
}

std::vector<std::uint64_t> kappa_binomials(const KappaExponent& kappa, const TowerConfig& t, int lmax) {
  mpz_class K = 0, pw = 1;
  for (auto d : kappa.digits) {
    K += pw * (unsigned long)d;
    pw *= (unsigned long)t.p;
  }
  mpz_class mod = 1;
  for (int i = 0; i < t.N; ++i) mod *= (unsigned long)t.p;
  std::vector<std::uint64_t> out;
  mpz_class c = 1;
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0) {
      c *= (K - (l - 1));
      mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), (unsigned long)l);
    }
    mpz_class r = c % mod;
    if (r < 0) r += mod;
    out.push_back(r.get_ui());
    if (c == 0) {
      out.resize(lmax + 1, 0);
      break;
    }
  }
  return out;
}

PadicScalar one_unit_power(const PadicScalar& u, const KappaExponent& kappa) {
  const TowerConfig& t = u.tower();
  auto res = u.residue();
  for (int j = 0; j < t.a; ++j)
    if (res[j] != (j == 0 ? 1u : 0u)) throw std::domain_error("one_unit_power: argument is not a 1-unit");
  if (!kappa.exact && kappa.M < kappa_precision_rule(t))
    throw std::domain_error("one_unit_power: kappa precision M=" + std::to_string(kappa.M) + " below rule " +
                            std::to_string(kappa_precision_rule(t)));
  PadicScalar one = PadicScalar::from_uint(t, 1);
  PadicScalar x = u - one;
  long v = x.valuation_hat();
  const long target = (long)t.e * t.N;
  if (v >= target) return one;
  int L = (int)((target + v - 1) / v);
  auto binom = kappa_binomials(kappa, t, L);
  PadicScalar acc = one, xl = one;
  for (int l = 1; l <= L; ++l) {
    xl = xl * x;
    if (binom[l]) acc += xl.scale(binom[l]);
  }
  return acc;
}

PadicScalar frobenius_sigma(const PadicScalar& x) {
  const TowerConfig& t = x.tower();
  if (t.a == 1) return x;
  PadicScalar r = x;
  const int a = t.a;
  for (int k = 0; k < x.slots(); ++k) {
    for (int i = 0; i < a; ++i) {
      std::uint64_t acc = 0;
      for (int j = 0; j < a; ++j) acc = t.add(acc, t.mul(t.sigma_matrix[(std::size_t)i * a + j], x.c_[(std::size_t)k * a + j]));
      r.c_[(std::size_t)k * a + i] = acc;
    }
  }
  return r;
}

PadicScalar frobenius_sigma_power(const PadicScalar& x, int k) {
  const TowerConfig& t = x.tower();
  k %= t.a;
  if (k < 0) k += t.a;
  PadicScalar r = x;
  for (int i = 0; i < k; ++i) r = frobenius_sigma(r);
  return r;
}

}  // namespace ur
