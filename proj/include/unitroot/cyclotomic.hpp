#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace ur {

// Elements of Q(zeta_p) in the power basis 1, z, ..., z^{p-2}.
class CyclotomicRational {
 public:
  CyclotomicRational() = default;
  explicit CyclotomicRational(std::uint64_t p);
  static CyclotomicRational from_int(std::uint64_t p, long v);
  static CyclotomicRational zeta_power(std::uint64_t p, std::uint64_t k);

  std::uint64_t p() const { return p_; }
  const std::vector<mpq_class>& coeffs() const { return c_; }
  std::vector<mpq_class>& coeffs() { return c_; }

  bool is_zero() const;
  bool is_integral() const;
  friend CyclotomicRational operator+(const CyclotomicRational& x, const CyclotomicRational& y);
  friend CyclotomicRational operator-(const CyclotomicRational& x, const CyclotomicRational& y);
  friend CyclotomicRational operator*(const CyclotomicRational& x, const CyclotomicRational& y);
  CyclotomicRational operator-() const;
  CyclotomicRational& operator+=(const CyclotomicRational& y) { return *this = *this + y; }
  CyclotomicRational& operator-=(const CyclotomicRational& y) { return *this = *this - y; }
  CyclotomicRational scaled(const mpq_class& s) const;
  CyclotomicRational inverse() const;
  friend bool operator==(const CyclotomicRational& x, const CyclotomicRational& y) { return x.p_ == y.p_ && x.c_ == y.c_; }

  std::string str() const;

 private:
  std::uint64_t p_ = 0;
  std::vector<mpq_class> c_;
};

// Exact integers of Z[zeta_p].
class CyclotomicInteger {
 public:
  CyclotomicInteger() = default;
  explicit CyclotomicInteger(std::uint64_t p) : p_(p), c_(p - 1) {}
  static CyclotomicInteger from_int(std::uint64_t p, long v);
  static CyclotomicInteger zeta_power(std::uint64_t p, std::uint64_t k);
  // Sum_t counts[t] z^t, t in [0, p).
  static CyclotomicInteger from_exponent_counts(std::uint64_t p, const std::vector<mpz_class>& counts);
  static CyclotomicInteger from_rational(const CyclotomicRational& x);  // throws unless integral

  std::uint64_t p() const { return p_; }
  const std::vector<mpz_class>& coeffs() const { return c_; }
  CyclotomicRational to_rational() const;

  friend CyclotomicInteger operator+(const CyclotomicInteger& x, const CyclotomicInteger& y);
  friend CyclotomicInteger operator*(const CyclotomicInteger& x, const CyclotomicInteger& y);
  friend bool operator==(const CyclotomicInteger& x, const CyclotomicInteger& y) { return x.p_ == y.p_ && x.c_ == y.c_; }

  // Power-basis polynomial notation, e.g. "1+z", "-z^2", "0".
  std::string str() const;
  static CyclotomicInteger parse(std::uint64_t p, const std::string& s);

 private:
  std::uint64_t p_ = 0;
  std::vector<mpz_class> c_;
};

}  // namespace ur
