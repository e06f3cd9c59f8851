#include "unitroot/cyclotomic.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace ur {

namespace {

// Reduce a coefficient vector indexed by powers of z modulo z^p - 1 and then the cyclotomic relation.
template <class T>
std::vector<T> reduce(std::uint64_t p, const std::vector<T>& v) {
  std::vector<T> w(p);
  for (std::size_t i = 0; i < v.size(); ++i) w[i % p] += v[i];
  std::vector<T> c(p - 1);
  for (std::uint64_t i = 0; i + 1 < p; ++i) c[i] = w[i] - w[p - 1];
  return c;
}

template <class T>
std::string format_poly(const std::vector<T>& c) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    T mag = c[i] < 0 ? T(-c[i]) : c[i];
    if (c[i] < 0) os << '-';
    else if (!first) os << '+';
    first = false;
    if (i == 0) {
      os << mag;
      continue;
    }
    if (mag != 1) {
      os << mag;
      if constexpr (std::is_same_v<T, mpq_class>) os << '*';
    }
    os << 'z';
    if (i > 1) os << '^' << i;
  }
  if (first) os << '0';
  return os.str();
}

}  // namespace

CyclotomicRational::CyclotomicRational(std::uint64_t p) : p_(p), c_(p - 1) {}

CyclotomicRational CyclotomicRational::from_int(std::uint64_t p, long v) {
  CyclotomicRational r(p);
  r.c_[0] = v;
  return r;
}

CyclotomicRational CyclotomicRational::zeta_power(std::uint64_t p, std::uint64_t k) {
  std::vector<mpq_class> v(p);
  v[k % p] = 1;
  CyclotomicRational r(p);
  r.c_ = reduce(p, v);
  return r;
}

bool CyclotomicRational::is_zero() const {
  for (auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool CyclotomicRational::is_integral() const {
  for (auto& x : c_)
    if (x.get_den() != 1) return false;
  return true;
}

CyclotomicRational operator+(const CyclotomicRational& x, const CyclotomicRational& y) {
  CyclotomicRational r = x;
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += y.c_[i];
  return r;
}

CyclotomicRational operator-(const CyclotomicRational& x, const CyclotomicRational& y) {
  CyclotomicRational r = x;
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= y.c_[i];
  return r;
}

CyclotomicRational CyclotomicRational::operator-() const {
  CyclotomicRational r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

CyclotomicRational operator*(const CyclotomicRational& x, const CyclotomicRational& y) {
  const std::uint64_t p = x.p_;
  std::vector<mpq_class> v(2 * p);
  for (std::size_t i = 0; i < x.c_.size(); ++i) {
    if (x.c_[i] == 0) continue;
    for (std::size_t j = 0; j < y.c_.size(); ++j) v[i + j] += x.c_[i] * y.c_[j];
  }
  CyclotomicRational r(p);
  r.c_ = reduce(p, v);
  return r;
}

CyclotomicRational CyclotomicRational::scaled(const mpq_class& s) const {
  CyclotomicRational r = *this;
  for (auto& v : r.c_) v *= s;
  return r;
}

CyclotomicRational CyclotomicRational::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero in Q(zeta_p)");
  const std::size_t n = p_ - 1;
  // columns: x * z^j
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n + 1));
  for (std::size_t j = 0; j < n; ++j) {
    CyclotomicRational col = *this * zeta_power(p_, j);
    for (std::size_t i = 0; i < n; ++i) m[i][j] = col.c_[i];
  }
  m[0][n] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) throw std::domain_error("singular multiplication matrix");
    std::swap(m[piv], m[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  CyclotomicRational r(p_);
  for (std::size_t i = 0; i < n; ++i) r.c_[i] = m[i][n] / m[i][i];
  return r;
}

std::string CyclotomicRational::str() const { return format_poly(c_); }

CyclotomicInteger CyclotomicInteger::from_int(std::uint64_t p, long v) {
  CyclotomicInteger r(p);
  r.c_[0] = v;
  return r;
}

CyclotomicInteger CyclotomicInteger::zeta_power(std::uint64_t p, std::uint64_t k) {
  std::vector<mpz_class> v(p);
  v[k % p] = 1;
  CyclotomicInteger r(p);
  r.c_ = reduce(p, v);
  return r;
}

CyclotomicInteger CyclotomicInteger::from_exponent_counts(std::uint64_t p, const std::vector<mpz_class>& counts) {
  CyclotomicInteger r(p);
  r.c_ = reduce(p, counts);
  return r;
}

CyclotomicInteger CyclotomicInteger::from_rational(const CyclotomicRational& x) {
  if (!x.is_integral()) throw std::domain_error("non-integral cyclotomic coefficient");
  CyclotomicInteger r(x.p());
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = x.coeffs()[i].get_num();
  return r;
}

CyclotomicRational CyclotomicInteger::to_rational() const {
  CyclotomicRational r(p_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.coeffs()[i] = c_[i];
  return r;
}

CyclotomicInteger operator+(const CyclotomicInteger& x, const CyclotomicInteger& y) {
  CyclotomicInteger r = x;
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += y.c_[i];
  return r;
}

CyclotomicInteger operator*(const CyclotomicInteger& x, const CyclotomicInteger& y) {
  std::vector<mpz_class> v(2 * x.p_);
  for (std::size_t i = 0; i < x.c_.size(); ++i)
    for (std::size_t j = 0; j < y.c_.size(); ++j) v[i + j] += x.c_[i] * y.c_[j];
  CyclotomicInteger r(x.p_);
  r.c_ = reduce(x.p_, v);
  return r;
}

std::string CyclotomicInteger::str() const { return format_poly(c_); }

CyclotomicInteger CyclotomicInteger::parse(std::uint64_t p, const std::string& s) {
  CyclotomicInteger r(p);
  std::size_t i = 0;
  auto fail = [&] { throw std::invalid_argument("malformed cyclotomic integer: " + s); };
  if (s == "0") return r;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') sign = s[i++] == '-' ? -1 : 1;
    std::string digits;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) digits += s[i++];
    std::size_t power = 0;
    if (i < s.size() && s[i] == 'z') {
      ++i;
      power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::string e;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) e += s[i++];
        if (e.empty()) fail();
        power = std::stoul(e);
      }
    } else if (digits.empty()) {
      fail();
    }
    if (power + 1 >= p) fail();
    mpz_class c = digits.empty() ? mpz_class(1) : mpz_class(digits);
    r.c_[power] += sign * c;
  }
  return r;
}

}  // namespace ur
