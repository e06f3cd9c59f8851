#pragma once

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "unitroot/fp_poly.hpp"
#include "unitroot/rational.hpp"

namespace ur {

// Z_q[pi_hat] with pi_hat^e = -p, all coefficients modulo p^N.
struct TowerConfig {
  std::uint64_t p = 0;
  int a = 1;
  int D = 1;
  int e = 1;
  int N = 1;
  std::uint64_t modulus = 1;                    // p^N
  FpPoly residue_minpoly;                        // over F_p, degree a
  std::vector<std::uint64_t> unramified_minpoly; // integer lift, monic, degree a
  int pi_index = 0;                              // ord_pihat(pi)
  int pitilde_index = 0;                         // ord_pihat(pitilde)
  std::vector<std::uint64_t> sigma_matrix;       // a x a, column j = sigma(X^j)

  std::uint64_t q() const;
  std::uint64_t add(std::uint64_t x, std::uint64_t y) const { std::uint64_t s = x + y; return s >= modulus ? s - modulus : s; }
  std::uint64_t sub(std::uint64_t x, std::uint64_t y) const { return x >= y ? x - y : x + modulus - y; }
  std::uint64_t mul(std::uint64_t x, std::uint64_t y) const { return (std::uint64_t)((unsigned __int128)x * y % modulus); }
  std::uint64_t neg(std::uint64_t x) const { return x ? modulus - x : 0; }
  std::uint64_t from_signed(std::int64_t x) const;
};

using Tower = std::shared_ptr<const TowerConfig>;

Tower make_tower(std::uint64_t p, int a, int D, int N);
// Same ring at a different precision.
Tower retower(const TowerConfig& t, int N);

class PadicScalar {
 public:
  using Digits = boost::container::small_vector<std::uint64_t, 4>;

  PadicScalar() = default;
  explicit PadicScalar(const TowerConfig& t);  // zero

  static PadicScalar from_int(const TowerConfig& t, std::int64_t x);
  static PadicScalar from_uint(const TowerConfig& t, std::uint64_t x);
  // Element of Z_q from its coefficients in the basis X^j.
  static PadicScalar from_unramified(const TowerConfig& t, const std::vector<std::uint64_t>& coeffs);
  static PadicScalar pi_hat_power(const TowerConfig& t, int k);
  static PadicScalar pi(const TowerConfig& t) { return pi_hat_power(t, t.pi_index); }
  static PadicScalar pi_tilde(const TowerConfig& t) { return pi_hat_power(t, t.pitilde_index); }

  const TowerConfig& tower() const { return *t_; }
  bool valid() const { return t_ != nullptr; }
  int step() const { return step_; }
  int slots() const { return t_->e / step_; }
  // Coefficient of pi_hat^i * X^j.
  std::uint64_t coeff(int i, int j) const;
  const Digits& raw() const { return c_; }

  bool is_zero() const;
  // Exact ord_pihat, or e*N when zero modulo p^N.
  long valuation_hat() const;
  Rational valuation() const { return Rational(valuation_hat(), t_->e); }
  Rational val_floor() const { return Rational(floor_, t_->e); }
  long val_floor_hat() const { return floor_; }
  bool is_unit() const { return valuation_hat() == 0; }

  PadicScalar operator-() const;
  friend PadicScalar operator+(const PadicScalar& x, const PadicScalar& y);
  friend PadicScalar operator-(const PadicScalar& x, const PadicScalar& y);
  friend PadicScalar operator*(const PadicScalar& x, const PadicScalar& y);
  PadicScalar& operator+=(const PadicScalar& y) { return *this = *this + y; }
  PadicScalar& operator-=(const PadicScalar& y) { return *this = *this - y; }
  PadicScalar& operator*=(const PadicScalar& y) { return *this = *this * y; }
  friend bool operator==(const PadicScalar& x, const PadicScalar& y);

  PadicScalar scale(std::uint64_t k) const;  // multiply by an integer residue mod p^N
  PadicScalar pow(std::uint64_t k) const;
  PadicScalar inverse() const;               // units only
  PadicScalar shift_hat(int k) const;        // multiply by pi_hat^k, k >= 0
  // Divide by pi_hat^k when exactly divisible; the top k*... digits become unknown and are zero-filled.
  PadicScalar unshift_hat(int k) const;
  // Reduction modulo pi_hat as an element of F_q (coefficients over F_p).
  std::vector<std::uint64_t> residue() const;
  // Same value reduced or zero-extended into another precision of the same ring.
  PadicScalar to_tower(const TowerConfig& t) const;
  // Reduce modulo p^prec (prec <= N).
  PadicScalar truncate(int prec) const;
  // Agreement precision in p-digits: floor(ord_p(x - y)), capped at N.
  long agreement(const PadicScalar& y) const;

  // Canonical flat digit array, row-major (i, j), base-p digits little-endian, prec digits per coefficient.
  std::string digits(int prec) const;
  // Compact human form: nonzero terms as "c*h^i" with c the integer coefficient mod p^prec (a = 1) or a vector.
  std::string pretty(int prec) const;

  PadicScalar compact() const;

 private:
  const TowerConfig* t_ = nullptr;
  int step_ = 0;
  Digits c_;
  long floor_ = 0;

  PadicScalar with_step(int s) const;
  friend PadicScalar frobenius_sigma(const PadicScalar& x);
};

struct KappaExponent {
  std::vector<std::uint64_t> digits;  // base-p, little-endian
  int M = 0;                          // kappa known modulo p^M
  bool exact = false;                 // non-negative integer known exactly

  static KappaExponent from_integer(std::uint64_t p, std::uint64_t k);
  static KappaExponent from_digits(std::vector<std::uint64_t> digits, int M);
  // kappa = 1 + p + p^2 + ... truncated to M digits.
  static KappaExponent ones(int M);
  std::string str() const;
};

int kappa_precision_rule(const TowerConfig& t);

PadicScalar teichmuller(const std::vector<std::uint64_t>& residue, const TowerConfig& t);
PadicScalar one_unit_power(const PadicScalar& u, const KappaExponent& kappa);
PadicScalar frobenius_sigma(const PadicScalar& x);
PadicScalar frobenius_sigma_power(const PadicScalar& x, int k);

// Binomial coefficients C(K, l) mod p^N for the integer truncation K of kappa, l = 0..lmax.
std::vector<std::uint64_t> kappa_binomials(const KappaExponent& kappa, const TowerConfig& t, int lmax);

}  // namespace ur
