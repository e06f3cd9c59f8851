#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "unitroot/cyclotomic.hpp"
#include "unitroot/fp_poly.hpp"

namespace ur {

// F_{p^k} with elements encoded as code = sum c_i p^i over the basis X^i, X a root of least_irreducible(p, k).
// Arithmetic runs on discrete-log tables with Zech logarithms.
class FqField {
 public:
  using Elem = std::uint32_t;
  static constexpr std::int64_t kZeroLog = -1;

  static std::shared_ptr<const FqField> make(std::uint64_t p, int k);

  std::uint64_t p() const { return p_; }
  int degree() const { return k_; }
  std::uint64_t size() const { return q_; }
  const FpPoly& minpoly() const { return minpoly_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_coeffs(const std::vector<std::uint64_t>& c) const;
  std::vector<std::uint64_t> coeffs(Elem x) const;

  std::int64_t log(Elem x) const { return x == 0 ? kZeroLog : log_[x]; }
  Elem exp(std::int64_t l) const { return l < 0 ? 0 : exp_[l % (std::int64_t)(q_ - 1)]; }
  // Sum of two elements given by logs.
  std::int64_t add_logs(std::int64_t a, std::int64_t b) const;

  Elem add(Elem x, Elem y) const { return exp(add_logs(log(x), log(y))); }
  Elem neg(Elem x) const;
  Elem sub(Elem x, Elem y) const { return add(x, neg(y)); }
  Elem mul(Elem x, Elem y) const;
  Elem inv(Elem x) const;
  Elem pow(Elem x, std::int64_t e) const;
  Elem frobenius(Elem x) const { return pow(x, (std::int64_t)p_); }
  // Trace down to F_p, as an integer in [0, p).
  std::uint32_t trace(Elem x) const { return trace_[x]; }
  std::uint32_t trace_log(std::int64_t l) const { return l < 0 ? 0 : trace_by_log_[l]; }

  // Embedding of F_{p^j} (j | k) into this field, as a table indexed by codes of the subfield.
  const std::vector<Elem>& embedding_from(const FqField& sub) const;

 private:
  std::uint64_t p_ = 0;
  int k_ = 0;
  std::uint64_t q_ = 0;
  FpPoly minpoly_;
  std::vector<std::uint32_t> exp_, log_, trace_, trace_by_log_;
  std::vector<std::int32_t> zech_;  // log(1 + g^n), -1 when zero
  std::int64_t neg_one_log_ = 0;
  mutable std::deque<std::pair<int, std::vector<Elem>>> embeddings_;
  void build();
};

using Field = std::shared_ptr<const FqField>;

// F_{q^d} as an absolute field of degree k*d.
Field extension(const FqField& field, int d);

struct ClosedPoint {
  std::vector<FqField::Elem> orbit_rep;  // coordinates in F_{q^d}
  int degree = 1;
};

// One representative per Frobenius orbit (x -> x^q) of (F_{q^d}^x)^s, for d <= max_degree, by degree then code order.
std::vector<ClosedPoint> closed_points(const FqField& field, int s, int max_degree);

CyclotomicInteger additive_character(const FqField& field, FqField::Elem x);

}  // namespace ur
