#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "unitroot/padic.hpp"

using namespace ur;

namespace {

PadicScalar random_scalar(const TowerConfig& t, std::mt19937_64& rng, int step) {
  PadicScalar x(t);
  std::uniform_int_distribution<std::uint64_t> d(0, t.modulus - 1);
  for (int i = 0; i < t.e; i += step) {
    std::vector<std::uint64_t> c(t.a);
    for (auto& v : c) v = d(rng);
    x += PadicScalar::from_unramified(t, c).shift_hat(i);
  }
  return x;
}

}  // namespace

TEST_CASE("tower layout") {
  auto t = make_tower(3, 1, 2, 4);
  CHECK(t->e == 36);
  CHECK(t->pi_index == 18);
  CHECK(t->pitilde_index == 8);
  auto pi = PadicScalar::pi(*t);
  CHECK(pi.pow(2) + PadicScalar::from_int(*t, 3) == PadicScalar(*t));
  CHECK(PadicScalar::pi_tilde(*t).valuation() == Rational(2, 9));

  auto t2 = make_tower(2, 1, 1, 4);
  CHECK(t2->e == 4);
  CHECK(PadicScalar::pi(*t2) == PadicScalar::from_int(*t2, -2));

  CHECK_THROWS(make_tower(4, 1, 1, 4));
}

TEST_CASE("ring axioms on random samples") {
  std::mt19937_64 rng(11);
  for (auto [p, a] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {5, 1}, {2, 3}}) {
    auto t = make_tower(p, a, 1, 5);
    for (int trial = 0; trial < 30; ++trial) {
      int s1 = (trial % 3 == 0) ? t->e : (trial % 3 == 1 ? t->pi_index : 1);
      auto x = random_scalar(*t, rng, s1), y = random_scalar(*t, rng, t->pi_index), z = random_scalar(*t, rng, 1);
      CHECK((x + y) + z == x + (y + z));
      CHECK((x * y) * z == x * (y * z));
      CHECK(x * (y + z) == x * y + x * z);
      CHECK(x * y == y * x);
      CHECK(x - x == PadicScalar(*t));
      CHECK((x * y).valuation_hat() >= x.val_floor_hat() + y.val_floor_hat() - 0);
    }
  }
}

TEST_CASE("inverse and valuation") {
  std::mt19937_64 rng(5);
  auto t = make_tower(3, 2, 1, 6);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_scalar(*t, rng, 3);
    if (!x.is_unit()) continue;
    CHECK(x * x.inverse() == PadicScalar::from_int(*t, 1));
  }
  auto p3 = PadicScalar::from_int(*t, 9);
  CHECK(p3.valuation() == Rational(2));
  auto h = PadicScalar::pi_hat_power(*t, 1);
  CHECK(h.pow(t->e) == PadicScalar::from_int(*t, -3));
  CHECK(h.pow(5).unshift_hat(5) == PadicScalar::from_int(*t, 1));
}

TEST_CASE("teichmuller lifts") {
  auto t = make_tower(3, 1, 1, 6);
  CHECK(teichmuller({0}, *t) == PadicScalar(*t));
  CHECK(teichmuller({1}, *t) == PadicScalar::from_int(*t, 1));
  CHECK(teichmuller({2}, *t) == PadicScalar::from_int(*t, -1));

  auto t9 = make_tower(3, 2, 1, 4);
  auto w = teichmuller({0, 1}, *t9);
  CHECK(w.pow(8) == PadicScalar::from_int(*t9, 1));
  CHECK(w.residue() == std::vector<std::uint64_t>{0, 1});
  // multiplicativity over all of F_9
  for (int x = 0; x < 9; ++x)
    for (int y = 0; y < 9; ++y) {
      std::vector<std::uint64_t> xr{(std::uint64_t)x % 3, (std::uint64_t)x / 3}, yr{(std::uint64_t)y % 3, (std::uint64_t)y / 3};
      auto tx = teichmuller(xr, *t9), ty = teichmuller(yr, *t9);
      auto prod_res = (tx * ty).residue();
      CHECK(teichmuller(prod_res, *t9) == tx * ty);
      CHECK(tx.pow(9) == tx);
    }
}

TEST_CASE("frobenius sigma") {
  auto t9 = make_tower(3, 2, 1, 5);
  auto h = PadicScalar::pi_hat_power(*t9, 1);
  CHECK(frobenius_sigma(h) == h);
  for (int x = 1; x < 9; ++x) {
    std::vector<std::uint64_t> xr{(std::uint64_t)x % 3, (std::uint64_t)x / 3};
    auto tx = teichmuller(xr, *t9);
    CHECK(frobenius_sigma(tx) == tx.pow(3));
    CHECK(frobenius_sigma(frobenius_sigma(tx)) == tx);
  }
  auto t3 = make_tower(3, 1, 1, 5);
  std::mt19937_64 rng(3);
  auto y = random_scalar(*t3, rng, 1);
  CHECK(frobenius_sigma(y) == y);
}

TEST_CASE("one-unit powers") {
  auto t = make_tower(3, 1, 1, 6);
  auto u = PadicScalar::from_int(*t, 4);  // 1 + p
  CHECK(one_unit_power(u, KappaExponent::from_integer(3, 0)) == PadicScalar::from_int(*t, 1));
  CHECK(one_unit_power(u, KappaExponent::from_integer(3, 1)) == u);
  CHECK(one_unit_power(u, KappaExponent::from_integer(3, 3)) == u.pow(3));
  int M = kappa_precision_rule(*t);
  auto minus_one = KappaExponent::from_digits(std::vector<std::uint64_t>(M, 2), M);
  CHECK(one_unit_power(u, minus_one) * u == PadicScalar::from_int(*t, 1));

  // ramified 1-unit, additivity in kappa
  auto w = PadicScalar::from_int(*t, 1) + PadicScalar::pi(*t) * PadicScalar::from_int(*t, 2);
  auto k1 = KappaExponent::from_digits({1, 2, 0, 1, 1, 2, 1, 0, 2, 1, 1, 1}, M);
  auto k2 = KappaExponent::from_digits({2, 2, 1, 0, 1, 0, 0, 2, 1, 1, 0, 1}, M);
  // digit sum with carries
  std::vector<std::uint64_t> s(M, 0);
  std::uint64_t carry = 0;
  for (int i = 0; i < M; ++i) {
    std::uint64_t v = k1.digits[i] + k2.digits[i] + carry;
    s[i] = v % 3;
    carry = v / 3;
  }
  auto k12 = KappaExponent::from_digits(s, M);
  CHECK(one_unit_power(w, k12) == one_unit_power(w, k1) * one_unit_power(w, k2));
  for (std::uint64_t k = 0; k < 20; ++k) CHECK(one_unit_power(w, KappaExponent::from_integer(3, k)) == w.pow(k));
  CHECK_THROWS(one_unit_power(PadicScalar::from_int(*t, 2), KappaExponent::from_integer(3, 2)));
  CHECK_THROWS(one_unit_power(u, KappaExponent::from_digits({1, 1}, 2)));
}

TEST_CASE("canonical digits") {
  auto t = make_tower(3, 1, 1, 3);
  auto x = PadicScalar::from_int(*t, 5) + PadicScalar::pi(*t);
  auto s = x.digits(2);
  CHECK(s.rfind("p^2:[2,1;", 0) == 0);
  CHECK(x.digits(2) == x.compact().digits(2));
}
