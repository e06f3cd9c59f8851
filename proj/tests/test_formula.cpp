#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "unitroot/formula.hpp"

using namespace ur;

namespace {

LaurentFamily family_k() {
  LaurentFamily k;
  k.p = 3;
  k.a = 1;
  k.n = 1;
  k.s = 1;
  k.f = {{{2}, true, 0}, {{-2}, true, 0}};
  k.P = {{{1}, {1}, 1}};
  k.finalize();
  return k;
}

std::uint64_t factorial(int k) {
  std::uint64_t r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

int vp(std::uint64_t x, std::uint64_t p) {
  int v = 0;
  while (x % p == 0) x /= p, ++v;
  return v;
}

}  // namespace

TEST_CASE("pi and the exponential coefficients") {
  auto t = make_tower(3, 1, 2, 6);
  auto pi = PadicScalar::pi(*t);
  CHECK((pi.pow(2) + PadicScalar::from_int(*t, 3)).is_zero());
  auto c = exp_pi_coefficients(10, *t);
  REQUIRE(c.size() == 11);
  CHECK(c[0] == PadicScalar::from_int(*t, 1));
  for (int k = 1; k <= 10; ++k) {
    INFO("k=" << k);
    auto lhs = c[k].scale(factorial(k) % t->modulus);
    CHECK(lhs.agreement(pi.pow(k)) >= t->N - vp(factorial(k), 3));
  }
}

TEST_CASE("Lambda series algebra") {
  auto t = make_tower(3, 1, 2, 4);
  LambdaSeries a;
  a.d = 6;
  a.terms[{0, 0}] = PadicScalar::from_int(*t, 1);
  a.terms[{1, 0}] = PadicScalar::from_int(*t, 2);
  a.terms[{1, 1}] = PadicScalar::from_int(*t, -5);
  a.terms[{0, 3}] = PadicScalar::from_int(*t, 7);
  auto prod = ls_mul(a, ls_inverse(a));
  for (auto& [k, v] : prod.terms) {
    bool zero_key = k == std::vector<int>{0, 0};
    CHECK(v == PadicScalar::from_int(*t, zero_key ? 1 : 0));
  }
  auto sub = ls_power_substitute(a, 2);
  CHECK(sub.terms.count({2, 2}) == 1);
  CHECK(sub.terms.count({1, 1}) == 0);
  std::vector<PadicScalar> pt{PadicScalar::from_int(*t, 2), PadicScalar::from_int(*t, 1)};
  CHECK(ls_eval(a, pt) == PadicScalar::from_int(*t, 1 + 4 - 10 + 7));
  CHECK(ls_eval(a, pt, 1) == PadicScalar::from_int(*t, 5));
}

TEST_CASE("exp(pi H) on K") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, (int)K.D, 4);
  auto caps = default_exp_caps(G, *t);
  CHECK(caps.d_Lambda == 36);
  CHECK(enumerate_unit_monoid(K.geom_gamma, caps.W_gamma).size() == 1);

  auto ser = exp_pi_h(K, caps, *t);
  CHECK(ser.weights_dominated);
  REQUIRE(ser.monomials.size() == 3);
  REQUIRE(ser.coeffs.count({0, 0}) == 1);
  // x-constant, lambda-constant part: sum_k pi^{2k} (Lambda_1 Lambda_2)^k / (k!)^2
  auto& A00 = ser.coeffs.at({0, 0});
  for (auto& [k, v] : A00.terms) {
    INFO("key " << k[0] << "," << k[1] << "," << k[2]);
    CHECK(k[0] == k[1]);
    CHECK(k[2] == 0);
  }
  for (int k = 0; 2 * k <= caps.d_Lambda; ++k) {
    std::uint64_t f = 1;
    int v = 0;
    for (int i = 2; i <= k; ++i) {
      std::uint64_t j = i;
      while (j % 3 == 0) j /= 3, ++v;
      f = f * j % t->modulus;
    }
    int e = k - 2 * v;
    REQUIRE(e >= 0);
    auto expect = PadicScalar::from_int(*t, k % 2 ? -1 : 1) * PadicScalar::from_int(*t, 3).pow(e) *
                  PadicScalar::from_uint(*t, f * f % t->modulus).inverse();
    auto it = A00.terms.find({k, k, 0});
    PadicScalar got = it == A00.terms.end() ? PadicScalar(*t) : it->second;
    INFO("k=" << k);
    CHECK(got == expect);
  }

  auto eta = build_eta(ser);
  REQUIRE(eta.Q.count({0, 0}) == 1);
  auto& q00 = eta.Q.at({0, 0});
  for (auto& [k, v] : q00.terms) CHECK(v == PadicScalar::from_int(*t, std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })));
}

TEST_CASE("ratio series and its value") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, (int)K.D, 4);
  auto caps = default_exp_caps(G, *t);
  caps.d_Lambda = 24;
  auto ser = exp_pi_h(K, caps, *t);

  auto F1 = f_ratio_series(ser, 1);
  CHECK(F1.constant(*t) == PadicScalar::from_int(*t, 1));
  auto F2 = f_ratio_series(ser, 2);
  auto prod = ls_mul(F1, ls_power_substitute(F1, 3));
  for (auto& [k, v] : F2.terms) {
    auto it = prod.terms.find(k);
    PadicScalar w = it == prod.terms.end() ? PadicScalar(*t) : it->second;
    CHECK(v == w);
  }
  for (auto& [k, v] : prod.terms) {
    int deg = 0;
    for (int x : k) deg += x;
    if (deg <= F2.d && !F2.terms.count(k)) CHECK(v.is_zero());
  }

  auto full = exp_pi_h(K, default_exp_caps(G, *t), *t);
  auto r = f_ratio_eval(G, full, *t, FMethod::TruncatedRatio);
  auto d = f_ratio_eval(G, full, *t, FMethod::DualPowerIteration);
  CHECK_FALSE(r.certified);
  CHECK(d.certified);
  CHECK(d.precision >= 3);
  CHECK((d.value - PadicScalar::from_int(*t, 1)).valuation_hat() >= 1);
  CHECK(r.value.agreement(d.value) >= 3);
}

TEST_CASE("eigenvector residual on K") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, (int)K.D, 4);
  auto caps = default_exp_caps(G, *t);
  auto tr = default_sym_truncation(G, *t);
  tr.prune = t->N;
  auto z = eigen_residual(G, KappaExponent::from_integer(3, 0), tr, caps, *t);
  CHECK(z.min_residual == Rational(4));
  auto one = eigen_residual(G, KappaExponent::from_integer(3, 1), tr, caps, *t);
  CHECK(one.min_residual >= Rational(3));
  CHECK(one.off_support_zero);
  CHECK(one.projection_ok);
  CHECK(one.support > 1);
}

TEST_CASE("four unit-root routes, kappa = 2") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, (int)K.D, 4);
  auto rep = verify_main_theorem(G, KappaExponent::from_integer(3, 2), VerifyOptions{}, *t);
  CHECK(rep.routes.size() == 3);
  CHECK(rep.joint >= 3);
  CHECK(rep.ok);
}
