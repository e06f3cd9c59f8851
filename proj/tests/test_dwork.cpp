#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unitroot/dwork.hpp"
#include "unitroot/errors.hpp"

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

NuclearMatrix diag(const TowerConfig& t, std::vector<std::int64_t> d) {
  NuclearMatrix M;
  M.tower = &t;
  M.certified = t.N;
  for (std::size_t i = 0; i < d.size(); ++i) {
    M.index.push_back({(long)i});
    M.weight.push_back(Rational((long)i));
    M.cols.push_back({{(int)i, PadicScalar::from_int(t, d[i])}});
  }
  return M;
}

}  // namespace

TEST_CASE("truncation cap rule") {
  auto t = make_tower(3, 1, 2, 4);
  CHECK(truncation_rule_cap(*t) == Rational(11));
  CHECK(certified_from_cap(*t, Rational(11), 2) == 4);
  CHECK(certified_from_cap(*t, Rational(4), 2) == 2);
}

TEST_CASE("Fredholm determinant of small matrices") {
  auto t = make_tower(3, 1, 2, 6);
  auto z = diag(*t, {0, 0, 0});
  auto fz = fredholm(z, 3);
  CHECK(fz.coeffs[0] == PadicScalar::from_int(*t, 1));
  for (int j = 1; j <= 3; ++j) CHECK(fz.coeffs[j].is_zero());
  auto d = diag(*t, {1, 3});
  auto fd = fredholm(d, 2);
  CHECK(fd.coeffs[1] == PadicScalar::from_int(*t, -4));
  CHECK(fd.coeffs[2] == PadicScalar::from_int(*t, 3));
  CHECK(fd.certified[2] == 6);
  auto d3 = diag(*t, {1, 3, 9, 27});
  auto f3 = fredholm(d3, 4);
  // prod (1 - 3^i T)
  CHECK(f3.coeffs[4].agreement(PadicScalar::from_int(*t, 729)) >= f3.certified[4]);
  CHECK(f3.coeffs[3].agreement(PadicScalar::from_int(*t, -(27 + 81 + 243 + 729))) >= f3.certified[3]);
  CHECK(f3.certified[3] == 5);
  CHECK_THROWS(fredholm(d, 3));
}

TEST_CASE("divide_int") {
  auto t = make_tower(3, 1, 2, 5);
  auto x = PadicScalar::from_int(*t, 18);
  CHECK(divide_int(x, 6) == PadicScalar::from_int(*t, 3));
  CHECK(divide_int(x, 9) == PadicScalar::from_int(*t, 2));
  CHECK_THROWS_AS(divide_int(PadicScalar::from_int(*t, 1), 3), PrecisionExhausted);
}

TEST_CASE("Gauss sum of f = x") {
  for (std::uint64_t p : {3, 5}) {
    LaurentFamily F;
    F.p = p;
    F.n = 1;
    F.s = 0;
    F.f = {{{1}, true, 0}};
    F.finalize();
    auto G = specialize(F, {1, {1}});
    auto t = make_tower(p, 1, (int)F.D, 3);
    for (int m = 1; m <= 2; ++m) {
      auto r = trace_formula_check(G, {{}, 1}, m, truncation_rule_cap(*t), *t);
      CHECK(r.certified == 3);
      CHECK(r.ok);
    }
  }
}

TEST_CASE("trace formula on the fibers of K") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, 2, 4);
  for (FqField::Elem lam : {1u, 2u})
    for (int m = 1; m <= 3; ++m) {
      auto r = trace_formula_check(G, {{lam}, 1}, m, truncation_rule_cap(*t), *t);
      INFO("lambda=" << lam << " m=" << m << " agreement=" << r.agreement);
      CHECK(r.certified == 4);
      CHECK(r.ok);
    }
  auto t2 = fiber_tower(G, 2, 3);
  auto pts = closed_points(*G.field, 1, 2);
  for (auto& pt : pts) {
    if (pt.degree != 2) continue;
    auto r = trace_formula_check(G, pt, 1, truncation_rule_cap(*t2), *t2);
    INFO("rep=" << pt.orbit_rep[0] << " agreement=" << r.agreement);
    CHECK(r.ok);
  }
  CHECK_THROWS_AS(fiber_matrix(G, {{1}, 1}, Rational(5), *t), PrecisionExhausted);
}

TEST_CASE("fiber determinant matches the character-sum L-polynomial") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, 2, 4);
  ClosedPoint lam{{1}, 1};
  auto direct = fiber_l_polynomial(G, lam, 4);
  auto dw = fiber_l_via_dwork(G, lam, 6, truncation_rule_cap(*t), *t);
  REQUIRE(dw.padic.size() == 7);
  for (int j = 0; j <= 6; ++j) {
    PadicScalar want = j < (int)direct.exact.size() ? zeta_embed(direct.exact[j], *t) : PadicScalar(*t);
    INFO("j=" << j << " certified=" << dw.certified[j]);
    CHECK(dw.padic[j].agreement(want) >= dw.certified[j]);
  }
  // stable under a larger cap
  auto wider = fiber_l_via_dwork(G, lam, 4, truncation_rule_cap(*t) + Rational(2), *t);
  for (int j = 0; j <= 4; ++j) CHECK(wider.padic[j].agreement(dw.padic[j]) >= std::min(wider.certified[j], dw.certified[j]));
}

TEST_CASE("total family trace formula of K") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, 2, 4);
  for (int m = 1; m <= 2; ++m) {
    auto r = total_trace_check(G, m, truncation_rule_cap(*t), *t);
    INFO("m=" << m << " agreement=" << r.agreement << " sum=" << r.sum.str());
    CHECK(r.ok);
  }
  auto A = total_family_matrix(G, truncation_rule_cap(*t), *t);
  auto det = fredholm(A, 4);
  auto np = newton_polygon(det.coeffs);
  CHECK(slope_zero_length(np) == 1);
}

TEST_CASE("Frobenius series floors") {
  auto K = family_k();
  auto G = specialize(K, {1, {1, 1}});
  auto t = make_tower(3, 1, 2, 4);
  auto fs = frobenius_series(G, 1, Rational(6), Rational(6), *t);
  CHECK(!fs.terms.empty());
  for (auto& [e, c] : fs.terms) {
    Rational w = Rational(e[0], 2) + Rational(std::abs(e[1]), 2);
    // ord >= (w_Gamma + w)(p-1)/p^2
    CHECK(c.valuation() >= w * Rational(2, 9));
  }
  CHECK(fs.terms.begin()->second.valid());
}
