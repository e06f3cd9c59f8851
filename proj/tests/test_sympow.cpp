#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unitroot/sympow.hpp"

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

struct Fixture {
  LaurentFamily K = family_k();
  SpecializedFamily G = specialize(K, {1, {1, 1}});
  Tower t = make_tower(3, 1, 2, 4);
  SymTruncation tr = default_sym_truncation(G, *t);
};

}  // namespace

TEST_CASE("sym basis layout") {
  Fixture f;
  CHECK(f.tr.W_total == Rational(13, 2));
  CHECK(sym_certified(f.G, f.tr, *f.t) == 3);
  auto b = sym_basis(f.K, f.tr);
  REQUIRE(b.size() > 1);
  CHECK(b.indices[0].empty());
  for (std::size_t i = 1; i < b.size(); ++i) {
    CHECK(b.weights[i - 1] <= b.weights[i]);
    CHECK(std::is_sorted(b.indices[i].begin(), b.indices[i].end()));
    SymIndex prefix(b.indices[i].begin(), b.indices[i].end() - 1);
    CHECK(b.position.count(prefix) == 1);
    CHECK(b.weights[i] <= f.tr.W_sym);
  }
  SymTruncation capped = f.tr;
  capped.L_max = 2;
  auto bc = sym_basis(f.K, capped);
  for (auto& u : bc.indices) CHECK(u.size() <= 2);
  CHECK(sym_certified(f.G, capped, *f.t) < 3);
}

TEST_CASE("beta for kappa = 1 on K") {
  Fixture f;
  auto kap = KappaExponent::from_integer(3, 1);
  auto fam = alpha_kappa_matrix(f.G, kap, f.tr, *f.t);
  auto B = beta_matrix(f.G, fam);
  CHECK(B.certified == 3);
  CHECK(fam.c0.valid());
  CHECK((fam.c0 - PadicScalar::from_int(*f.t, 1)).valuation_hat() >= 1);
  CHECK(fam.nu_Y > Rational(0));
  CHECK(fam.nu_Z > Rational(0));

  // zero pattern and valuation floors
  bool pattern = true, floors = true;
  for (std::size_t j = 0; j < B.dim(); ++j)
    for (auto& [i, v] : B.cols[j]) {
      long gamma = B.index[i][0], mu = B.index[j][0];
      if (3 * gamma - mu < 0) pattern = false;
      if (normalized_valuation(B, i, (int)j) < Rational(0)) floors = false;
    }
  CHECK(pattern);
  CHECK(floors);

  auto det = fredholm_pruned(B, 4);
  auto pc = projector_check(B, det);
  CHECK(pc.unit_corner);
  CHECK(pc.rest_small);
  CHECK(pc.det_ok);
  CHECK(slope_zero_length(newton_polygon(det.coeffs)) == 1);

  auto so = sym_trace_check(f.G, kap, B, B.certified, *f.t);
  INFO("trace agreement " << so.agreement);
  CHECK(so.ok);

  auto dfam = dual_alpha_matrix(f.G, kap, f.tr, *f.t);
  auto BD = dual_beta_matrix(f.G, dfam);
  auto dd = fredholm_pruned(BD, 4);
  for (int j = 0; j <= 4; ++j) {
    INFO("j=" << j);
    CHECK(dd.certified[j] >= 3);
    CHECK(dd.coeffs[j].agreement(det.coeffs[j]) >= std::min(dd.certified[j], det.certified[j]));
  }
  auto ac = adjoint_check(B, BD, fam, B.certified);
  CHECK(ac.compared > 0);
  CHECK(ac.ok);

  auto l0 = l0_unit_root(f.G, B, 4);
  CHECK(l0.certified == 3);
  CHECK((l0.unit_root - PadicScalar::from_int(*f.t, 1)).valuation_hat() >= 1);
  // total family of the same instance
  auto t6 = make_tower(3, 1, 2, 6);
  auto A = total_family_matrix(f.G, truncation_rule_cap(*t6), *t6);
  auto tdet = fredholm(A, 8);
  LSeriesReport rep;
  rep.p = 3;
  rep.padic = tdet.coeffs;
  rep.certified = tdet.certified;
  auto root = series_unit_root(rep, *t6);
  REQUIRE(root.precision >= 3);
  CHECK(l0.unit_root.agreement(root.root.to_tower(*f.t)) >= 3);
}

TEST_CASE("normalization for several kappa") {
  Fixture f;
  std::vector<KappaExponent> ks{KappaExponent::from_integer(3, 0), KappaExponent::from_integer(3, 2),
                                KappaExponent::ones(kappa_precision_rule(*f.t))};
  for (auto& kap : ks) {
    auto B = beta_matrix(f.G, alpha_kappa_matrix(f.G, kap, f.tr, *f.t));
    auto pc = projector_check(B, fredholm_pruned(B, 4));
    INFO("kappa=" << kap.str());
    CHECK(pc.ok());
  }
}

TEST_CASE("integer powers") {
  Fixture f;
  auto a2 = alpha_kappa_matrix(f.G, KappaExponent::from_integer(3, 2), f.tr, *f.t);
  auto f2 = alpha_finite_matrix(f.G, 2, f.tr, *f.t);
  for (std::size_t j = 0; j < a2.basis.size(); ++j) {
    std::size_t r = a2.basis.indices[j].size();
    if (r > 2) {
      CHECK(f2.cols[j].empty());
      continue;
    }
    REQUIRE(a2.cols[j].size() == f2.cols[j].size());
    for (std::size_t k = 0; k < a2.cols[j].size(); ++k) CHECK(a2.cols[j][k].value == f2.cols[j][k].value);
  }
  // symmetric-power pairing on a finite power
  auto fam = alpha_finite_matrix(f.G, 4, f.tr, *f.t);
  auto dfam = dual_alpha_finite_matrix(f.G, 4, f.tr, *f.t);
  auto ac = adjoint_check(beta_matrix(f.G, fam), dual_beta_matrix(f.G, dfam), fam, 3);
  CHECK(ac.ok);
}

TEST_CASE("finite symmetric power approximation") {
  Fixture f;
  auto kap = KappaExponent::ones(kappa_precision_rule(*f.t));
  auto r = finite_sym_approx(f.G, kap, {1, 4, 13}, f.tr, *f.t);
  REQUIRE(r.steps.size() == 3);
  for (auto& s : r.steps) {
    INFO("k=" << s.k << " distance=" << s.distance_p.str() << " bound=" << s.bound.str());
    CHECK(s.distance_p >= s.bound);
  }
  CHECK(r.monotone);
  CHECK(r.bounds_ok);
  CHECK(r.det_converges);
  auto exact = finite_sym_approx(f.G, KappaExponent::from_integer(3, 20), {20}, f.tr, *f.t);
  CHECK(exact.steps[0].distance_p == Rational(3));
}
