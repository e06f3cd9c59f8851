// One PASS/FAIL line per acceptance criterion on the reference instance K.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "unitroot/dwork.hpp"
#include "unitroot/errors.hpp"
#include "unitroot/formula.hpp"
#include "unitroot/splitting.hpp"

using namespace ur;

namespace {

constexpr int kN = 4;
constexpr int kTraceDigits = 4;      // criterion 2
constexpr int kSeriesDegree = 9;     // criterion 3
constexpr int kLDegreeBound = 4;
constexpr int kFiberDegree = 3;      // fibers used for criteria 4 and 8
constexpr int kDualDegree = 4;       // criterion 6
constexpr int kDualDigits = 3;
constexpr int kJointDigits = 3;      // criterion 8
constexpr int kResidualDigits = 3;   // criterion 9
constexpr int kCapRaise = 2;         // criterion 10
const double kLimit[11] = {0, 1, 30, 10, 600, 600, 120, 120, 600, 600, 1800};

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

LaurentFamily family_gauss() {
  LaurentFamily g;
  g.p = 3;
  g.n = 1;
  g.s = 0;
  g.f = {{{1}, true, 0}};
  g.finalize();
  return g;
}

const LaurentFamily K = family_k();
const SpecializedFamily G = specialize(K, {1, {1, 1}});
const Tower T = make_tower(3, 1, (int)K.D, kN);

std::vector<KappaExponent> kappas(bool with_zero) {
  std::vector<KappaExponent> v;
  if (with_zero) v.push_back(KappaExponent::from_integer(3, 0));
  v.push_back(KappaExponent::from_integer(3, 1));
  v.push_back(KappaExponent::from_integer(3, 2));
  v.push_back(KappaExponent::ones(kappa_precision_rule(*T)));
  return v;
}

struct Outcome {
  bool ok = true;
  std::string detail;
  void need(bool c, const std::string& what) {
    if (!c) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

bool one_unit(const PadicScalar& x) {
  auto r = x.residue();
  if (r.empty() || r[0] != 1) return false;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i]) return false;
  return true;
}

SymTruncation raised(const SymTruncation& tr, const Rational& by) {
  SymTruncation r = tr;
  r.W_sym = tr.W_sym + by;
  r.W_gamma = tr.W_gamma + by;
  r.W_total = tr.W_total + by;
  return r;
}

// ---------------------------------------------------------------------------

Outcome c1() {
  Outcome o;
  for (std::uint64_t p : {2, 3, 5})
    for (int k : {1, 2}) {
      auto F = FqField::make(p, k);
      const auto q = F->size();
      std::vector<CyclotomicInteger> psi(q);
      for (FqField::Elem x = 0; x < q; ++x) psi[x] = additive_character(*F, x);
      bool add = true, orth = true;
      for (FqField::Elem x = 0; x < q; ++x)
        for (FqField::Elem y = 0; y < q; ++y)
          if (!(psi[F->add(x, y)] == psi[x] * psi[y])) add = false;
      for (FqField::Elem a = 0; a < q; ++a)
        for (FqField::Elem b = 0; b < q; ++b) {
          CyclotomicInteger s = CyclotomicInteger::from_int(p, 0);
          for (FqField::Elem x = 0; x < q; ++x) s = s + psi[F->mul(a, x)] * psi[F->neg(F->mul(b, x))];
          if (!(s == CyclotomicInteger::from_int(p, a == b ? (long)q : 0))) orth = false;
        }
      std::string f = "F_" + std::to_string(p) + "^" + std::to_string(k);
      o.need(add, f + " additivity");
      o.need(orth, f + " orthogonality");
    }
  return o;
}

Outcome c2() {
  Outcome o;
  long worst = kN;
  for (FqField::Elem lam : {1u, 2u})
    for (int m = 1; m <= 3; ++m) {
      auto r = trace_formula_check(G, {{lam}, 1}, m, truncation_rule_cap(*T), *T);
      worst = std::min(worst, std::min<long>(r.agreement, r.certified));
      o.need(r.ok && r.certified >= kTraceDigits && r.agreement >= kTraceDigits,
             "K lambda=" + std::to_string(lam) + " m=" + std::to_string(m));
    }
  auto gauss = family_gauss();
  auto gg = specialize(gauss, {1, {1}});
  auto tg = make_tower(3, 1, (int)gauss.D, kN);
  for (int m = 1; m <= 3; ++m) {
    auto r = trace_formula_check(gg, {{}, 1}, m, truncation_rule_cap(*tg), *tg);
    worst = std::min(worst, std::min<long>(r.agreement, r.certified));
    o.need(r.ok && r.certified >= kTraceDigits && r.agreement >= kTraceDigits, "f=x m=" + std::to_string(m));
  }
  o.note("min agreement " + std::to_string(worst) + " digits");
  return o;
}

Outcome c3() {
  Outcome o;
  int maxdeg = 0;
  for (auto& pt : closed_points(*G.field, 1, 1)) {
    std::vector<CyclotomicInteger> sums;
    for (int m = 1; m <= kSeriesDegree; ++m) sums.push_back(exp_sum(G, pt.orbit_rep, pt.degree, m));
    auto ser = l_series(sums, kSeriesDegree);
    auto rec = rational_recover(ser, kLDegreeBound);
    std::string tag = "lambda=" + std::to_string(pt.orbit_rep[0]);
    o.need(rec.recovered.has_value(), tag + " not recovered");
    if (!rec.recovered) continue;
    auto& num = rec.recovered->num;
    auto& den = rec.recovered->den;
    int deg = (int)std::max(num.size(), den.size()) - 1;
    maxdeg = std::max(maxdeg, deg);
    o.need(deg <= kLDegreeBound, tag + " degree " + std::to_string(deg));
    // den * series == num through T^9
    for (int i = 0; i <= kSeriesDegree; ++i) {
      CyclotomicRational acc = CyclotomicRational::from_int(3, 0);
      for (int j = 0; j < (int)den.size() && j <= i; ++j) acc += den[j] * ser.exact[i - j].to_rational();
      CyclotomicRational want = i < (int)num.size() ? num[i] : CyclotomicRational::from_int(3, 0);
      if (!(acc == want)) {
        o.need(false, tag + " round trip at T^" + std::to_string(i));
        break;
      }
    }
  }
  o.note("max degree " + std::to_string(maxdeg));
  return o;
}

Outcome c4() {
  Outcome o;
  auto fibers = fiber_unit_roots(G, kFiberDegree, kLDegreeBound, *T);
  for (auto& f : fibers) {
    o.need(slope_zero_length(f.L.newton_polygon) == 1, "fiber slope-zero count");
    o.need(one_unit(f.pi0), "fiber unit root not 1 mod pi_hat");
  }
  auto tr = default_sym_truncation(G, *T);
  for (auto& kap : kappas(false)) {
    auto B = beta_matrix(G, alpha_kappa_matrix(G, kap, tr, *T));
    auto l0 = l0_unit_root(G, B, kDualDegree);
    o.need(slope_zero_length(newton_polygon(l0.det.coeffs)) == 1, "det slope-zero count, kappa " + kap.str());
    o.need(one_unit(l0.unit_root), "det unit root not 1 mod pi_hat, kappa " + kap.str());
  }
  o.note(std::to_string(fibers.size()) + " fibers");
  return o;
}

Outcome c5() {
  Outcome o;
  auto tr = default_sym_truncation(G, *T);
  for (auto& kap : kappas(true)) {
    auto B = beta_matrix(G, alpha_kappa_matrix(G, kap, tr, *T));
    auto pc = projector_check(B, fredholm_pruned(B, kDualDegree));
    o.need(pc.unit_corner && pc.rest_small, "not the rank-one projector, kappa " + kap.str());
    o.need(pc.det_ok, "det not 1 - T, kappa " + kap.str());
  }
  return o;
}

Outcome c6() {
  Outcome o;
  auto tr = default_sym_truncation(G, *T);
  int lowest = kN;
  for (auto& kap : kappas(false)) {
    auto det = fredholm_pruned(beta_matrix(G, alpha_kappa_matrix(G, kap, tr, *T)), kDualDegree);
    auto dual = fredholm_pruned(dual_beta_matrix(G, dual_alpha_matrix(G, kap, tr, *T)), kDualDegree);
    for (int j = 0; j <= kDualDegree; ++j) {
      int cert = std::min(det.certified[j], dual.certified[j]);
      lowest = std::min(lowest, cert);
      o.need(cert >= kDualDigits, "certified " + std::to_string(cert) + " at T^" + std::to_string(j));
      o.need(det.coeffs[j].agreement(dual.coeffs[j]) >= cert, "kappa " + kap.str() + " differs at T^" + std::to_string(j));
    }
  }
  o.note("certified " + std::to_string(lowest) + " digits");
  return o;
}

Outcome c7() {
  Outcome o;
  auto kap = KappaExponent::ones(kappa_precision_rule(*T));
  auto r = finite_sym_approx(G, kap, {1, 4, 13}, default_sym_truncation(G, *T), *T);
  o.need(r.steps.size() == 3, "three steps");
  std::string d;
  for (auto& s : r.steps) {
    o.need(s.distance_p >= s.bound, "k=" + std::to_string(s.k) + " below its bound");
    d += (d.empty() ? "" : ",") + s.distance_p.str() + ">=" + s.bound.str();
  }
  o.need(r.monotone, "distances not decreasing");
  o.need(r.bounds_ok, "bound check");
  o.need(r.det_converges, "determinants do not converge");
  o.note("distances " + d);
  return o;
}

Outcome c8() {
  Outcome o;
  for (auto& kap : kappas(false)) {
    auto rep = verify_main_theorem(G, kap, VerifyOptions{}, *T);
    bool exact1 = kap.exact && kap.digits.size() == 1 && kap.digits[0] == 1;
    o.need(rep.routes.size() == (exact1 ? 4u : 3u), "route count, kappa " + kap.str());
    for (auto& r : rep.routes) o.need(r.certified, r.name + " uncertified");
    o.need(rep.joint >= kJointDigits, "joint " + std::to_string(rep.joint) + ", kappa " + kap.str());
    for (std::size_t i = 0; i < rep.routes.size(); ++i)
      for (std::size_t j = i + 1; j < rep.routes.size(); ++j)
        o.need(rep.agreement[i][j] >= kJointDigits, rep.routes[i].name + "/" + rep.routes[j].name + ", kappa " + kap.str());
    o.need(rep.ok, "report not ok, kappa " + kap.str());
    o.note(kap.str() + ": joint " + std::to_string(rep.joint));
  }
  return o;
}

Outcome c9() {
  Outcome o;
  auto tr = default_sym_truncation(G, *T);
  tr.prune = kN;
  auto caps = default_exp_caps(G, *T);
  // one notch: every weight cap up by 1/D, d_Lambda up by N p^2/(p-1)
  auto tr1 = raised(tr, Rational(1, K.D));
  auto caps1 = caps;
  caps1.W_gamma = caps.W_gamma + Rational(1, K.D);
  caps1.W_x = caps.W_x + Rational(1, K.D);
  caps1.d_Lambda = caps.d_Lambda + (int)(kN * K.p * K.p / (K.p - 1));
  for (auto& kap : {KappaExponent::from_integer(3, 1), KappaExponent::ones(kappa_precision_rule(*T))}) {
    auto a = eigen_residual(G, kap, tr, caps, *T);
    auto b = eigen_residual(G, kap, tr1, caps1, *T);
    o.need(a.min_residual >= Rational(kResidualDigits), "residual " + a.min_residual.str() + ", kappa " + kap.str());
    o.need(b.min_residual > a.min_residual, "no increase " + a.min_residual.str() + " -> " + b.min_residual.str());
    o.need(a.off_support_zero && a.projection_ok, "support checks, kappa " + kap.str());
    o.note(kap.str() + ": " + a.min_residual.str() + " -> " + b.min_residual.str());
  }
  return o;
}

void same_coeffs(Outcome& o, const std::vector<PadicScalar>& a, const std::vector<int>& ca, const std::vector<PadicScalar>& b,
                 const std::vector<int>& cb, const std::string& tag, int& compared) {
  for (std::size_t j = 0; j < std::min(a.size(), b.size()); ++j) {
    int cert = std::min(ca[j], cb[j]);
    ++compared;
    if (a[j].agreement(b[j]) < cert) o.need(false, tag + " moves at T^" + std::to_string(j));
  }
}

Outcome c10() {
  Outcome o;
  int compared = 0;
  const Rational up(kCapRaise);
  // Dwork fibers (criteria 2-4)
  for (FqField::Elem lam : {1u, 2u}) {
    auto a = fiber_l_via_dwork(G, {{lam}, 1}, kLDegreeBound, truncation_rule_cap(*T), *T);
    auto b = fiber_l_via_dwork(G, {{lam}, 1}, kLDegreeBound, truncation_rule_cap(*T) + up, *T);
    same_coeffs(o, a.padic, a.certified, b.padic, b.certified, "fiber " + std::to_string(lam), compared);
  }
  // total family (criterion 8, kappa = 1)
  auto t6 = retower(*T, kN + 2);
  auto da = fredholm(total_family_matrix(G, truncation_rule_cap(*t6), *t6), 8);
  auto db = fredholm(total_family_matrix(G, truncation_rule_cap(*t6) + up, *t6), 8);
  same_coeffs(o, da.coeffs, da.certified, db.coeffs, db.certified, "total family", compared);
  // beta and its dual (criteria 4-8)
  auto tr = default_sym_truncation(G, *T);
  auto tr2 = raised(tr, up);
  tr2.prune = sym_certified(G, tr, *T);
  for (auto& kap : kappas(true)) {
    auto pa = fredholm_pruned(beta_matrix(G, alpha_kappa_matrix(G, kap, tr, *T)), kDualDegree);
    auto pb = fredholm_pruned(beta_matrix(G, alpha_kappa_matrix(G, kap, tr2, *T)), kDualDegree);
    same_coeffs(o, pa.coeffs, pa.certified, pb.coeffs, pb.certified, "beta " + kap.str(), compared);
    auto qa = fredholm_pruned(dual_beta_matrix(G, dual_alpha_matrix(G, kap, tr, *T)), kDualDegree);
    auto qb = fredholm_pruned(dual_beta_matrix(G, dual_alpha_matrix(G, kap, tr2, *T)), kDualDegree);
    same_coeffs(o, qa.coeffs, qa.certified, qb.coeffs, qb.certified, "dual " + kap.str(), compared);
  }
  // finite approximants (criterion 7)
  auto ones = KappaExponent::ones(kappa_precision_rule(*T));
  auto fa = finite_sym_approx(G, ones, {1, 4, 13}, tr, *T);
  auto fb = finite_sym_approx(G, ones, {1, 4, 13}, tr2, *T);
  const int fc = sym_certified(G, tr, *T);
  for (std::size_t s = 0; s < std::min(fa.steps.size(), fb.steps.size()); ++s) {
    std::vector<int> cert(fa.steps[s].det.size(), fc);
    same_coeffs(o, fa.steps[s].det, cert, fb.steps[s].det, cert, "approximant " + std::to_string(fa.steps[s].k), compared);
  }
  o.note(std::to_string(compared) + " coefficients compared");
  return o;
}

}  // namespace

int main() {
  std::vector<std::function<Outcome()>> crit{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  int failed = 0;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = crit[i]();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sec > kLimit[i + 1]) o.need(false, "over time limit");
    failed += !o.ok;
    std::printf("criterion %zu: %s  (%.2fs) %s\n", i + 1, o.ok ? "PASS" : "FAIL", sec, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
