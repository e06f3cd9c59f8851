#include "unitroot/formula.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "unitroot/errors.hpp"

namespace ur {

namespace {

int total_degree(const std::vector<int>& k) {
  int s = 0;
  for (int x : k) s += x;
  return s;
}

LatticePoint negate(LatticePoint v) {
  for (auto& x : v) x = -x;
  return v;
}

std::vector<LatticePoint> unit_slice(const WeightedGeometry& geom, int dim, const Rational& cap) {
  if (dim == 0) return {LatticePoint{}};
  return enumerate_unit_monoid(geom, cap).points;
}

NuclearMatrix transpose(const NuclearMatrix& a) {
  NuclearMatrix b;
  b.tower = a.tower;
  b.index = a.index;
  b.weight = a.weight;
  b.certified = a.certified;
  b.cols.resize(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (auto& [i, v] : a.cols[j]) b.cols[i].emplace_back((int)j, v);
  return b;
}

FValue f_by_dual_iteration(const SpecializedFamily& G, const TowerConfig& t) {
  NuclearMatrix A = total_family_matrix(G, truncation_rule_cap(t), t);
  EigenResult ev = power_iteration(transpose(A));
  FValue r;
  r.value = ev.value;
  r.precision = std::min(A.certified, ev.stable_digits);
  r.certified = true;
  r.m = t.a;
  r.iterations = ev.iterations;
  return r;
}

}  // namespace

PadicScalar LambdaSeries::constant(const TowerConfig& t) const {
  for (auto& [k, v] : terms)
    if (total_degree(k) == 0) return v;
  return PadicScalar(t);
}

LambdaSeries ls_mul(const LambdaSeries& a, const LambdaSeries& b) {
  LambdaSeries c;
  c.d = std::min(a.d, b.d);
  std::vector<int> k;
  for (auto& [ka, va] : a.terms) {
    int da = total_degree(ka);
    for (auto& [kb, vb] : b.terms) {
      if (da + total_degree(kb) > c.d) continue;
      k.resize(ka.size());
      for (std::size_t i = 0; i < ka.size(); ++i) k[i] = ka[i] + kb[i];
      PadicScalar x = va * vb;
      auto it = c.terms.find(k);
      if (it == c.terms.end()) c.terms.emplace(k, std::move(x));
      else it->second += x;
    }
  }
  for (auto it = c.terms.begin(); it != c.terms.end();) {
    if (it->second.is_zero()) it = c.terms.erase(it);
    else it->second = it->second.compact(), ++it;
  }
  return c;
}

LambdaSeries ls_inverse(const LambdaSeries& a) {
  if (a.terms.empty()) throw std::domain_error("inverse of the zero series");
  const TowerConfig& t = a.terms.begin()->second.tower();
  PadicScalar a0 = a.constant(t);
  if (!a0.valid() || !a0.is_unit()) throw std::domain_error("series constant term is not a unit");
  PadicScalar inv0 = a0.inverse();
  // 1/a = inv0 * sum_j (-r)^j with r = a/a0 - 1
  LambdaSeries negr;
  negr.d = a.d;
  for (auto& [k, v] : a.terms)
    if (total_degree(k) > 0) negr.terms.emplace(k, -(v * inv0));
  LambdaSeries out, pw;
  out.d = pw.d = a.d;
  std::vector<int> zero(a.terms.begin()->first.size(), 0);
  pw.terms.emplace(zero, PadicScalar::from_int(t, 1));
  out.terms = pw.terms;
  for (int j = 1; j <= a.d && !negr.terms.empty(); ++j) {
    pw = ls_mul(pw, negr);
    if (pw.terms.empty()) break;
    for (auto& [k, v] : pw.terms) {
      auto it = out.terms.find(k);
      if (it == out.terms.end()) out.terms.emplace(k, v);
      else it->second += v;
    }
  }
  for (auto& [k, v] : out.terms) v = (v * inv0).compact();
  return out;
}

LambdaSeries ls_power_substitute(const LambdaSeries& a, std::uint64_t k) {
  LambdaSeries out;
  out.d = a.d;
  for (auto& [e, v] : a.terms) {
    long deg = (long)total_degree(e) * (long)k;
    if (deg > a.d) continue;
    std::vector<int> e2 = e;
    for (auto& x : e2) x *= (int)k;
    out.terms.emplace(std::move(e2), v);
  }
  return out;
}

PadicScalar ls_eval(const LambdaSeries& a, const std::vector<PadicScalar>& point, int dmax) {
  if (point.empty()) throw std::invalid_argument("empty evaluation point");
  const TowerConfig& t = point[0].tower();
  std::vector<std::vector<PadicScalar>> pw(point.size());
  PadicScalar sum(t);
  for (auto& [k, v] : a.terms) {
    if (dmax >= 0 && total_degree(k) > dmax) continue;
    PadicScalar x = v;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] == 0) continue;
      auto& P = pw[i];
      if (P.empty()) P.push_back(PadicScalar::from_int(t, 1));
      while ((int)P.size() <= k[i]) P.push_back(P.back() * point[i]);
      x = x * P[k[i]];
    }
    sum += x;
  }
  return sum;
}

ExpPiHCaps default_exp_caps(const SpecializedFamily& G, const TowerConfig& t) {
  ExpPiHCaps c;
  SymTruncation tr = default_sym_truncation(G, t);
  c.W_gamma = tr.W_gamma;
  c.W_x = tr.W_sym;
  const long p = (long)t.p;
  c.d_Lambda = (int)Rational(2 * t.N * p * p, p - 1).ceil();
  return c;
}

std::vector<PadicScalar> exp_pi_coefficients(int kmax, const TowerConfig& t) {
  // pi^k / k! = (-1)^v pi^{s_p(k)} / (k! / p^v), v = v_p(k!), using pi^{p-1} = -p
  std::vector<PadicScalar> c;
  const PadicScalar pi = PadicScalar::pi(t);
  std::uint64_t unit = 1 % t.modulus;
  int v = 0;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) {
      std::uint64_t x = (std::uint64_t)k;
      while (x % t.p == 0) x /= t.p, ++v;
      unit = (std::uint64_t)((unsigned __int128)unit * (x % t.modulus) % t.modulus);
    }
    long sp = 0;
    for (std::uint64_t x = (std::uint64_t)k; x; x /= t.p) sp += (long)(x % t.p);
    PadicScalar term = pi.pow((std::uint64_t)sp) * PadicScalar::from_uint(t, unit).inverse();
    if (v % 2) term = -term;
    c.push_back(term.compact());
  }
  return c;
}

ExpPiHSeries exp_pi_h(const LaurentFamily& fam, const ExpPiHCaps& caps, const TowerConfig& t) {
  ExpPiHSeries out;
  out.tower = &t;
  out.s = fam.s;
  out.n = fam.n;
  out.caps = caps;
  for (auto& f : fam.f) {
    LatticePoint e(fam.s, 0);
    e.insert(e.end(), f.u.begin(), f.u.end());
    out.monomials.push_back(e);
  }
  for (auto& P : fam.P) {
    LatticePoint e = P.gamma;
    e.insert(e.end(), P.v.begin(), P.v.end());
    out.monomials.push_back(e);
  }
  const int T = (int)out.monomials.size();
  const int dim = fam.s + fam.n;

  std::set<LatticePoint> cells;
  auto G0 = unit_slice(fam.geom_gamma, fam.s, caps.W_gamma);
  auto U0 = unit_slice(fam.geom_f, fam.n, caps.W_x);
  for (auto& g : G0)
    for (auto& u : U0) {
      LatticePoint c = g;
      c.insert(c.end(), u.begin(), u.end());
      cells.insert(c);
      cells.insert(negate(c));
    }

  // number of k with |k| <= d
  long double count = 1;
  for (int i = 1; i <= T; ++i) count = count * (caps.d_Lambda + i) / i;
  if (count > 2e7) throw PrecisionExhausted("d_Lambda too large for the number of coefficient variables");

  auto coef = exp_pi_coefficients(caps.d_Lambda, t);
  std::vector<int> k(T, 0);
  LatticePoint E(dim, 0);
  std::function<void(int, int, PadicScalar)> rec = [&](int j, int left, PadicScalar c) {
    if (j == T) {
      if (!cells.count(E) || c.is_zero()) return;
      auto& S = out.coeffs[E];
      S.d = caps.d_Lambda;
      S.terms.emplace(k, c.compact());
      ++out.terms;
      return;
    }
    for (int kj = 0; kj <= left; ++kj) {
      k[j] = kj;
      rec(j + 1, left - kj, kj ? c * coef[kj] : c);
      for (int i = 0; i < dim; ++i) E[i] += out.monomials[j][i];
    }
    for (int i = 0; i < dim; ++i) E[i] -= (long)(left + 1) * out.monomials[j][i];
    k[j] = 0;
  };
  rec(0, caps.d_Lambda, PadicScalar::from_int(t, 1));
  for (auto& c : cells)
    if (!out.coeffs.count(c)) out.coeffs[c].d = caps.d_Lambda;

  // w_Gamma + w <= w_H on stored cells
  WeightedGeometry geomH = build_newton(out.monomials);
  bool dom = true;
  for (auto& [cell, S] : out.coeffs) {
    if (S.terms.empty()) continue;
    auto wh = weight(geomH, cell);
    if (!wh) {
      dom = false;
      continue;
    }
    LatticePoint g(cell.begin(), cell.begin() + fam.s), u(cell.begin() + fam.s, cell.end());
    auto wu = weight(fam.geom_f, u);
    Rational wg = fam.s ? weight(fam.geom_gamma, g).value_or(Rational(1000000)) : Rational(0);
    if (!wu || wg + *wu > *wh) dom = false;
  }
  out.weights_dominated = dom;
  return out;
}

EtaVector build_eta(const ExpPiHSeries& series) {
  EtaVector eta;
  LatticePoint zero(series.s + series.n, 0);
  auto it = series.coeffs.find(zero);
  if (it == series.coeffs.end()) throw std::logic_error("A_{0,0} missing");
  eta.J00 = it->second;
  const TowerConfig& t = *series.tower;
  if (!(eta.J00.constant(t) == PadicScalar::from_int(t, 1))) throw std::logic_error("A_{0,0} constant term is not 1");
  LambdaSeries inv = ls_inverse(eta.J00);
  for (auto& [cell, S] : series.coeffs) {
    LatticePoint neg = negate(cell);
    if (!series.coeffs.count(neg)) continue;
    if (cell == zero) {
      LambdaSeries one;
      one.d = S.d;
      one.terms.emplace(std::vector<int>(series.monomials.size(), 0), PadicScalar::from_int(t, 1));
      eta.Q[cell] = one;
      continue;
    }
    // coordinate at lambda^{-gamma} x^{-u} is A_{-gamma,-u} / A_{0,0}
    eta.Q[cell] = ls_mul(series.coeffs.at(neg), inv);
  }
  return eta;
}

std::vector<PadicScalar> teichmuller_point(const SpecializedFamily& G, const TowerConfig& t) {
  std::vector<PadicScalar> pt;
  for (auto c : G.f_coeffs) pt.push_back(lift_code(*G.field, c, t));
  for (auto c : G.P_coeffs) pt.push_back(lift_code(*G.field, c, t));
  return pt;
}

LambdaSeries f_ratio_series(const ExpPiHSeries& series, int m) {
  LatticePoint zero(series.s + series.n, 0);
  const LambdaSeries& J = series.coeffs.at(zero);
  std::uint64_t pm = 1;
  for (int i = 0; i < m; ++i) pm *= series.tower->p;
  return ls_mul(J, ls_inverse(ls_power_substitute(J, pm)));
}

FValue f_ratio_eval(const SpecializedFamily& G, const ExpPiHSeries& series, const TowerConfig& t, FMethod method) {
  if (t.a != G.family->a * G.t_degree) throw std::invalid_argument("tower must have unramified degree a * deg(t)");
  if (method == FMethod::DualPowerIteration) return f_by_dual_iteration(G, t);
  const int m = t.a;
  LambdaSeries R = f_ratio_series(series, m);
  auto pt = teichmuller_point(G, t);
  FValue r;
  r.m = m;
  r.value = ls_eval(R, pt);
  // observed stabilization against shorter partial sums
  int d = series.caps.d_Lambda;
  long prec = t.N;
  for (int dd = (3 * d) / 4; dd < d; ++dd) prec = std::min(prec, r.value.agreement(ls_eval(R, pt, dd)));
  r.precision = (int)prec;
  r.certified = false;
  return r;
}

EigenResidual eigen_residual(const SpecializedFamily& G, const KappaExponent& kappa, const SymTruncation& tr,
                             const ExpPiHCaps& caps, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  EigenResidual er;
  FValue F = f_by_dual_iteration(G, t);
  er.F_kappa = kappa.exact && kappa.digits.size() <= 1 && (kappa.digits.empty() || kappa.digits[0] == 0)
                   ? PadicScalar::from_int(t, 1)
                   : one_unit_power(F.value, kappa);
  er.F_precision = F.precision;

  auto dfam = dual_alpha_matrix(G, kappa, tr, t);
  NuclearMatrix BD = dual_beta_matrix(G, dfam);
  std::map<std::pair<LatticePoint, int>, int> where;
  for (std::size_t i = 0; i < BD.dim(); ++i) {
    LatticePoint g(BD.index[i].begin(), BD.index[i].end() - 1);
    where[{g, (int)BD.index[i].back()}] = (int)i;
  }

  ExpPiHSeries ser = exp_pi_h(fam, caps, t);
  EtaVector eta = build_eta(ser);
  auto pt = teichmuller_point(G, t);

  // h = Upsilon(eta) - 1 in raw dual coordinates, keyed by gamma ++ multiset
  using Key = std::vector<long>;
  std::map<Key, PadicScalar> h;
  std::map<LatticePoint, int> point_pos;
  for (std::size_t i = 0; i < dfam.basis.points.size(); ++i) point_pos[dfam.basis.points[i]] = (int)i;
  std::vector<Rational> pw = dfam.basis.point_weight;
  LatticePoint zero(fam.s + fam.n, 0);
  for (auto& [cell, Q] : eta.Q) {
    if (cell == zero) continue;
    LatticePoint g(cell.begin(), cell.begin() + fam.s), u(cell.begin() + fam.s, cell.end());
    Key key(g.begin(), g.end());
    if (std::any_of(u.begin(), u.end(), [](long x) { return x != 0; })) {
      auto it = point_pos.find(u);
      if (it == point_pos.end()) continue;
      key.push_back(it->second);
    }
    PadicScalar val = ls_eval(Q, pt);
    if (!val.is_zero()) h[key] = val;
  }
  auto key_weight = [&](const Key& k) {
    Rational w(0);
    for (std::size_t i = fam.s; i < k.size(); ++i) w = w + pw[k[i]];
    return w;
  };

  const int lmax = 64;
  auto binom = kappa_binomials(kappa, t, lmax);
  std::map<Key, PadicScalar> v, hl;
  hl[Key(fam.s, 0)] = PadicScalar::from_int(t, 1);
  for (int l = 0; l <= lmax && !hl.empty(); ++l) {
    if (l > 0) {
      std::map<Key, PadicScalar> next;
      for (auto& [ka, va] : hl)
        for (auto& [kb, vb] : h) {
          Key k(fam.s);
          for (int i = 0; i < fam.s; ++i) k[i] = ka[i] + kb[i];
          std::vector<long> ms(ka.begin() + fam.s, ka.end());
          ms.insert(ms.end(), kb.begin() + fam.s, kb.end());
          std::sort(ms.begin(), ms.end());
          k.insert(k.end(), ms.begin(), ms.end());
          if (key_weight(k) > tr.W_sym) continue;
          PadicScalar x = va * vb;
          auto it = next.find(k);
          if (it == next.end()) next.emplace(k, x);
          else it->second += x;
        }
      hl = std::move(next);
    }
    if (binom[l] == 0) continue;
    for (auto& [k, x] : hl) {
      PadicScalar y = x.scale(binom[l]);
      auto it = v.find(k);
      if (it == v.end()) v.emplace(k, y);
      else it->second += y;
    }
  }

  std::vector<PadicScalar> vec(BD.dim(), PadicScalar(t));
  for (auto& [k, x] : v) {
    LatticePoint g(k.begin(), k.begin() + fam.s);
    SymIndex ms(k.begin() + fam.s, k.end());
    auto pos = dfam.basis.position.find(ms);
    if (pos == dfam.basis.position.end()) continue;
    auto it = where.find({g, pos->second});
    if (it == where.end()) continue;
    vec[it->second] = x;
    ++er.support;
  }

  std::vector<PadicScalar> w(BD.dim(), PadicScalar(t));
  for (std::size_t j = 0; j < BD.dim(); ++j) {
    if (vec[j].is_zero()) continue;
    for (auto& [i, a] : BD.cols[j]) w[i] += a * vec[j];
  }
  er.certified = std::min({BD.certified, F.precision, t.N});
  const long rawmul = BD.scale / t.e;
  Rational worst(t.N), off(t.N);
  auto m0 = unit_slice(fam.geom_gamma, fam.s, tr.W_gamma);
  std::set<LatticePoint> m0set(m0.begin(), m0.end());
  for (std::size_t i = 0; i < BD.dim(); ++i) {
    PadicScalar r = w[i] - er.F_kappa * vec[i];
    if (r.is_zero()) continue;
    Rational nu(r.valuation_hat() * rawmul - BD.phi[i], BD.scale);
    if (nu > Rational(t.N)) nu = Rational(t.N);
    worst = std::min(worst, nu);
    LatticePoint g(BD.index[i].begin(), BD.index[i].end() - 1);
    if (!m0set.count(g)) off = std::min(off, nu);
  }
  er.min_residual = worst;
  er.off_support_zero = off >= Rational(er.certified);

  // lambda-support of pr_{M(f)} exp(pi H) outside M0(Gamma), shifted by M0(Gamma), never re-enters M0(Gamma)
  bool proj = true;
  if (fam.s > 0) {
    auto full = enumerate_monoid(fam.geom_gamma, caps.W_gamma);
    for (auto& g : full.points) {
      if (m0set.count(g)) continue;
      for (auto& g0 : m0) {
        LatticePoint sum = g;
        for (int i = 0; i < fam.s; ++i) sum[i] += g0[i];
        if (!weight(fam.geom_gamma, sum) || weight(fam.geom_gamma, negate(sum))) proj = false;
      }
    }
    // the support itself: every lambda-exponent of exp(pi H) lies in M(Gamma)
    for (auto& mono : ser.monomials) {
      LatticePoint g(mono.begin(), mono.begin() + fam.s);
      if (!weight(fam.geom_gamma, g)) proj = false;
    }
  }
  er.projection_ok = proj;
  return er;
}

MainTheoremReport verify_main_theorem(const SpecializedFamily& G, const KappaExponent& kappa, const VerifyOptions& opt,
                                      const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  MainTheoremReport rep;

  {
    LSeriesReport L = unit_l_function(G, kappa, opt.fiber_degree, opt.fiber_deg_bound, t);
    if (fam.s % 2 == 0) {
      L.padic = series_inverse(L.padic, (int)L.padic.size() - 1);
      L.newton_polygon = newton_polygon(L.padic);
    }
    SeriesRoot r = series_unit_root(L, t);
    rep.routes.push_back({"fiberwise", r.root, r.precision, true});
  }
  {
    SymTruncation tr = opt.trunc.W_total == Rational(0) ? default_sym_truncation(G, t) : opt.trunc;
    tr.d_T = opt.d_T;
    NuclearMatrix B = beta_matrix(G, alpha_kappa_matrix(G, kappa, tr, t));
    L0Result l0 = l0_unit_root(G, B, opt.d_T);
    rep.routes.push_back({"sympow", l0.unit_root, l0.certified, true});
  }
  {
    FValue F = f_by_dual_iteration(G, t);
    rep.routes.push_back({"formula", one_unit_power(F.value, kappa), F.precision, true});
  }
  bool is_one = kappa.exact && kappa.digits.size() == 1 && kappa.digits[0] == 1;
  if (is_one && opt.total_route) {
    Tower hi = retower(t, t.N + opt.total_extra);
    NuclearMatrix A = total_family_matrix(G, truncation_rule_cap(*hi), *hi);
    FredholmSeries det = fredholm(A, std::min<int>(opt.total_d_T, (int)A.dim()));
    LSeriesReport L;
    L.p = t.p;
    L.padic = det.coeffs;
    L.certified = det.certified;
    SeriesRoot r = series_unit_root(L, *hi);
    rep.routes.push_back({"total", r.root.to_tower(t), std::min(r.precision, t.N), true});
  }

  rep.joint = t.N;
  for (auto& r : rep.routes) rep.joint = std::min(rep.joint, r.precision);
  const std::size_t k = rep.routes.size();
  rep.agreement.assign(k, std::vector<long>(k, t.N));
  rep.ok = rep.joint > 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      rep.agreement[i][j] = rep.routes[i].value.agreement(rep.routes[j].value);
      if (rep.agreement[i][j] < rep.joint) rep.ok = false;
    }
  return rep;
}

}  // namespace ur
