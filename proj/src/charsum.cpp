#include "unitroot/charsum.hpp"

#include <algorithm>
#include <stdexcept>

#include "unitroot/errors.hpp"
#include "unitroot/parallel.hpp"
#include "unitroot/splitting.hpp"

namespace ur {

namespace {

struct Monomial {
  std::int64_t coeff_log;
  std::vector<long> expo;
};

// Sum of Psi(Tr(sum_k c_k y^{e_k})) over y in (F^x)^dim.
CyclotomicInteger torus_sum(const FqField& F, const std::vector<Monomial>& terms, int dim) {
  const std::int64_t n = (std::int64_t)F.size() - 1;
  const std::uint64_t p = F.p();
  std::size_t chunks = (std::size_t)n;
  std::vector<std::vector<std::int64_t>> partial(chunks, std::vector<std::int64_t>(p, 0));
  auto reduce_exp = [n](long e) {
    std::int64_t r = e % n;
    return r < 0 ? r + n : r;
  };
  std::vector<std::vector<std::int64_t>> ex(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    for (long e : terms[k].expo) ex[k].push_back(reduce_exp(e));
  parallel_for(chunks, [&](std::size_t first) {
    auto& cnt = partial[first];
    std::vector<std::int64_t> y(dim, 0);
    if (dim == 0) {
      if (first != 0) return;
    } else {
      y[0] = (std::int64_t)first;
    }
    std::vector<std::int64_t> base(terms.size());
    while (true) {
      std::int64_t acc = FqField::kZeroLog;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        __int128 l = terms[k].coeff_log;
        for (int i = 0; i < dim; ++i) l += (__int128)ex[k][i] * y[i];
        acc = F.add_logs(acc, (std::int64_t)(l % n));
      }
      cnt[F.trace_log(acc)]++;
      int i = dim - 1;
      while (i >= 1 && y[i] == n - 1) y[i] = 0, --i;
      if (i < 1) break;
      ++y[i];
    }
  });
  std::vector<mpz_class> total(p);
  for (auto& c : partial)
    for (std::uint64_t t = 0; t < p; ++t) total[t] += mpz_class(std::to_string(c[t]));
  return CyclotomicInteger::from_exponent_counts(p, total);
}

}  // namespace

CyclotomicInteger exp_sum(const SpecializedFamily& G, const std::vector<FqField::Elem>& lambda, int lambda_degree, int m) {
  const LaurentFamily& fam = *G.family;
  if ((int)lambda.size() != fam.s) throw std::invalid_argument("lambda has wrong dimension");
  for (auto c : lambda)
    if (c == 0) throw std::invalid_argument("zero coordinate in lambda");
  for (auto c : G.f_coeffs)
    if (c == 0) throw std::invalid_argument("zero coordinate in t_bar");
  Field Fl = extension(*G.field, lambda_degree);
  Field Fb = extension(*Fl, m);
  const auto& e_tl = Fl->embedding_from(*G.field);
  const auto& e_lb = Fb->embedding_from(*Fl);
  auto up = [&](FqField::Elem c) { return e_lb[e_tl[c]]; };
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < fam.f.size(); ++k) terms.push_back({Fb->log(up(G.f_coeffs[k])), fam.f[k].u});
  for (std::size_t k = 0; k < fam.P.size(); ++k) {
    FqField::Elem c = up(G.P_coeffs[k]);
    for (int i = 0; i < fam.s; ++i) c = Fb->mul(c, Fb->pow(e_lb[lambda[i]], fam.P[k].gamma[i]));
    terms.push_back({Fb->log(c), fam.P[k].v});
  }
  return torus_sum(*Fb, terms, fam.n);
}

CyclotomicInteger total_exp_sum(const SpecializedFamily& G, int m) {
  const LaurentFamily& fam = *G.family;
  Field Fb = extension(*G.field, m);
  const auto& emb = Fb->embedding_from(*G.field);
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < fam.f.size(); ++k) {
    std::vector<long> e(fam.s, 0);
    e.insert(e.end(), fam.f[k].u.begin(), fam.f[k].u.end());
    terms.push_back({Fb->log(emb[G.f_coeffs[k]]), e});
  }
  for (std::size_t k = 0; k < fam.P.size(); ++k) {
    std::vector<long> e = fam.P[k].gamma;
    e.insert(e.end(), fam.P[k].v.begin(), fam.P[k].v.end());
    terms.push_back({Fb->log(emb[G.P_coeffs[k]]), e});
  }
  return torus_sum(*Fb, terms, fam.s + fam.n);
}

LSeriesReport l_series(const std::vector<CyclotomicInteger>& sums, int d_T) {
  if ((int)sums.size() < d_T) throw std::invalid_argument("not enough exponential sums for the requested degree");
  if (sums.empty()) throw std::invalid_argument("no sums");
  const std::uint64_t p = sums[0].p();
  std::vector<CyclotomicRational> L(d_T + 1, CyclotomicRational(p));
  L[0] = CyclotomicRational::from_int(p, 1);
  for (int m = 1; m <= d_T; ++m) {
    CyclotomicRational acc(p);
    for (int k = 1; k <= m; ++k) acc += sums[k - 1].to_rational() * L[m - k];
    L[m] = acc.scaled(mpq_class(1, m));
  }
  LSeriesReport r;
  r.p = p;
  for (auto& c : L) {
    if (!c.is_integral()) throw CheckFailure("L-series coefficient is not a cyclotomic integer: " + c.str());
    r.exact.push_back(CyclotomicInteger::from_rational(c));
  }
  return r;
}

LSeriesReport invert_exact(const LSeriesReport& r) {
  const std::size_t d = r.exact.size();
  const std::uint64_t p = r.p;
  std::vector<CyclotomicRational> inv(d, CyclotomicRational(p));
  inv[0] = CyclotomicRational::from_int(p, 1);
  for (std::size_t m = 1; m < d; ++m) {
    CyclotomicRational acc(p);
    for (std::size_t k = 1; k <= m; ++k) acc += r.exact[k].to_rational() * inv[m - k];
    inv[m] = -acc;
  }
  LSeriesReport out;
  out.p = p;
  for (auto& c : inv) out.exact.push_back(CyclotomicInteger::from_rational(c));
  return out;
}

LSeriesReport rational_recover(const LSeriesReport& report, int max_degree) {
  const int n = (int)report.exact.size();
  if (n < 2 * max_degree + 2)
    throw std::invalid_argument("series must be known to T-degree " + std::to_string(2 * max_degree + 1));
  const std::uint64_t p = report.p;
  std::vector<CyclotomicRational> s;
  for (auto& c : report.exact) s.push_back(c.to_rational());
  // Berlekamp-Massey over Q(zeta_p)
  std::vector<CyclotomicRational> C{CyclotomicRational::from_int(p, 1)}, B = C;
  int L = 0, m = 1;
  CyclotomicRational b = CyclotomicRational::from_int(p, 1);
  for (int i = 0; i < n; ++i) {
    CyclotomicRational d = s[i];
    for (int j = 1; j <= L && j < (int)C.size(); ++j) d += C[j] * s[i - j];
    if (d.is_zero()) {
      ++m;
      continue;
    }
    CyclotomicRational coef = d * b.inverse();
    std::vector<CyclotomicRational> T = C;
    if (C.size() < B.size() + m) C.resize(B.size() + m, CyclotomicRational(p));
    for (std::size_t j = 0; j < B.size(); ++j) C[j + m] -= coef * B[j];
    if (2 * L <= i) {
      L = i + 1 - L;
      B = T;
      b = d;
      m = 1;
    } else {
      ++m;
    }
  }
  auto trim = [](std::vector<CyclotomicRational>& v) {
    while (v.size() > 1 && v.back().is_zero()) v.pop_back();
  };
  trim(C);
  std::vector<CyclotomicRational> A(L, CyclotomicRational(p));
  for (int i = 0; i < L; ++i)
    for (int j = 0; j <= i && j < (int)C.size(); ++j) A[i] += C[j] * s[i - j];
  if (A.empty()) A.push_back(CyclotomicRational(p));
  trim(A);
  int degA = A.size() == 1 && A[0].is_zero() ? 0 : (int)A.size() - 1;
  int degC = (int)C.size() - 1;
  if (degA > max_degree || degC > max_degree)
    throw CheckFailure("insufficient degree bound: recovered degrees " + std::to_string(degA) + "/" + std::to_string(degC));
  // round trip
  std::vector<CyclotomicRational> Cinv(n, CyclotomicRational(p));
  Cinv[0] = C[0].inverse();
  for (int i = 1; i < n; ++i) {
    CyclotomicRational acc(p);
    for (int j = 1; j <= i && j < (int)C.size(); ++j) acc += C[j] * Cinv[i - j];
    Cinv[i] = -(acc * Cinv[0]);
  }
  for (int i = 0; i < n; ++i) {
    CyclotomicRational v(p);
    for (int j = 0; j <= i && j < (int)A.size(); ++j) v += A[j] * Cinv[i - j];
    if (!(v == s[i])) throw CheckFailure("rational recovery round trip failed at T^" + std::to_string(i));
  }
  LSeriesReport out = report;
  out.recovered = LSeriesReport::Recovered{A, C, false};
  return out;
}

NewtonPolygon newton_polygon(const std::vector<PadicScalar>& coeffs) {
  std::vector<std::pair<int, Rational>> pts;
  for (std::size_t j = 0; j < coeffs.size(); ++j) pts.emplace_back((int)j, coeffs[j].valuation());
  NewtonPolygon hull;
  for (auto& pt : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull.back();
      // drop b when it lies on or above segment a -> pt
      Rational lhs = (b.second - a.second) * Rational(pt.first - a.first);
      Rational rhs = (pt.second - a.second) * Rational(b.first - a.first);
      if (lhs >= rhs) hull.pop_back();
      else break;
    }
    hull.push_back(pt);
  }
  return hull;
}

int slope_zero_length(const NewtonPolygon& np) {
  if (np.empty() || np[0].second != Rational(0)) return -1;
  int len = 0;
  for (std::size_t i = 1; i < np.size(); ++i) {
    if (np[i].second == Rational(0)) len = np[i].first;
    else break;
  }
  return len;
}

namespace {

PadicScalar horner(const std::vector<PadicScalar>& c, const PadicScalar& x) {
  PadicScalar acc(x.tower());
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

std::vector<PadicScalar> derivative(const std::vector<PadicScalar>& c) {
  std::vector<PadicScalar> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i].scale(i));
  if (d.empty()) d.push_back(PadicScalar(c[0].tower()));
  return d;
}

// Simple root of c near 1/c_1-type residue start; returns the reciprocal root.
PadicScalar hensel_reciprocal_root(const std::vector<PadicScalar>& c) {
  const TowerConfig& t = c[0].tower();
  auto dc = derivative(c);
  PadicScalar T = -(c[1].inverse() * c[0]);
  const long target = (long)t.e * t.N;
  for (int it = 0; it < 64; ++it) {
    PadicScalar d = horner(dc, T);
    if (!d.is_unit()) throw PrecisionExhausted("Hensel lifting: derivative is not a unit");
    PadicScalar step = horner(c, T) * d.inverse();
    T = T - step;
    if (step.valuation_hat() >= target) break;
  }
  return T.inverse();
}

}  // namespace

PadicScalar unit_root(LSeriesReport& report, const TowerConfig& t) {
  if (!report.recovered) throw std::invalid_argument("unit_root requires a recovered rational function");
  std::vector<PadicScalar> num, den;
  for (auto& c : report.recovered->num) num.push_back(zeta_embed(c, t).compact());
  for (auto& c : report.recovered->den) den.push_back(zeta_embed(c, t).compact());
  PadicScalar c0inv = num[0].inverse();
  for (auto& c : num) c = c * c0inv;
  report.newton_polygon = newton_polygon(num);
  int len = slope_zero_length(report.newton_polygon);
  if (len != 1) throw CheckFailure("expected exactly one unit reciprocal root, slope-0 length " + std::to_string(len));
  for (std::size_t j = 1; j < den.size(); ++j)
    if (den[j].is_unit() && !den[0].is_zero()) {
      auto dnp = newton_polygon(den);
      if (slope_zero_length(dnp) > 0) throw CheckFailure("denominator has a unit reciprocal root");
    }
  PadicScalar r = hensel_reciprocal_root(num);
  auto res = r.residue();
  if (res[0] != 1 || std::any_of(res.begin() + 1, res.end(), [](auto x) { return x != 0; }))
    throw CheckFailure("unit root is not a 1-unit");
  report.unit_root = r;
  report.unit_root_precision = t.N;
  return r;
}

LSeriesReport fiber_l_polynomial(const SpecializedFamily& G, const ClosedPoint& lambda, int deg_bound) {
  std::vector<CyclotomicInteger> sums;
  for (int m = 1; m <= deg_bound; ++m) sums.push_back(exp_sum(G, lambda.orbit_rep, lambda.degree, m));
  LSeriesReport r = l_series(sums, deg_bound);
  if (G.family->n % 2 == 0) r = invert_exact(r);
  LSeriesReport::Recovered rec;
  for (auto& c : r.exact) rec.num.push_back(c.to_rational());
  rec.den.push_back(CyclotomicRational::from_int(r.p, 1));
  rec.from_degree_bound = true;
  r.recovered = rec;
  return r;
}

std::vector<FiberUnitRoot> fiber_unit_roots(const SpecializedFamily& G, int max_degree, int deg_bound, const TowerConfig& t) {
  auto pts = closed_points(*G.field, G.family->s, max_degree);
  std::vector<FiberUnitRoot> out;
  for (auto& pt : pts) {
    FiberUnitRoot f;
    f.lambda = pt;
    f.L = fiber_l_polynomial(G, pt, deg_bound);
    f.pi0 = unit_root(f.L, t);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<PadicScalar> series_mul(const std::vector<PadicScalar>& a, const std::vector<PadicScalar>& b, int deg) {
  const TowerConfig& t = a[0].tower();
  std::vector<PadicScalar> c(deg + 1, PadicScalar(t));
  for (int i = 0; i <= deg && i < (int)a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j <= deg && j < (int)b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

std::vector<PadicScalar> series_inverse(const std::vector<PadicScalar>& a, int deg) {
  const TowerConfig& t = a[0].tower();
  std::vector<PadicScalar> inv(deg + 1, PadicScalar(t));
  PadicScalar a0inv = a[0].inverse();
  inv[0] = a0inv;
  for (int m = 1; m <= deg; ++m) {
    PadicScalar acc(t);
    for (int k = 1; k <= m && k < (int)a.size(); ++k) acc += a[k] * inv[m - k];
    inv[m] = -(acc * a0inv);
  }
  return inv;
}

LSeriesReport unit_l_function(const std::vector<FiberUnitRoot>& fibers, const KappaExponent& kappa, int d_T, const TowerConfig& t) {
  std::vector<PadicScalar> series(d_T + 1, PadicScalar(t));
  series[0] = PadicScalar::from_int(t, 1);
  for (auto& f : fibers) {
    int d = f.lambda.degree;
    if (d > d_T) continue;
    PadicScalar u = one_unit_power(f.pi0, kappa);
    std::vector<PadicScalar> factor(d_T + 1, PadicScalar(t));
    PadicScalar up = PadicScalar::from_int(t, 1);
    for (int j = 0; j * d <= d_T; ++j) {
      factor[j * d] = up;
      up = up * u;
    }
    series = series_mul(series, factor, d_T);
  }
  LSeriesReport r;
  r.p = t.p;
  r.padic = series;
  r.certified.assign(d_T + 1, t.N);
  r.newton_polygon = newton_polygon(series);
  return r;
}

LSeriesReport unit_l_function(const SpecializedFamily& G, const KappaExponent& kappa, int d_T, int deg_bound, const TowerConfig& t) {
  return unit_l_function(fiber_unit_roots(G, d_T, deg_bound, t), kappa, d_T, t);
}

LSeriesReport delta_q(const LSeriesReport& report, std::uint64_t q) {
  if (report.padic.empty()) throw std::invalid_argument("delta_q needs a p-adic series");
  const auto& g = report.padic;
  if (!g[0].is_unit()) throw std::domain_error("delta_q: constant term is not a unit");
  const int d = (int)g.size() - 1;
  std::vector<PadicScalar> gq = g;
  std::uint64_t qi = 1;
  const TowerConfig& t = g[0].tower();
  for (int i = 0; i <= d; ++i) {
    gq[i] = g[i].scale(qi % t.modulus);
    qi = (std::uint64_t)((unsigned __int128)qi * q % t.modulus);
  }
  LSeriesReport out;
  out.p = report.p;
  out.padic = series_mul(g, series_inverse(gq, d), d);
  out.certified = report.certified;
  // certified digits of coefficient i depend on coefficients <= i
  for (int i = 1; i <= d && i < (int)out.certified.size(); ++i)
    out.certified[i] = std::min(out.certified[i], out.certified[i - 1]);
  out.newton_polygon = newton_polygon(out.padic);
  return out;
}

SeriesRoot series_unit_root(const LSeriesReport& report, const TowerConfig& t) {
  const auto& c = report.padic;
  if (c.size() < 2) throw PrecisionExhausted("increase d_T: series too short");
  auto np = newton_polygon(c);
  if (slope_zero_length(np) != 1) throw PrecisionExhausted("increase d_T: slope-0 segment absent or not separated");
  int cert = t.N;
  for (auto v : report.certified) cert = std::min(cert, v);
  Rational gap(t.N);
  int d = (int)c.size() - 1;
  if (np.size() >= 3) gap = (np[2].second - np[1].second) / Rational(np[2].first - np[1].first);
  else gap = Rational(t.N);  // all higher coefficients vanish to working precision
  Rational bound = gap * Rational(d);
  int prec = (int)std::min<long>(cert, bound.floor());
  std::vector<PadicScalar> poly(c.begin(), c.end());
  PadicScalar root = hensel_reciprocal_root(poly);
  return {root.truncate(prec), prec, gap};
}

SeriesRoot power_sum_unit_root(const LSeriesReport& report, const TowerConfig& t) {
  const auto& c = report.padic;
  const int d = (int)c.size() - 1;
  if (d < 2) throw PrecisionExhausted("increase d_T: need at least two power sums");
  // -T g'/g = sum s_m T^m
  std::vector<PadicScalar> tg(d + 1, PadicScalar(t));
  for (int i = 1; i <= d; ++i) tg[i] = -c[i].scale(i);
  auto s = series_mul(tg, series_inverse(c, d), d);
  auto np = newton_polygon(c);
  Rational gap(t.N);
  if (np.size() >= 3) gap = (np[2].second - np[1].second) / Rational(np[2].first - np[1].first);
  if (!s[d - 1].is_unit()) throw PrecisionExhausted("power sums are not units");
  PadicScalar ratio = s[d] * s[d - 1].inverse();
  int prec = (int)std::min<long>(t.N, (gap * Rational(d - 1)).floor());
  return {ratio.truncate(prec), prec, gap};
}

}  // namespace ur
