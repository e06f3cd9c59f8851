#include "unitroot/dwork.hpp"

#include <algorithm>
#include <stdexcept>

#include "unitroot/errors.hpp"
#include "unitroot/parallel.hpp"

namespace ur {

SparseSeries series_product(const SparseSeries& a, const SparseSeries& b) {
  SparseSeries out;
  for (auto& [ea, ca] : a)
    for (auto& [eb, cb] : b) {
      PadicScalar c = ca * cb;
      if (c.is_zero()) continue;
      Exponent e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      auto it = out.find(e);
      if (it == out.end()) out.emplace(std::move(e), c);
      else it->second += c;
    }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero()) it = out.erase(it);
    else ++it;
  }
  return out;
}

PadicScalar lift_code(const FqField& F, FqField::Elem c, const TowerConfig& t) {
  if ((std::uint64_t)F.p() != t.p || t.a % F.degree() != 0) throw std::invalid_argument("field does not embed in the tower");
  Field big = FqField::make(t.p, t.a);
  const auto& emb = big->embedding_from(F);
  return teichmuller(big->coeffs(emb[c]), t);
}

namespace {

struct Monomial {
  Exponent expo;       // gamma ++ u (or u alone after specialization)
  PadicScalar coeff;   // Teichmüller
};

// theta(c y^e) as a sparse series.
SparseSeries theta_monomial(const SplittingSeries& th, const Monomial& mono) {
  SparseSeries s;
  PadicScalar ci = PadicScalar::from_int(mono.coeff.tower(), 1);
  for (int i = 0; i <= th.imax; ++i) {
    PadicScalar v = th.coeffs[i] * ci;
    if (!v.is_zero()) {
      Exponent e = mono.expo;
      for (auto& x : e) x *= i;
      s.emplace(std::move(e), v.compact());
    }
    ci = ci * mono.coeff;
  }
  return s;
}

SparseSeries product_of_thetas(const std::vector<Monomial>& monos, const TowerConfig& t) {
  auto th = theta(t, theta_default_imax(t));
  SparseSeries acc;
  std::size_t dim = monos.empty() ? 0 : monos[0].expo.size();
  acc.emplace(Exponent(dim, 0), PadicScalar::from_int(t, 1));
  for (auto& m : monos) acc = series_product(acc, theta_monomial(th, m));
  return acc;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Monomials of F^{sigma^i}(t_hat, lambda, x) with lambda symbolic.
std::vector<Monomial> family_monomials(const SpecializedFamily& G, int twist, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  const FqField& F = *G.field;
  std::uint64_t pi = ipow(fam.p, twist % (int)(t.a));
  std::vector<Monomial> out;
  for (std::size_t k = 0; k < fam.f.size(); ++k) {
    Exponent e(fam.s, 0);
    e.insert(e.end(), fam.f[k].u.begin(), fam.f[k].u.end());
    out.push_back({e, lift_code(F, F.pow(G.f_coeffs[k], (std::int64_t)pi), t)});
  }
  for (std::size_t k = 0; k < fam.P.size(); ++k) {
    Exponent e = fam.P[k].gamma;
    e.insert(e.end(), fam.P[k].v.begin(), fam.P[k].v.end());
    out.push_back({e, lift_code(F, F.pow(G.P_coeffs[k], (std::int64_t)pi), t)});
  }
  return out;
}

// Monomials of F^{sigma^i}(t_hat, lambda_hat, x) in x alone.
std::vector<Monomial> fiber_monomials(const SpecializedFamily& G, const ClosedPoint& lambda, int twist, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  Field Fl = extension(*G.field, lambda.degree);
  const auto& e_tl = Fl->embedding_from(*G.field);
  std::uint64_t pi = ipow(fam.p, twist);
  std::vector<Monomial> out;
  for (std::size_t k = 0; k < fam.f.size(); ++k)
    out.push_back({fam.f[k].u, lift_code(*Fl, Fl->pow(e_tl[G.f_coeffs[k]], (std::int64_t)pi), t)});
  for (std::size_t k = 0; k < fam.P.size(); ++k) {
    FqField::Elem c = e_tl[G.P_coeffs[k]];
    for (int i = 0; i < fam.s; ++i) c = Fl->mul(c, Fl->pow(lambda.orbit_rep[i], fam.P[k].gamma[i]));
    out.push_back({fam.P[k].v, lift_code(*Fl, Fl->pow(c, (std::int64_t)pi), t)});
  }
  return out;
}

Rational weight_or_throw(const WeightedGeometry& g, const LatticePoint& u) {
  auto w = weight(g, u);
  if (!w) throw std::logic_error("exponent " + format_point(u) + " outside the cone");
  return *w;
}

Exponent sub_scaled(const Exponent& row, const Exponent& col, long p) {
  Exponent e(row.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = p * row[i] - col[i];
  return e;
}

// One factor psi o S on the given index set.
NuclearMatrix step_matrix(const SparseSeries& S, const std::vector<LatticePoint>& index, const std::vector<Rational>& w,
                          const TowerConfig& t) {
  NuclearMatrix M;
  M.tower = &t;
  M.index = index;
  M.weight = w;
  M.cols.resize(index.size());
  parallel_for(index.size(), [&](std::size_t j) {
    for (std::size_t i = 0; i < index.size(); ++i) {
      auto it = S.find(sub_scaled(index[i], index[j], (long)t.p));
      if (it != S.end()) M.cols[j].emplace_back((int)i, it->second);
    }
  });
  return M;
}

}  // namespace

FrobeniusSeries frobenius_series(const SpecializedFamily& G, int m, const Rational& cap_gamma, const Rational& cap_x,
                                 const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  if (t.a != fam.a * G.t_degree) throw std::invalid_argument("tower must have unramified degree a * deg(t)");
  if (m < 1) throw std::invalid_argument("m must be positive");
  std::vector<Monomial> monos;
  for (int i = 0; i < m; ++i) {
    std::uint64_t pi = ipow(fam.p, i);
    for (auto& mono : family_monomials(G, i, t)) {
      Monomial mm = mono;
      for (auto& x : mm.expo) x *= (long)pi;
      monos.push_back(mm);
    }
  }
  FrobeniusSeries fs;
  fs.m = m;
  fs.s = fam.s;
  fs.n = fam.n;
  fs.cap_gamma = cap_gamma;
  fs.cap_x = cap_x;
  for (auto& [e, c] : product_of_thetas(monos, t)) {
    LatticePoint g(e.begin(), e.begin() + fam.s), u(e.begin() + fam.s, e.end());
    Rational wg = fam.s ? weight_or_throw(fam.geom_gamma, g) : Rational(0);
    if (wg <= cap_gamma && weight_or_throw(fam.geom_f, u) <= cap_x) fs.terms.emplace(e, c);
  }
  return fs;
}

PadicScalar NuclearMatrix::at(int row, int col) const {
  for (auto& [i, v] : cols[col])
    if (i == row) return v;
  return PadicScalar(*tower);
}

std::vector<std::vector<PadicScalar>> NuclearMatrix::dense() const {
  std::vector<std::vector<PadicScalar>> d(dim(), std::vector<PadicScalar>(dim(), PadicScalar(*tower)));
  for (std::size_t j = 0; j < dim(); ++j)
    for (auto& [i, v] : cols[j]) d[i][j] = v;
  return d;
}

NuclearMatrix mat_mul(const NuclearMatrix& a, const NuclearMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  NuclearMatrix c;
  c.tower = a.tower;
  c.index = a.index;
  c.weight = a.weight;
  c.scale = a.scale;
  c.phi = a.phi;
  c.certified = std::min(a.certified, b.certified);
  c.cols.resize(a.dim());
  const TowerConfig& t = *a.tower;
  parallel_for(a.dim(), [&](std::size_t j) {
    std::map<int, PadicScalar> acc;
    for (auto& [k, bkj] : b.cols[j])
      for (auto& [i, aik] : a.cols[k]) {
        auto [it, fresh] = acc.try_emplace(i, t);
        it->second += aik * bkj;
      }
    for (auto& [i, v] : acc)
      if (!v.is_zero()) c.cols[j].emplace_back(i, v.compact());
  });
  return c;
}

PadicScalar trace(const NuclearMatrix& a) {
  PadicScalar s(*a.tower);
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (auto& [i, v] : a.cols[j])
      if ((std::size_t)i == j) s += v;
  return s;
}

PadicScalar trace_product(const NuclearMatrix& a, const NuclearMatrix& b) {
  // sum_{i,j} a_ij b_ji
  std::vector<std::vector<std::pair<int, const PadicScalar*>>> rows(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (auto& [i, v] : a.cols[j]) rows[i].emplace_back((int)j, &v);
  std::vector<PadicScalar> part(a.dim(), PadicScalar(*a.tower));
  parallel_for(a.dim(), [&](std::size_t i) {
    std::vector<const PadicScalar*> col(a.dim(), nullptr);
    for (auto& [r, v] : b.cols[i]) col[r] = &v;
    for (auto& [j, v] : rows[i])
      if (col[j]) part[i] += *v * *col[j];
  });
  PadicScalar s(*a.tower);
  for (auto& x : part) s += x;
  return s;
}

Rational truncation_rule_cap(const TowerConfig& t) {
  long p = (long)t.p;
  Rational need = Rational((long)t.N * p * p, (p - 1) * (p - 1));
  return Rational(need.ceil() + 2);
}

int certified_from_cap(const TowerConfig& t, const Rational& cap, long D) {
  Rational next = Rational((cap * Rational(D)).floor() + 1, D);
  long p = (long)t.p;
  Rational floor_val = next * Rational((p - 1) * (p - 1), p * p);
  return (int)std::min<long>(t.N, floor_val.floor());
}

Tower fiber_tower(const SpecializedFamily& G, int deg_lambda, int N) {
  const LaurentFamily& fam = *G.family;
  return make_tower(fam.p, fam.a * G.t_degree * deg_lambda, (int)fam.D, N);
}

NuclearMatrix fiber_matrix(const SpecializedFamily& G, const ClosedPoint& lambda, const Rational& cap_x, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  const int m = fam.a * G.t_degree * lambda.degree;
  if (t.a != m) throw std::invalid_argument("tower unramified degree must equal a d(t) d(lambda)");
  if (cap_x < truncation_rule_cap(t))
    throw PrecisionExhausted("x-weight cap " + cap_x.str() + " below the truncation rule " + truncation_rule_cap(t).str());
  MonoidSlice slice = enumerate_monoid(fam.geom_f, cap_x);
  NuclearMatrix A;
  for (int i = 0; i < m; ++i) {
    SparseSeries S = product_of_thetas(fiber_monomials(G, lambda, i, t), t);
    NuclearMatrix Ai = step_matrix(S, slice.points, slice.weights, t);
    A = i == 0 ? Ai : mat_mul(Ai, A);
  }
  A.certified = certified_from_cap(t, cap_x, fam.D);
  return A;
}

PadicScalar divide_int(const PadicScalar& x, std::uint64_t j) {
  const TowerConfig& t = x.tower();
  int v = 0;
  while (j % t.p == 0) j /= t.p, ++v;
  PadicScalar y = x * PadicScalar::from_uint(t, j).inverse();
  for (int k = 0; k < v; ++k) {
    try {
      y = -y.unshift_hat(t.e);
    } catch (const std::domain_error&) {
      throw PrecisionExhausted("Newton identity division: trace data not divisible, precision too low");
    }
  }
  return y;
}

static int vp_factorial(std::uint64_t p, int j) {
  int v = 0;
  for (int i = 2; i <= j; ++i)
    for (int x = i; x % (int)p == 0; x /= (int)p) ++v;
  return v;
}

FredholmSeries fredholm_from_traces(const std::vector<PadicScalar>& traces, int certified) {
  if (traces.empty()) throw std::invalid_argument("no traces");
  const TowerConfig& t = traces[0].tower();
  FredholmSeries f;
  f.traces = traces;
  f.coeffs.push_back(PadicScalar::from_int(t, 1));
  f.certified.push_back(t.N);
  for (int j = 1; j <= (int)traces.size(); ++j) {
    PadicScalar acc(t);
    for (int i = 1; i <= j; ++i) acc += traces[i - 1] * f.coeffs[j - i];
    f.coeffs.push_back(-divide_int(acc, (std::uint64_t)j));
    f.certified.push_back(std::max(0, std::min(certified, t.N - vp_factorial(t.p, j))));
  }
  return f;
}

FredholmSeries fredholm(const NuclearMatrix& m, int d_T) {
  if (d_T < 0) throw std::invalid_argument("negative degree");
  if ((std::size_t)d_T > m.dim()) throw std::invalid_argument("d_T exceeds the matrix dimension");
  FredholmSeries f;
  if (d_T == 0) {
    f.coeffs.push_back(PadicScalar::from_int(*m.tower, 1));
    f.certified.push_back(m.certified);
    return f;
  }
  // powers up to ceil(d_T / 2), traces from products
  int half = (d_T + 1) / 2;
  std::vector<NuclearMatrix> pw{m};
  for (int k = 2; k <= half; ++k) pw.push_back(mat_mul(pw.back(), m));
  std::vector<PadicScalar> tr;
  for (int k = 1; k <= d_T; ++k) {
    if (k <= half) tr.push_back(trace(pw[k - 1]));
    else tr.push_back(trace_product(pw[half - 1], pw[k - half - 1]));
  }
  return fredholm_from_traces(tr, m.certified);
}

TraceCheck trace_formula_check(const SpecializedFamily& G, const ClosedPoint& lambda, int m, const Rational& cap_x,
                               const TowerConfig& t) {
  NuclearMatrix A = fiber_matrix(G, lambda, cap_x, t);
  NuclearMatrix Am = A;
  for (int k = 2; k <= m; ++k) Am = mat_mul(Am, A);
  TraceCheck r;
  r.m = m;
  r.sum = exp_sum(G, lambda.orbit_rep, lambda.degree, m);
  PadicScalar factor = PadicScalar::from_int(t, 1);
  PadicScalar qm = PadicScalar::from_uint(t, t.q()).pow(m) - PadicScalar::from_int(t, 1);
  for (int i = 0; i < G.family->n; ++i) factor = factor * qm;
  r.lhs = factor * trace(Am);
  r.rhs = zeta_embed(r.sum, t);
  r.agreement = r.lhs.agreement(r.rhs);
  r.certified = A.certified;
  r.ok = r.agreement >= r.certified;
  return r;
}

LSeriesReport fiber_l_via_dwork(const SpecializedFamily& G, const ClosedPoint& lambda, int d_T, const Rational& cap_x,
                                const TowerConfig& t) {
  NuclearMatrix A = fiber_matrix(G, lambda, cap_x, t);
  FredholmSeries det = fredholm(A, d_T);
  LSeriesReport r;
  r.p = t.p;
  r.padic = det.coeffs;
  r.certified = det.certified;
  for (int i = 0; i < G.family->n; ++i) r = delta_q(r, t.q());
  r.newton_polygon = newton_polygon(r.padic);
  return r;
}

namespace {

struct TotalIndex {
  std::vector<LatticePoint> points;
  std::vector<Rational> weights;
};

TotalIndex total_index(const LaurentFamily& fam, const Rational& cap) {
  TotalIndex ix;
  MonoidSlice gs = fam.s ? enumerate_monoid(fam.geom_gamma, cap) : MonoidSlice{{LatticePoint{}}, {Rational(0)}, cap};
  MonoidSlice xs = enumerate_monoid(fam.geom_f, cap);
  std::vector<std::pair<Rational, LatticePoint>> all;
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      Rational w = gs.weights[i] + xs.weights[j];
      if (w > cap) continue;
      LatticePoint e = gs.points[i];
      e.insert(e.end(), xs.points[j].begin(), xs.points[j].end());
      all.emplace_back(w, e);
    }
  std::sort(all.begin(), all.end());
  for (auto& [w, e] : all) ix.points.push_back(e), ix.weights.push_back(w);
  return ix;
}

}  // namespace

NuclearMatrix total_family_matrix(const SpecializedFamily& G, const Rational& cap, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  if (t.a != fam.a * G.t_degree) throw std::invalid_argument("tower must have unramified degree a * deg(t)");
  if (cap < truncation_rule_cap(t))
    throw PrecisionExhausted("weight cap " + cap.str() + " below the truncation rule " + truncation_rule_cap(t).str());
  TotalIndex ix = total_index(fam, cap);
  NuclearMatrix A;
  for (int i = 0; i < t.a; ++i) {
    SparseSeries S = product_of_thetas(family_monomials(G, i, t), t);
    NuclearMatrix Ai = step_matrix(S, ix.points, ix.weights, t);
    A = i == 0 ? Ai : mat_mul(Ai, A);
  }
  A.certified = certified_from_cap(t, cap, fam.D);
  return A;
}

TraceCheck total_trace_check(const SpecializedFamily& G, int m, const Rational& cap, const TowerConfig& t) {
  NuclearMatrix A = total_family_matrix(G, cap, t);
  NuclearMatrix Am = A;
  for (int k = 2; k <= m; ++k) Am = mat_mul(Am, A);
  TraceCheck r;
  r.m = m;
  r.sum = total_exp_sum(G, m);
  PadicScalar qm = PadicScalar::from_uint(t, t.q()).pow(m) - PadicScalar::from_int(t, 1);
  PadicScalar factor = PadicScalar::from_int(t, 1);
  for (int i = 0; i < G.family->n + G.family->s; ++i) factor = factor * qm;
  r.lhs = factor * trace(Am);
  r.rhs = zeta_embed(r.sum, t);
  r.agreement = r.lhs.agreement(r.rhs);
  r.certified = A.certified;
  r.ok = r.agreement >= r.certified;
  return r;
}

}  // namespace ur
