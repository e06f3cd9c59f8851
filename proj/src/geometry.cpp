#include "unitroot/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ur {

std::string format_point(const LatticePoint& u) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
  os << ']';
  return os.str();
}

namespace {

// Solves sum_i c_i * cols[i] = target exactly; nullopt when inconsistent or the columns are dependent.
std::optional<std::vector<Rational>> solve_columns(const std::vector<const RationalPoint*>& cols, const RationalPoint& target) {
  const std::size_t rows = target.size(), k = cols.size();
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(k + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < k; ++c) m[r][c] = (*cols[c])[r];
    m[r][k] = target[r];
  }
  std::size_t pr = 0;
  std::vector<std::size_t> pivot_row(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t sel = pr;
    while (sel < rows && m[sel][c] == Rational(0)) ++sel;
    if (sel == rows) return std::nullopt;
    std::swap(m[sel], m[pr]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pr || m[r][c] == Rational(0)) continue;
      Rational f = m[r][c] / m[pr][c];
      for (std::size_t j = c; j <= k; ++j) m[r][j] -= f * m[pr][j];
    }
    pivot_row[c] = pr++;
  }
  for (std::size_t r = pr; r < rows; ++r)
    if (m[r][k] != Rational(0)) return std::nullopt;
  std::vector<Rational> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = m[pivot_row[c]][k] / m[pivot_row[c]][c];
  return out;
}

template <class F>
void for_each_subset(std::size_t n, std::size_t maxk, F&& f) {
  std::vector<std::size_t> idx;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (!idx.empty()) f(idx);
    if (idx.size() == maxk) return;
    for (std::size_t i = start; i < n; ++i) {
      idx.push_back(i);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  rec(rec, 0);
}

// min sum c_i with sum c_i g_i = u, c >= 0; optimal solutions are basic, so subsets of size <= dim suffice.
Weight lp_weight(const std::vector<RationalPoint>& gens, int dim, const RationalPoint& u) {
  if (std::all_of(u.begin(), u.end(), [](const Rational& x) { return x == Rational(0); })) return Rational(0);
  Weight best;
  for_each_subset(gens.size(), (std::size_t)dim, [&](const std::vector<std::size_t>& idx) {
    std::vector<const RationalPoint*> cols;
    for (auto i : idx) cols.push_back(&gens[i]);
    auto c = solve_columns(cols, u);
    if (!c) return;
    Rational s(0);
    for (auto& x : *c) {
      if (x < Rational(0)) return;
      s += x;
    }
    if (!best || s < *best) best = s;
  });
  return best;
}

RationalPoint to_rational(const LatticePoint& u) {
  RationalPoint r;
  for (long x : u) r.emplace_back(x);
  return r;
}

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

}  // namespace

WeightedGeometry build_newton_rational(const std::vector<RationalPoint>& generators, int dim) {
  WeightedGeometry g;
  g.dim = dim;
  for (auto& x : generators) {
    if ((int)x.size() != dim) throw std::invalid_argument("generator dimension mismatch");
    if (std::all_of(x.begin(), x.end(), [](const Rational& c) { return c == Rational(0); }))
      throw std::invalid_argument("origin is not allowed as a generator");
    if (std::find(g.generators.begin(), g.generators.end(), x) == g.generators.end()) g.generators.push_back(x);
  }
  std::sort(g.generators.begin(), g.generators.end());

  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    std::vector<RationalPoint> others;
    for (std::size_t j = 0; j < g.generators.size(); ++j)
      if (j != i) others.push_back(g.generators[j]);
    Weight w = lp_weight(others, dim, g.generators[i]);
    if (!w || *w > Rational(1)) g.vertices.push_back(g.generators[i]);
  }

  if (!g.vertices.empty()) {
    for_each_subset(g.vertices.size(), (std::size_t)dim, [&](const std::vector<std::size_t>& idx) {
      if ((int)idx.size() != dim) return;
      // normal n with <n, v_i> = 1: transpose system
      std::vector<RationalPoint> rows_as_cols(dim, RationalPoint(dim));
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) rows_as_cols[c][r] = g.vertices[idx[r]][c];
      std::vector<const RationalPoint*> cols;
      for (auto& c : rows_as_cols) cols.push_back(&c);
      auto n = solve_columns(cols, RationalPoint(dim, Rational(1)));
      if (!n) return;
      for (auto& v : g.generators) {
        Rational s(0);
        for (int k = 0; k < dim; ++k) s += (*n)[k] * v[k];
        if (s > Rational(1)) return;
      }
      for (auto& f : g.facets)
        if (f.normal == *n) return;
      g.facets.push_back({*n, Rational(1)});
    });
  }

  // denominator scan over all cone lattice points of weight <= dim * M + 1
  long M = 1;
  for (auto& v : g.generators)
    for (auto& c : v) M = lcm_long(M, c.den());
  Rational cap(dim * M + 1);
  long D = 1;
  for (auto& pt : enumerate_monoid(g, cap).weights) D = lcm_long(D, pt.den());
  g.D = D;
  return g;
}

WeightedGeometry build_newton(const std::vector<LatticePoint>& generators) {
  if (generators.empty()) throw std::invalid_argument("empty generator set");
  int dim = (int)generators.front().size();
  std::vector<RationalPoint> gens;
  for (auto& u : generators) {
    if ((int)u.size() != dim) throw std::invalid_argument("generator dimension mismatch");
    gens.push_back(to_rational(u));
  }
  return build_newton_rational(gens, dim);
}

Weight weight(const WeightedGeometry& geom, const LatticePoint& u) {
  if ((int)u.size() != geom.dim) throw std::invalid_argument("point dimension mismatch");
  return lp_weight(geom.generators, geom.dim, to_rational(u));
}

long MonoidSlice::index_of(const LatticePoint& u) const {
  auto it = std::find(points.begin(), points.end(), u);
  return it == points.end() ? -1 : long(it - points.begin());
}

MonoidSlice enumerate_monoid(const WeightedGeometry& geom, const Rational& weight_cap) {
  if (weight_cap < Rational(0)) throw std::invalid_argument("negative weight cap");
  const int dim = geom.dim;
  LatticePoint lo(dim, 0), hi(dim, 0);
  for (auto& v : geom.generators)
    for (int k = 0; k < dim; ++k) {
      Rational x = v[k] * weight_cap;
      lo[k] = std::min<long>(lo[k], x.floor());
      hi[k] = std::max<long>(hi[k], x.ceil());
    }
  std::vector<std::pair<Rational, LatticePoint>> found;
  LatticePoint u = lo;
  while (true) {
    Weight w = weight(geom, u);
    if (w && *w <= weight_cap) found.emplace_back(*w, u);
    int k = 0;
    while (k < dim && u[k] == hi[k]) u[k] = lo[k], ++k;
    if (k == dim) break;
    ++u[k];
  }
  std::sort(found.begin(), found.end());
  MonoidSlice s;
  s.weight_cap = weight_cap;
  for (auto& [w, pt] : found) {
    s.points.push_back(pt);
    s.weights.push_back(w);
  }
  return s;
}

WeightedGeometry relative_polytope(const std::vector<DeformationTerm>& suppP, const WeightedGeometry& geomF, int s) {
  std::vector<RationalPoint> U;
  for (auto& t : suppP) {
    if ((int)t.gamma.size() != s) throw std::invalid_argument("deformation exponent dimension mismatch");
    Weight wv = weight(geomF, t.v);
    if (!wv || *wv <= Rational(0) || *wv >= Rational(1))
      throw std::invalid_argument("invalid lower deformation: weight of " + format_point(t.v) + " is not in (0,1)");
    Rational scale = Rational(1) / (Rational(1) - *wv);
    RationalPoint d;
    for (long g : t.gamma) d.push_back(Rational(g) * scale);
    U.push_back(d);
  }
  WeightedGeometry gamma = build_newton_rational(U, s);
  for (auto& t : suppP) {
    Weight wg = weight(gamma, t.gamma);
    if (!wg || *wg >= Rational(1)) throw std::logic_error("relative polytope check failed at " + format_point(t.gamma));
  }
  return gamma;
}

MonoidSlice enumerate_unit_monoid(const WeightedGeometry& geom, const Rational& weight_cap) {
  MonoidSlice all = enumerate_monoid(geom, weight_cap), out;
  out.weight_cap = weight_cap;
  for (std::size_t i = 0; i < all.size(); ++i) {
    LatticePoint neg = all.points[i];
    for (auto& c : neg) c = -c;
    if (weight(geom, neg)) {
      out.points.push_back(all.points[i]);
      out.weights.push_back(all.weights[i]);
    }
  }
  return out;
}

}  // namespace ur
