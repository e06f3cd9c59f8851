#include "unitroot/family.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ur {

void LaurentFamily::finalize() {
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is composite");
  if (f.empty()) throw std::invalid_argument("f has empty support");
  std::vector<LatticePoint> A;
  for (auto& t : f) {
    if ((int)t.u.size() != n) throw std::invalid_argument("f exponent " + format_point(t.u) + " has wrong dimension");
    if (!t.var && t.coeff == 0) throw std::invalid_argument("zero coefficient in f");
    A.push_back(t.u);
  }
  geom_f = build_newton(A);
  for (auto& t : f)
    if (*weight(geom_f, t.u) != Rational(1))
      throw std::invalid_argument("f exponent " + format_point(t.u) + " is not on the boundary at infinity");
  std::vector<DeformationTerm> dp;
  for (auto& t : P) {
    if ((int)t.v.size() != n || (int)t.gamma.size() != s) throw std::invalid_argument("P term has wrong dimension");
    if (t.coeff == 0) throw std::invalid_argument("zero coefficient in P");
    dp.push_back({t.gamma, t.v});
  }
  geom_gamma = relative_polytope(dp, geom_f, s);
  D = std::lcm(geom_f.D, geom_gamma.D);
}

int LaurentFamily::var_count() const {
  return (int)std::count_if(f.begin(), f.end(), [](const FTerm& t) { return t.var; });
}

SpecializedFamily specialize(const LaurentFamily& fam, const FiberParameter& t) {
  SpecializedFamily sp;
  sp.family = &fam;
  sp.t_degree = t.t_degree;
  Field base = FqField::make(fam.p, fam.a);
  sp.field = extension(*base, t.t_degree);
  const auto& emb = sp.field->embedding_from(*base);
  if ((int)t.t_bar.size() != fam.var_count())
    throw std::invalid_argument("t_bar has " + std::to_string(t.t_bar.size()) + " entries, expected " +
                                std::to_string(fam.var_count()));
  std::size_t k = 0;
  for (auto& term : fam.f) {
    if (term.var) {
      std::uint64_t c = t.t_bar[k++];
      if (c == 0 || c >= sp.field->size()) throw std::invalid_argument("t_bar residue must be a nonzero field element");
      sp.f_coeffs.push_back((FqField::Elem)c);
    } else {
      if (term.coeff >= base->size()) throw std::invalid_argument("coefficient outside F_q");
      sp.f_coeffs.push_back(emb[term.coeff]);
    }
  }
  for (auto& term : fam.P) {
    if (term.coeff >= base->size()) throw std::invalid_argument("coefficient outside F_q");
    sp.P_coeffs.push_back(emb[term.coeff]);
  }
  return sp;
}

long normalized_volume(const WeightedGeometry& g) {
  if (g.dim == 1) {
    Rational lo(0), hi(0);
    for (auto& v : g.generators) lo = min(lo, v[0]), hi = max(hi, v[0]);
    Rational len = hi - lo;
    if (!len.is_integer()) throw std::invalid_argument("non-lattice polytope");
    return len.num();
  }
  if (g.dim == 2) {
    std::vector<std::pair<Rational, Rational>> pts{{0, 0}};
    for (auto& v : g.generators) pts.emplace_back(v[0], v[1]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](auto& o, auto& a, auto& b) {
      return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<Rational, Rational>> hull;
    for (int pass = 0; pass < 2; ++pass) {
      std::size_t start = hull.size();
      for (auto& pt : pts) {
        while (hull.size() >= start + 2 && cross(hull[hull.size() - 2], hull.back(), pt) <= Rational(0)) hull.pop_back();
        hull.push_back(pt);
      }
      hull.pop_back();
      std::reverse(pts.begin(), pts.end());
    }
    Rational area2(0);
    for (std::size_t i = 0; i < hull.size(); ++i) {
      auto& a = hull[i];
      auto& b = hull[(i + 1) % hull.size()];
      area2 += a.first * b.second - a.second * b.first;
    }
    if (area2 < Rational(0)) area2 = -area2;
    if (!area2.is_integer()) throw std::invalid_argument("non-lattice polytope");
    return area2.num();
  }
  throw std::invalid_argument("normalized volume implemented for dimension <= 2");
}

}  // namespace ur
