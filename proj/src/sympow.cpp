#include "unitroot/sympow.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "unitroot/errors.hpp"
#include "unitroot/parallel.hpp"

namespace ur {

namespace {

using Key = std::vector<int>;  // gamma' ++ multiset positions

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : k) h = (h ^ (std::size_t)(unsigned)x) * 1099511628211ull;
    return h;
  }
};

struct Term {
  Key key;
  PadicScalar val;
  long nu = 0;  // pseudo-valuation, scaled
  int dw = 0;   // D * w(row multiset)
  int len = 0;
};

using Poly = std::vector<Term>;  // sorted by nu

int prune_digits(const SpecializedFamily& G, const SymTruncation& tr, const TowerConfig& t) {
  return tr.prune > 0 ? std::min(t.N, tr.prune) : sym_certified(G, tr, t);
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

long to_long_exact(const Rational& r, const char* what) {
  if (r.den() != 1) throw std::logic_error(std::string("non-integral scaled ") + what);
  return (long)r.num();
}

struct Ctx {
  const TowerConfig* t = nullptr;
  const LaurentFamily* fam = nullptr;
  int s = 0;
  int m = 1;
  std::uint64_t q = 0;
  Rational c;
  long S = 0, rawmul = 0, thr = 0;
  int sign = 1;
  int Wsym_D = 0;
  int Lmax = 0;
  const SymBasis* basis = nullptr;
  std::vector<long> cw;  // c w(point) S
  std::vector<int> dw;   // D w(point)
  std::map<LatticePoint, int> point_pos;
  std::map<LatticePoint, long> cwg;  // c w_Gamma(gamma) S / q on a slice large enough for pruning

  long gamma_term(const int* g) const {
    if (s == 0) return 0;
    LatticePoint gp(g, g + s);
    auto it = cwg.find(gp);
    return it == cwg.end() ? -1 : it->second;
  }

  // nu without the consumed-weight offset; -1 flags "prune"
  bool base_nu(const Key& key, const PadicScalar& v, long& nu, int& dwo, int& len) const {
    long g = gamma_term(key.data());
    if (g < 0) return false;
    long rowc = 0;
    dwo = 0;
    for (std::size_t i = s; i < key.size(); ++i) rowc += cw[key[i]], dwo += dw[key[i]];
    len = (int)key.size() - s;
    nu = v.valuation_hat() * rawmul - sign * rowc - g;
    return true;
  }
};

Ctx make_ctx(const SpecializedFamily& G, const SymBasis& basis, const SymTruncation& tr, const TowerConfig& t, int sign) {
  const LaurentFamily& fam = *G.family;
  Ctx cx;
  cx.t = &t;
  cx.fam = &fam;
  cx.s = fam.s;
  cx.m = t.a;
  cx.q = ipow(fam.p, cx.m);
  cx.c = Rational((long)fam.p - 1, (long)(fam.p * cx.q));
  cx.S = (long)t.e * (long)(cx.q * cx.q) * fam.D;
  cx.rawmul = cx.S / t.e;
  cx.thr = (long)prune_digits(G, tr, t) * cx.S;
  cx.sign = sign;
  cx.Wsym_D = (int)(tr.W_sym * Rational(fam.D)).floor();
  cx.Lmax = tr.L_max;
  cx.basis = &basis;
  for (std::size_t i = 0; i < basis.points.size(); ++i) {
    cx.cw.push_back(to_long_exact(cx.c * basis.point_weight[i] * Rational(cx.S), "point weight"));
    cx.dw.push_back((int)to_long_exact(basis.point_weight[i] * Rational(fam.D), "point weight"));
    cx.point_pos[basis.points[i]] = (int)i;
  }
  if (fam.s > 0) {
    // nu >= c (1 - 1/q) w_Gamma(gamma'), so larger gamma' are always pruned
    Rational bound = Rational((long)t.N) / (cx.c * (Rational(1) - Rational(1, (long)cx.q))) + Rational(1);
    auto sl = enumerate_monoid(fam.geom_gamma, bound);
    for (std::size_t i = 0; i < sl.size(); ++i)
      cx.cwg[sl.points[i]] = to_long_exact(cx.c * sl.weights[i] * Rational(cx.S) / Rational((long)cx.q), "gamma weight");
  }
  return cx;
}

Poly finalize(const Ctx& cx, std::unordered_map<Key, PadicScalar, KeyHash>& acc, long consumed) {
  Poly out;
  out.reserve(acc.size());
  for (auto& [k, v] : acc) {
    if (v.is_zero()) continue;
    Term tm;
    if (!cx.base_nu(k, v, tm.nu, tm.dw, tm.len)) continue;
    tm.nu += consumed;
    if (tm.nu >= cx.thr) continue;
    tm.key = k;
    tm.val = v.compact();
    out.push_back(std::move(tm));
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.nu != b.nu ? a.nu < b.nu : a.key < b.key; });
  return out;
}

Poly poly_mul(const Ctx& cx, const Poly& A, const Poly& B, long consumed) {
  std::unordered_map<Key, PadicScalar, KeyHash> acc;
  Key k;
  for (auto& a : A) {
    for (auto& b : B) {
      if (a.nu + b.nu >= cx.thr) break;
      if (a.dw + b.dw > cx.Wsym_D) continue;
      if (cx.Lmax > 0 && a.len + b.len > cx.Lmax) continue;
      PadicScalar v = a.val * b.val;
      if (v.is_zero()) continue;
      k.assign(a.key.begin(), a.key.begin() + cx.s);
      for (int i = 0; i < cx.s; ++i) k[i] += b.key[i];
      std::merge(a.key.begin() + cx.s, a.key.end(), b.key.begin() + cx.s, b.key.end(), std::back_inserter(k));
      auto it = acc.find(k);
      if (it == acc.end()) acc.emplace(k, std::move(v));
      else it->second += v;
    }
  }
  return finalize(cx, acc, consumed);
}

Poly add_into(const Ctx& cx, const std::vector<std::pair<const Poly*, PadicScalar>>& parts, long consumed) {
  std::unordered_map<Key, PadicScalar, KeyHash> acc;
  for (auto& [P, c] : parts)
    for (auto& a : *P) {
      PadicScalar v = a.val * c;
      auto it = acc.find(a.key);
      if (it == acc.end()) acc.emplace(a.key, std::move(v));
      else it->second += v;
    }
  return finalize(cx, acc, consumed);
}

// Upsilon alpha(x^u) (primal) or Upsilon* alpha*(x^{-u}) (dual); u_pos < 0 is the constant.
Poly make_factor(const Ctx& cx, const FrobeniusSeries& fs, int u_pos) {
  const int s = cx.s;
  const int n = cx.fam->n;
  LatticePoint u(n, 0);
  long consumed = 0;
  if (u_pos >= 0) u = cx.basis->points[u_pos], consumed = cx.sign * cx.cw[u_pos];
  std::unordered_map<Key, PadicScalar, KeyHash> acc;
  for (auto& [e, val] : fs.terms) {
    LatticePoint v(n);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      long w = e[s + i];
      if (cx.sign > 0) {
        long x = w + u[i];
        if (x % (long)cx.q != 0) {
          ok = false;
          break;
        }
        v[i] = x / (long)cx.q;
      } else {
        v[i] = (long)cx.q * u[i] - w;
      }
    }
    if (!ok) continue;
    Key k(e.begin(), e.begin() + s);
    if (std::any_of(v.begin(), v.end(), [](long x) { return x != 0; })) {
      auto it = cx.point_pos.find(v);
      if (it == cx.point_pos.end()) continue;
      k.push_back(it->second);
    }
    auto it = acc.find(k);
    if (it == acc.end()) acc.emplace(k, val);
    else it->second += val;
  }
  return finalize(cx, acc, consumed);
}

mpz_class kappa_integer(const KappaExponent& kappa, std::uint64_t p) {
  mpz_class K = 0, pw = 1;
  for (auto d : kappa.digits) {
    K += pw * (unsigned long)d;
    pw *= (unsigned long)p;
  }
  return K;
}

std::vector<std::uint64_t> binomials(const mpz_class& K, const TowerConfig& t, int lmax) {
  mpz_class mod = 1;
  for (int i = 0; i < t.N; ++i) mod *= (unsigned long)t.p;
  std::vector<std::uint64_t> out;
  mpz_class c = 1;
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0) {
      c *= (K - (l - 1));
      mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), (unsigned long)l);
    }
    mpz_class r = c % mod;
    if (r < 0) r += mod;
    out.push_back(r.get_ui());
  }
  return out;
}

Key zero_key(int s) { return Key(s, 0); }

SymMatrixFamily build_family(const SpecializedFamily& G, const KappaExponent& kappa, std::optional<std::uint64_t> kint,
                             const SymTruncation& tr, const TowerConfig& t, bool dual) {
  const LaurentFamily& fam = *G.family;
  if (t.a != fam.a * G.t_degree) throw std::invalid_argument("tower must have unramified degree a * deg(t)");
  SymMatrixFamily out;
  out.tower = &t;
  out.dual = dual;
  out.kappa = kappa;
  out.integer_power = kint;
  out.trunc = tr;
  out.basis = sym_basis(fam, tr);
  out.m = t.a;
  out.q = ipow(fam.p, out.m);
  Ctx cx = make_ctx(G, out.basis, tr, t, dual ? -1 : 1);
  out.tau = cx.c;

  // x-exponents of the needed series terms are bounded by (q + 1) W_sym; gamma' by the pruning bound
  Rational capx = Rational((long)out.q + 1) * tr.W_sym + Rational(1);
  Rational capg = fam.s ? Rational((long)t.N) / (cx.c * (Rational(1) - Rational(1, (long)cx.q))) + Rational(1) : Rational(0);
  FrobeniusSeries fs = frobenius_series(G, out.m, capg, capx, t);

  const std::size_t npts = out.basis.points.size();
  Poly Y0 = make_factor(cx, fs, -1);
  std::vector<Poly> Y(npts);
  parallel_for(npts, [&](std::size_t i) { Y[i] = make_factor(cx, fs, (int)i); });

  Key k0 = zero_key(fam.s);
  PadicScalar c0;
  for (auto& tm : Y0)
    if (tm.key == k0) c0 = tm.val;
  if (!c0.valid()) throw std::logic_error("constant term of alpha(1) vanished");
  out.c0 = c0;
  PadicScalar c0inv = c0.inverse();
  PadicScalar one = PadicScalar::from_int(t, 1);

  Poly Z;
  for (auto& tm : Y0)
    if (tm.key != k0) {
      Term z = tm;
      z.val = (tm.val * c0inv).compact();
      Z.push_back(std::move(z));
    }
  {
    long y = cx.thr, z = cx.thr;
    for (auto& P : Y)
      if (!P.empty()) y = std::min(y, P.front().nu);
    for (auto& tm : Z) z = std::min(z, tm.nu);
    out.nu_Y = Rational(y, cx.S);
    out.nu_Z = Rational(z, cx.S);
  }
  Poly unit{Term{k0, one, 0, 0, 0}};
  std::vector<Poly> Zpow{unit};
  while (!Zpow.back().empty() && Zpow.size() < 400) Zpow.push_back(poly_mul(cx, Zpow.back(), Z, 0));
  while (Zpow.size() > 1 && Zpow.back().empty()) Zpow.pop_back();
  const int Lz = (int)Zpow.size() - 1;

  int Rmax = 0;
  for (auto& idx : out.basis.indices) Rmax = std::max(Rmax, (int)idx.size());

  // G_r = Upsilon alpha(1)^{kappa - r}
  std::vector<Poly> Gr(Rmax + 1);
  mpz_class K = kint ? mpz_class((unsigned long)*kint) : kappa_integer(kappa, fam.p);
  PadicScalar c0k = kint ? c0.pow(*kint) : one_unit_power(c0, kappa);
  parallel_for(Rmax + 1, [&](std::size_t r) {
    if (kint && r > *kint) return;
    int lmax = kint ? std::min<int>(Lz, (int)(*kint - r)) : Lz;
    auto b = binomials(K - (unsigned long)r, t, lmax);
    PadicScalar cr = c0k * c0inv.pow(r);
    std::vector<std::pair<const Poly*, PadicScalar>> parts;
    for (int l = 0; l <= lmax; ++l)
      if (b[l]) parts.emplace_back(&Zpow[l], cr.scale(b[l]));
    Gr[r] = add_into(cx, parts, 0);
  });

  // products of the factor images, layer by layer
  const std::size_t nb = out.basis.size();
  std::vector<Poly> P(nb);
  std::vector<std::vector<std::size_t>> layers(Rmax + 1);
  for (std::size_t j = 0; j < nb; ++j) layers[out.basis.indices[j].size()].push_back(j);
  P[0] = unit;
  for (int r = 1; r <= Rmax; ++r) {
    auto& L = layers[r];
    parallel_for(L.size(), [&](std::size_t k) {
      std::size_t j = L[k];
      const SymIndex& idx = out.basis.indices[j];
      SymIndex prefix(idx.begin(), idx.end() - 1);
      auto it = out.basis.position.find(prefix);
      if (it == out.basis.position.end()) throw std::logic_error("sym basis not closed under prefixes");
      long consumed = 0;
      for (int u : idx) consumed += cx.sign * cx.cw[u];
      P[j] = poly_mul(cx, P[it->second], Y[idx.back()], consumed);
    });
  }

  out.cols.resize(nb);
  parallel_for(nb, [&](std::size_t j) {
    const std::size_t r = out.basis.indices[j].size();
    if (kint && r > *kint) return;
    long consumed = 0;
    for (int u : out.basis.indices[j]) consumed += cx.sign * cx.cw[u];
    Poly col = poly_mul(cx, Gr[r], P[j], consumed);
    auto& dst = out.cols[j];
    for (auto& tm : col) {
      SymIndex ms(tm.key.begin() + fam.s, tm.key.end());
      auto it = out.basis.position.find(ms);
      if (it == out.basis.position.end()) continue;
      dst.push_back({LatticePoint(tm.key.begin(), tm.key.begin() + fam.s), it->second, tm.val});
    }
    std::sort(dst.begin(), dst.end(), [](const SymEntry& a, const SymEntry& b) {
      return a.row != b.row ? a.row < b.row : a.gamma < b.gamma;
    });
  });
  return out;
}

struct BetaIndex {
  std::vector<LatticePoint> gammas;
  std::vector<Rational> gamma_weight;
  std::vector<std::pair<int, int>> items;  // (gamma slot, sym position)
  std::vector<Rational> weight;
  std::map<std::pair<LatticePoint, int>, int> pos;
};

BetaIndex beta_index(const LaurentFamily& fam, const SymMatrixFamily& F) {
  BetaIndex bi;
  if (fam.s > 0) {
    auto sl = enumerate_monoid(fam.geom_gamma, std::min(F.trunc.W_gamma, F.trunc.W_total));
    bi.gammas = sl.points;
    bi.gamma_weight = sl.weights;
  } else {
    bi.gammas = {LatticePoint{}};
    bi.gamma_weight = {Rational(0)};
  }
  std::vector<std::tuple<Rational, int, int>> all;
  for (std::size_t g = 0; g < bi.gammas.size(); ++g)
    for (std::size_t j = 0; j < F.basis.size(); ++j) {
      Rational w = bi.gamma_weight[g] + F.basis.weights[j];
      if (w <= F.trunc.W_total) all.emplace_back(w, (int)j, (int)g);
    }
  std::sort(all.begin(), all.end());
  for (auto& [w, j, g] : all) {
    bi.pos[{bi.gammas[g], j}] = (int)bi.items.size();
    bi.items.emplace_back(g, j);
    bi.weight.push_back(w);
  }
  return bi;
}

NuclearMatrix assemble(const SpecializedFamily& G, const SymMatrixFamily& F, bool dual) {
  const LaurentFamily& fam = *G.family;
  const TowerConfig& t = *F.tower;
  if (F.dual != dual) throw std::invalid_argument("family orientation mismatch");
  BetaIndex bi = beta_index(fam, F);
  NuclearMatrix M;
  M.tower = &t;
  M.certified = sym_certified(G, F.trunc, t);
  const long S = (long)t.e * (long)(F.q * F.q) * fam.D;
  M.scale = S;
  const int sign = dual ? -1 : 1;
  for (std::size_t i = 0; i < bi.items.size(); ++i) {
    auto [g, j] = bi.items[i];
    LatticePoint idx = bi.gammas[g];
    idx.push_back(j);
    M.index.push_back(idx);
    M.weight.push_back(bi.weight[i]);
    M.phi.push_back(sign * to_long_exact(F.tau * bi.weight[i] * Rational(S), "index weight"));
  }
  M.cols.resize(bi.items.size());
  const long rawmul = S / t.e;
  const long thr = (long)prune_digits(G, F.trunc, t) * S;
  const long q = (long)F.q;
  std::vector<long> negative(bi.items.size(), 0);
  std::vector<std::size_t> pruned(bi.items.size(), 0);
  parallel_for(bi.items.size(), [&](std::size_t jc) {
    auto [gslot, upos] = bi.items[jc];
    const LatticePoint& mu = bi.gammas[gslot];
    for (auto& e : F.cols[upos]) {
      LatticePoint gamma(fam.s);
      bool ok = true;
      for (int i = 0; i < fam.s; ++i) {
        if (!dual) {
          long x = e.gamma[i] + mu[i];
          if (x % q != 0) {
            ok = false;
            break;
          }
          gamma[i] = x / q;
        } else {
          gamma[i] = q * mu[i] - e.gamma[i];
        }
      }
      if (!ok) continue;
      auto it = bi.pos.find({gamma, e.row});
      if (it == bi.pos.end()) continue;
      int ir = it->second;
      long nu = e.value.valuation_hat() * rawmul + M.phi[jc] - M.phi[ir];
      if (nu < 0) negative[jc] = std::min(negative[jc], nu);
      if (nu >= thr) {
        ++pruned[jc];
        continue;
      }
      M.cols[jc].emplace_back(ir, e.value);
    }
    std::sort(M.cols[jc].begin(), M.cols[jc].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  });
  for (long v : negative)
    if (v < 0) throw std::logic_error("entry below its valuation floor");
  return M;
}

}  // namespace

SymTruncation default_sym_truncation(const SpecializedFamily& G, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  const long p = (long)fam.p;
  const std::uint64_t q = ipow(fam.p, t.a);
  Rational floor_rate = Rational(p - 1, p * (long)q) * Rational((long)q - 1);
  const long target = std::max(1, t.N - 1);
  Rational step(1, fam.D);
  Rational W(0);
  while (floor_rate * (W + step) < Rational(target)) W = W + step;
  SymTruncation tr;
  tr.W_sym = tr.W_gamma = tr.W_total = W;
  return tr;
}

int sym_certified(const SpecializedFamily& G, const SymTruncation& tr, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  const long p = (long)fam.p;
  const std::uint64_t q = ipow(fam.p, t.a);
  Rational floor_rate = Rational(p - 1, p * (long)q) * Rational((long)q - 1);
  auto next = [&](const Rational& w) { return Rational((w * Rational(fam.D)).floor() + 1, fam.D); };
  Rational dropped = next(tr.W_total);
  dropped = std::min(dropped, next(tr.W_sym));
  if (fam.s > 0) dropped = std::min(dropped, next(tr.W_gamma));
  if (tr.L_max > 0) {
    auto sl = enumerate_monoid(fam.geom_f, Rational(1) + Rational(1));
    Rational wmin(1000000);
    for (std::size_t i = 0; i < sl.size(); ++i)
      if (sl.weights[i] > Rational(0)) wmin = std::min(wmin, sl.weights[i]);
    dropped = std::min(dropped, wmin * Rational(tr.L_max + 1));
  }
  long c = std::min<long>(t.N, (floor_rate * dropped).floor());
  if (tr.prune > 0) c = std::min<long>(c, tr.prune);
  return (int)c;
}

SymBasis sym_basis(const LaurentFamily& fam, const SymTruncation& tr) {
  SymBasis b;
  auto sl = enumerate_monoid(fam.geom_f, tr.W_sym);
  for (std::size_t i = 0; i < sl.size(); ++i)
    if (sl.weights[i] > Rational(0)) b.points.push_back(sl.points[i]), b.point_weight.push_back(sl.weights[i]);
  std::vector<std::pair<Rational, SymIndex>> all;
  SymIndex cur;
  std::function<void(int, Rational)> rec = [&](int start, Rational w) {
    all.emplace_back(w, cur);
    if (tr.L_max > 0 && (int)cur.size() >= tr.L_max) return;
    for (int i = start; i < (int)b.points.size(); ++i) {
      Rational w2 = w + b.point_weight[i];
      if (w2 > tr.W_sym) break;  // points sorted by weight
      cur.push_back(i);
      rec(i, w2);
      cur.pop_back();
    }
  };
  rec(0, Rational(0));
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first < y.first : x.second < y.second;
  });
  for (auto& [w, idx] : all) {
    b.position[idx] = (int)b.indices.size();
    b.indices.push_back(idx);
    b.weights.push_back(w);
  }
  return b;
}

SymMatrixFamily alpha_kappa_matrix(const SpecializedFamily& G, const KappaExponent& kappa, const SymTruncation& tr,
                                   const TowerConfig& t) {
  return build_family(G, kappa, std::nullopt, tr, t, false);
}

SymMatrixFamily dual_alpha_matrix(const SpecializedFamily& G, const KappaExponent& kappa, const SymTruncation& tr,
                                  const TowerConfig& t) {
  return build_family(G, kappa, std::nullopt, tr, t, true);
}

SymMatrixFamily alpha_finite_matrix(const SpecializedFamily& G, std::uint64_t k, const SymTruncation& tr, const TowerConfig& t) {
  return build_family(G, KappaExponent::from_integer(G.family->p, k), k, tr, t, false);
}

SymMatrixFamily dual_alpha_finite_matrix(const SpecializedFamily& G, std::uint64_t k, const SymTruncation& tr,
                                         const TowerConfig& t) {
  return build_family(G, KappaExponent::from_integer(G.family->p, k), k, tr, t, true);
}

NuclearMatrix beta_matrix(const SpecializedFamily& G, const SymMatrixFamily& fam) { return assemble(G, fam, false); }
NuclearMatrix dual_beta_matrix(const SpecializedFamily& G, const SymMatrixFamily& fam) { return assemble(G, fam, true); }

Rational normalized_valuation(const NuclearMatrix& M, int row, int col) {
  PadicScalar v = M.at(row, col);
  if (v.is_zero()) return Rational(M.tower->N);
  if (M.scale == 0) return v.valuation();
  return Rational(v.valuation_hat() * (M.scale / M.tower->e) + M.phi[col] - M.phi[row], M.scale);
}

NuclearMatrix mat_mul_pruned(const NuclearMatrix& a, const NuclearMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  if (a.scale == 0) return mat_mul(a, b);
  NuclearMatrix c;
  c.tower = a.tower;
  c.index = a.index;
  c.weight = a.weight;
  c.scale = a.scale;
  c.phi = a.phi;
  c.certified = std::min(a.certified, b.certified);
  c.cols.resize(a.dim());
  const TowerConfig& t = *a.tower;
  const long rawmul = a.scale / t.e;
  const long thr = (long)std::min(t.N, c.certified) * a.scale;
  parallel_for(a.dim(), [&](std::size_t j) {
    std::map<int, PadicScalar> acc;
    for (auto& [k, bkj] : b.cols[j])
      for (auto& [i, aik] : a.cols[k]) {
        auto [it, fresh] = acc.try_emplace(i, t);
        it->second += aik * bkj;
      }
    for (auto& [i, v] : acc) {
      if (v.is_zero()) continue;
      long nu = v.valuation_hat() * rawmul + c.phi[j] - c.phi[i];
      if (nu >= thr) continue;
      c.cols[j].emplace_back(i, v.compact());
    }
  });
  return c;
}

FredholmSeries fredholm_pruned(const NuclearMatrix& m, int d_T) {
  if (d_T < 0) throw std::invalid_argument("negative degree");
  if ((std::size_t)d_T > m.dim()) throw std::invalid_argument("d_T exceeds the matrix dimension");
  if (d_T == 0) {
    FredholmSeries f;
    f.coeffs.push_back(PadicScalar::from_int(*m.tower, 1));
    f.certified.push_back(m.certified);
    return f;
  }
  int half = (d_T + 1) / 2;
  std::vector<NuclearMatrix> pw{m};
  for (int k = 2; k <= half; ++k) pw.push_back(mat_mul_pruned(pw.back(), m));
  std::vector<PadicScalar> tr;
  for (int k = 1; k <= d_T; ++k) {
    if (k <= half) tr.push_back(trace(pw[k - 1]));
    else tr.push_back(trace_product(pw[half - 1], pw[k - half - 1]));
  }
  return fredholm_from_traces(tr, m.certified);
}

ProjectorCheck projector_check(const NuclearMatrix& beta, const FredholmSeries& det) {
  ProjectorCheck pc;
  const TowerConfig& t = *beta.tower;
  PadicScalar one = PadicScalar::from_int(t, 1);
  PadicScalar c00 = beta.at(0, 0);
  pc.unit_corner = c00.valid() && (c00 - one).valuation_hat() >= 1;
  bool rest = true;
  const long rawmul = beta.scale ? beta.scale / t.e : 1;
  for (std::size_t j = 0; j < beta.dim() && rest; ++j)
    for (auto& [i, v] : beta.cols[j]) {
      if (i == 0 && j == 0) continue;
      long nu = beta.scale ? v.valuation_hat() * rawmul + beta.phi[j] - beta.phi[i] : v.valuation_hat();
      if (nu <= 0) {
        rest = false;
        break;
      }
    }
  pc.rest_small = rest;
  bool d = det.coeffs.size() >= 2 && (det.coeffs[0] - one).valuation_hat() >= 1 && (det.coeffs[1] + one).valuation_hat() >= 1;
  for (std::size_t j = 2; j < det.coeffs.size() && d; ++j) d = det.coeffs[j].valuation_hat() >= 1;
  pc.det_ok = d;
  return pc;
}

EigenResult power_iteration(const NuclearMatrix& M, int max_iter) {
  const TowerConfig& t = *M.tower;
  const std::size_t n = M.dim();
  std::vector<PadicScalar> v(n, PadicScalar(t));
  v[0] = PadicScalar::from_int(t, 1);
  EigenResult r;
  PadicScalar prev;
  int stable = 0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<PadicScalar> w(n, PadicScalar(t));
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j].is_zero()) continue;
      for (auto& [i, a] : M.cols[j]) w[i] += a * v[j];
    }
    PadicScalar lam = w[0];
    if (!lam.is_unit()) throw CheckFailure("power iteration: constant coordinate is not a unit");
    PadicScalar inv = lam.inverse();
    for (auto& x : w) x = (x * inv).compact();
    r.iterations = it;
    if (prev.valid() && lam == prev && w == v) {
      if (++stable >= 2) {
        r.value = lam;
        r.vector = w;
        r.stable_digits = t.N;
        return r;
      }
    } else {
      stable = 0;
    }
    prev = lam;
    v = std::move(w);
  }
  r.value = prev;
  r.vector = v;
  r.stable_digits = 0;
  return r;
}

L0Result l0_unit_root(const SpecializedFamily& G, const NuclearMatrix& beta, int d_T) {
  const TowerConfig& t = *beta.tower;
  L0Result r;
  r.det = fredholm_pruned(beta, d_T);
  LSeriesReport rep;
  rep.p = t.p;
  rep.padic = r.det.coeffs;
  rep.certified = r.det.certified;
  for (int i = 0; i < G.family->s; ++i) rep = delta_q(rep, t.q());
  rep.newton_polygon = newton_polygon(r.det.coeffs);
  r.series = rep;
  if (slope_zero_length(newton_polygon(r.det.coeffs)) != 1) throw CheckFailure("det(1 - beta T) has no unique slope-0 segment");
  r.eigen = power_iteration(beta);
  r.unit_root = r.eigen.value;
  r.certified = std::min(beta.certified, r.eigen.stable_digits);
  return r;
}

SymTraceOracle sym_trace_check(const SpecializedFamily& G, const KappaExponent& kappa, const NuclearMatrix& beta,
                               int certified, const TowerConfig& t) {
  const LaurentFamily& fam = *G.family;
  SymTraceOracle o;
  Tower hi = retower(t, t.N + 4);
  PadicScalar sum(t);
  auto pts = closed_points(*G.field, fam.s, 1);
  for (auto& pt : pts) {
    NuclearMatrix A = fiber_matrix(G, pt, truncation_rule_cap(*hi), *hi);
    int d = (int)std::min<std::size_t>(A.dim(), 10);
    FredholmSeries det = fredholm(A, d);
    LSeriesReport rep;
    rep.p = t.p;
    rep.padic = det.coeffs;
    rep.certified = det.certified;
    SeriesRoot root = series_unit_root(rep, *hi);
    // det = (1 - pi0 T) Q(T); Q(1/pi0) = sum_j Q_j pi0^{-j}
    PadicScalar pi0 = root.root;
    PadicScalar inv = pi0.inverse();
    std::vector<PadicScalar> Q(d, PadicScalar(*hi));
    PadicScalar acc(*hi);
    for (int j = 0; j < d; ++j) {
      Q[j] = det.coeffs[j] + (j > 0 ? Q[j - 1] * pi0 : PadicScalar(*hi));
    }
    PadicScalar x = PadicScalar::from_int(*hi, 1);
    for (int j = 0; j < d; ++j) {
      acc += Q[j] * x;
      x = x * inv;
    }
    PadicScalar tr = one_unit_power(pi0.to_tower(t), kappa) * acc.to_tower(t).inverse();
    sum += tr;
  }
  o.fiber_sum = sum;
  PadicScalar qm1 = PadicScalar::from_uint(t, t.q()) - PadicScalar::from_int(t, 1);
  PadicScalar f = PadicScalar::from_int(t, 1);
  for (int i = 0; i < fam.s; ++i) f = f * qm1;
  o.beta_side = f * trace(beta);
  o.agreement = o.beta_side.agreement(o.fiber_sum);
  o.certified = certified;
  o.ok = o.agreement >= certified;
  return o;
}

AdjointCheck adjoint_check(const NuclearMatrix& beta, const NuclearMatrix& dual, const SymMatrixFamily& fam, int certified) {
  const TowerConfig& t = *beta.tower;
  AdjointCheck ac;
  if (beta.dim() != dual.dim()) throw std::invalid_argument("dimension mismatch");
  const std::size_t n = beta.dim();
  // weights m(u)! and falling factorials of kappa
  mpz_class K = fam.integer_power ? mpz_class((unsigned long)*fam.integer_power) : kappa_integer(fam.kappa, t.p);
  mpz_class mod = 1;
  for (int i = 0; i < t.N; ++i) mod *= (unsigned long)t.p;
  auto reduce = [&](mpz_class x) {
    x %= mod;
    if (x < 0) x += mod;
    return (std::uint64_t)x.get_ui();
  };
  std::vector<std::uint64_t> mult(n), fall(n);
  for (std::size_t i = 0; i < n; ++i) {
    int pos = (int)beta.index[i].back();
    const SymIndex& u = fam.basis.indices[pos];
    mpz_class mf = 1, ff = 1;
    for (std::size_t a = 0; a < u.size();) {
      std::size_t b = a;
      while (b < u.size() && u[b] == u[a]) ++b;
      for (std::size_t k = 2; k <= b - a; ++k) mf *= (unsigned long)k;
      a = b;
    }
    for (std::size_t k = 0; k < u.size(); ++k) ff *= (K - (unsigned long)k);
    mult[i] = reduce(mf);
    fall[i] = reduce(ff);
  }
  const long rawmul = beta.scale / t.e;
  long worst = (long)t.N * beta.scale;
  // row i, col j of beta against row j, col i of dual
  std::vector<std::unordered_map<int, const PadicScalar*>> dual_rows(n);
  for (std::size_t j = 0; j < n; ++j)
    for (auto& [i, v] : dual.cols[j]) dual_rows[i][(int)j] = &v;
  std::vector<long> col_worst(n, worst);
  std::vector<std::size_t> col_count(n, 0);
  parallel_for(n, [&](std::size_t j) {
    std::unordered_map<int, PadicScalar> lhs;
    for (auto& [i, v] : beta.cols[j]) lhs[i] = v.scale(mult[i]).scale(fall[j]);
    // dual entry (row j, col i) lives in dual.cols[i]
    std::unordered_map<int, PadicScalar> rhs;
    for (auto& [i, pv] : dual_rows[j]) rhs[i] = pv->scale(mult[j]).scale(fall[i]);
    std::vector<int> keys;
    for (auto& [i, v] : lhs) keys.push_back(i);
    for (auto& [i, v] : rhs)
      if (!lhs.count(i)) keys.push_back(i);
    for (int i : keys) {
      PadicScalar a = lhs.count(i) ? lhs[i] : PadicScalar(t);
      PadicScalar b = rhs.count(i) ? rhs[i] : PadicScalar(t);
      PadicScalar d = a - b;
      ++col_count[j];
      if (d.is_zero()) continue;
      long nu = d.valuation_hat() * rawmul + beta.phi[j] - beta.phi[i];
      col_worst[j] = std::min(col_worst[j], nu);
    }
  });
  for (std::size_t j = 0; j < n; ++j) worst = std::min(worst, col_worst[j]), ac.compared += col_count[j];
  ac.min_agreement = worst / beta.scale;
  ac.ok = ac.min_agreement >= certified;
  return ac;
}

FiniteApproxReport finite_sym_approx(const SpecializedFamily& G, const KappaExponent& kappa, const std::vector<std::uint64_t>& k_list,
                                     const SymTruncation& tr, const TowerConfig& t) {
  FiniteApproxReport rep;
  auto famK = alpha_kappa_matrix(G, kappa, tr, t);
  NuclearMatrix B = beta_matrix(G, famK);
  auto detK = fredholm_pruned(B, tr.d_T);
  rep.det_kappa = detK.coeffs;
  const long rawmul = B.scale / t.e;
  const int cert = std::min(t.N, B.certified);
  const long Nsc = (long)cert * B.scale;
  mpz_class K = kappa_integer(kappa, t.p);

  const Rational nuY = famK.nu_Y, nuZ = famK.nu_Z;
  long prev = -1;
  bool mono = true, bounds = true;
  std::vector<long> det_agree;
  for (auto k : k_list) {
    auto famk = alpha_finite_matrix(G, k, tr, t);
    NuclearMatrix Bk = beta_matrix(G, famk);
    long dist = Nsc;
    for (std::size_t j = 0; j < B.dim(); ++j) {
      std::map<int, PadicScalar> diff;
      for (auto& [i, v] : B.cols[j]) diff[i] = v;
      for (auto& [i, v] : Bk.cols[j]) {
        auto it = diff.find(i);
        if (it == diff.end()) diff[i] = -v;
        else it->second -= v;
      }
      for (auto& [i, d] : diff) {
        if (d.is_zero()) continue;
        dist = std::min(dist, d.valuation_hat() * rawmul + B.phi[j] - B.phi[i]);
      }
    }
    FiniteApproxStep st;
    st.k = k;
    st.distance = dist;
    st.distance_p = Rational(dist, B.scale);
    // v_p(kappa - k) + min_l (l nuZ - v_p(l!)), and (k + 1) nuY for the zeroed columns
    mpz_class diffk = K - (unsigned long)k;
    int vk = 0;
    if (diffk == 0) vk = t.N;
    else
      while (vk < 64 && mpz_divisible_ui_p(diffk.get_mpz_t(), (unsigned long)t.p)) diffk /= (unsigned long)t.p, ++vk;
    if (kappa.M > 0) vk = std::min(vk, kappa.M);
    // |binom(x, l) - binom(y, l)| <= p^{floor(log_p l)} |x - y|
    Rational binpart(0);
    int lg = 0;
    for (long l = 1, pl = (long)t.p; l < 100000; ++l) {
      if (l == pl) ++lg, pl *= (long)t.p;
      binpart = std::min(binpart, Rational(l) * nuZ - Rational(lg));
      if (Rational(l) * nuZ > Rational(cert + lg + 1)) break;
    }
    Rational b1 = Rational(vk) + binpart;
    Rational b2 = Rational((long)k + 1) * nuY;
    st.bound = std::min(Rational(cert), std::min(b1, b2));
    if (st.distance_p < st.bound) bounds = false;
    if (prev >= 0 && dist < prev) mono = false;
    prev = dist;
    auto detk = fredholm_pruned(Bk, tr.d_T);
    st.det = detk.coeffs;
    long ag = cert;
    for (std::size_t j = 0; j < detk.coeffs.size(); ++j)
      ag = std::min<long>(ag, std::min<long>(detk.coeffs[j].agreement(detK.coeffs[j]), detK.certified[j]));
    det_agree.push_back(ag);
    rep.steps.push_back(std::move(st));
  }
  rep.monotone = mono;
  rep.bounds_ok = bounds;
  bool conv = true;
  for (std::size_t i = 1; i < det_agree.size(); ++i)
    if (det_agree[i] < det_agree[i - 1]) conv = false;
  rep.det_converges = conv && !det_agree.empty() && det_agree.back() > det_agree.front();
  return rep;
}

}  // namespace ur
