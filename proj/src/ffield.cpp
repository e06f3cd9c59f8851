#include "unitroot/ffield.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace ur {

namespace {

std::mutex& embed_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> f;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      f.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) f.push_back(n);
  return f;
}

}  // namespace

std::shared_ptr<const FqField> FqField::make(std::uint64_t p, int k) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, int>, std::shared_ptr<const FqField>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, k);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (!is_prime(p)) throw std::invalid_argument("field characteristic must be prime");
  auto f = std::shared_ptr<FqField>(new FqField());
  f->p_ = p;
  f->k_ = k;
  f->build();
  cache[key] = f;
  return f;
}

void FqField::build() {
  minpoly_ = least_irreducible(p_, k_);
  q_ = 1;
  for (int i = 0; i < k_; ++i) {
    q_ *= p_;
    if (q_ > (1u << 23)) throw std::length_error("finite field too large for table arithmetic");
  }
  const std::uint64_t n = q_ - 1;
  // primitive element search by order test
  auto factors = prime_factors(n);
  std::uint64_t gcode = 0;
  for (std::uint64_t c = 1; c < q_ && !gcode; ++c) {
    FpPoly g = coeffs(c);
    fp_trim(g);
    if (g.empty()) continue;
    bool prim = true;
    if (fp_powmod(g, n, minpoly_, p_) != FpPoly{1}) prim = false;
    for (auto r : factors) {
      if (!prim) break;
      if (fp_powmod(g, n / r, minpoly_, p_) == FpPoly{1}) prim = false;
    }
    if (prim) gcode = c;
  }
  if (n == 0 || (n == 1 && !gcode)) gcode = 1;
  exp_.assign(n ? n : 1, 1);
  log_.assign(q_, 0);
  FpPoly g = coeffs(gcode), cur{1};
  fp_trim(g);
  for (std::uint64_t i = 0; i < n; ++i) {
    cur.resize(k_, 0);
    exp_[i] = from_coeffs(cur);
    log_[exp_[i]] = (std::uint32_t)i;
    cur = fp_rem(fp_mul(cur, g, p_), minpoly_, p_);
  }
  zech_.assign(n ? n : 1, -1);
  for (std::uint64_t i = 0; i < n; ++i) {
    Elem x = exp_[i];
    std::uint64_t d0 = x % p_;
    Elem y = (Elem)(x - d0 + (d0 + 1) % p_);
    zech_[i] = y == 0 ? -1 : (std::int32_t)log_[y];
  }
  neg_one_log_ = p_ == 2 ? 0 : (std::int64_t)(n / 2);

  std::vector<std::uint64_t> trbasis(k_);
  for (int j = 0; j < k_; ++j) {
    FpPoly xj(j + 1, 0);
    xj[j] = 1;
    FpPoly acc, y = fp_rem(xj, minpoly_, p_);
    for (int i = 0; i < k_; ++i) {
      acc.resize(std::max(acc.size(), y.size()), 0);
      for (std::size_t t = 0; t < y.size(); ++t) acc[t] = (acc[t] + y[t]) % p_;
      y = fp_powmod(y, p_, minpoly_, p_);
    }
    fp_trim(acc);
    if (acc.size() > 1) throw std::logic_error("trace not in the prime field");
    trbasis[j] = acc.empty() ? 0 : acc[0];
  }
  trace_.assign(q_, 0);
  for (std::uint64_t c = 0; c < q_; ++c) {
    std::uint64_t x = c, s = 0;
    for (int j = 0; j < k_; ++j) {
      s += (x % p_) * trbasis[j];
      x /= p_;
    }
    trace_[c] = (std::uint32_t)(s % p_);
  }
  trace_by_log_.assign(n ? n : 1, 0);
  for (std::uint64_t i = 0; i < n; ++i) trace_by_log_[i] = trace_[exp_[i]];
}

FqField::Elem FqField::from_coeffs(const std::vector<std::uint64_t>& c) const {
  std::uint64_t code = 0, pw = 1;
  for (int j = 0; j < k_; ++j) {
    if ((std::size_t)j < c.size()) code += (c[j] % p_) * pw;
    pw *= p_;
  }
  return (Elem)code;
}

std::vector<std::uint64_t> FqField::coeffs(Elem x) const {
  std::vector<std::uint64_t> c(k_);
  for (int j = 0; j < k_; ++j) c[j] = x % p_, x /= (Elem)p_;
  return c;
}

std::int64_t FqField::add_logs(std::int64_t a, std::int64_t b) const {
  if (a < 0) return b;
  if (b < 0) return a;
  const std::int64_t n = (std::int64_t)(q_ - 1);
  std::int64_t d = b - a;
  if (d < 0) d += n;
  std::int32_t z = zech_[d];
  if (z < 0) return kZeroLog;
  std::int64_t r = a + z;
  return r >= n ? r - n : r;
}

FqField::Elem FqField::neg(Elem x) const {
  if (x == 0) return 0;
  return exp(log(x) + neg_one_log_);
}

FqField::Elem FqField::mul(Elem x, Elem y) const {
  if (x == 0 || y == 0) return 0;
  return exp(log(x) + log(y));
}

FqField::Elem FqField::inv(Elem x) const {
  if (x == 0) throw std::domain_error("inverse of zero in F_q");
  const std::int64_t n = (std::int64_t)(q_ - 1);
  return exp((n - log(x)) % n);
}

FqField::Elem FqField::pow(Elem x, std::int64_t e) const {
  if (x == 0) return e == 0 ? 1 : 0;
  const std::int64_t n = (std::int64_t)(q_ - 1);
  std::int64_t r = (std::int64_t)((__int128)log(x) * (e % n) % n);
  if (r < 0) r += n;
  return exp(r);
}

const std::vector<FqField::Elem>& FqField::embedding_from(const FqField& sub) const {
  std::lock_guard<std::mutex> lock(embed_mutex());
  const int j = sub.degree();
  if (sub.p() != p_ || k_ % j != 0) throw std::invalid_argument("not a subfield");
  for (auto& [deg, table] : embeddings_)
    if (deg == j) return table;
  if (j == k_) {
    std::vector<Elem> id(q_);
    for (std::uint64_t b = 0; b < q_; ++b) id[b] = (Elem)b;
    embeddings_.emplace_back(j, std::move(id));
    return embeddings_.back().second;
  }
  const FpPoly& mp = sub.minpoly();
  Elem root = 0;
  bool found = false;
  for (std::uint64_t c = 0; c < q_ && !found; ++c) {
    Elem acc = 0;
    for (std::size_t i = mp.size(); i-- > 0;) acc = add(mul(acc, (Elem)c), (Elem)mp[i]);
    if (acc == 0) root = (Elem)c, found = true;
  }
  if (!found) throw std::logic_error("subfield minimal polynomial has no root");
  std::vector<Elem> table(sub.size());
  for (std::uint64_t b = 0; b < sub.size(); ++b) {
    auto cf = sub.coeffs((Elem)b);
    Elem acc = 0;
    for (std::size_t i = cf.size(); i-- > 0;) acc = add(mul(acc, root), (Elem)cf[i]);
    table[b] = acc;
  }
  embeddings_.emplace_back(j, std::move(table));
  return embeddings_.back().second;
}

Field extension(const FqField& field, int d) {
  if (d < 1) throw std::invalid_argument("extension degree must be positive");
  return FqField::make(field.p(), field.degree() * d);
}

std::vector<ClosedPoint> closed_points(const FqField& field, int s, int max_degree) {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be positive");
  std::vector<ClosedPoint> out;
  const std::uint64_t Q = field.size();
  for (int d = 1; d <= max_degree; ++d) {
    Field big = extension(field, d);
    const std::uint64_t n = big->size() - 1;
    std::vector<FqField::Elem> x(s, 1);
    while (true) {
      std::vector<std::int64_t> logs(s);
      for (int i = 0; i < s; ++i) logs[i] = big->log(x[i]);
      std::vector<std::int64_t> cur = logs;
      int size = 0;
      bool is_rep = true;
      while (true) {
        for (auto& l : cur) l = (std::int64_t)((unsigned __int128)l * Q % n);
        ++size;
        if (cur == logs) break;
        std::vector<FqField::Elem> img(s);
        for (int i = 0; i < s; ++i) img[i] = big->exp(cur[i]);
        if (img < x) is_rep = false;
      }
      if (size == d && is_rep) out.push_back({x, d});
      int i = s - 1;
      while (i >= 0 && x[i] == big->size() - 1) x[i] = 1, --i;
      if (i < 0) break;
      ++x[i];
    }
  }
  return out;
}

CyclotomicInteger additive_character(const FqField& field, FqField::Elem x) {
  return CyclotomicInteger::zeta_power(field.p(), field.trace(x));
}

}  // namespace ur
