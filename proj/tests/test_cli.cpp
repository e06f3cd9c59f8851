#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "unitroot/cli.hpp"
#include "unitroot/errors.hpp"
#include "unitroot/parallel.hpp"

using namespace ur;

namespace {

const char* kK = R"(# reference instance
p = 3
a = 1
n = 1
s = 1
f_support = [2] var; [-2] var
P_support = [1] [1] 1   # lambda x
t_bar = 1, 1
N = 4
)";

std::string value(const RunReport& r, const std::string& key) {
  for (auto& [k, v] : r.records)
    if (k == key) return v;
  return "<missing>";
}

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no error for: " << text);
  return ConfigError("");
}

InstanceConfig random_config(std::mt19937_64& g) {
  auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); };
  static const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13};
  InstanceConfig c;
  c.p = primes[pick(0, 5)];
  c.a = (int)pick(1, 3);
  c.n = (int)pick(1, 3);
  c.s = (int)pick(0, 2);
  auto point = [&](int d) {
    LatticePoint u;
    for (int i = 0; i < d; ++i) u.push_back(pick(-5, 5));
    return u;
  };
  for (long i = 0, k = pick(1, 4); i < k; ++i) {
    LaurentFamily::FTerm t;
    t.u = point(c.n);
    t.var = pick(0, 1);
    t.coeff = t.var ? 0 : (std::uint64_t)pick(1, 20);
    if (t.var) c.t_bar.push_back((std::uint64_t)pick(1, 30));
    c.f_support.push_back(t);
  }
  if (c.s > 0)
    for (long i = 0, k = pick(0, 3); i < k; ++i) c.P_support.push_back({point(c.s), point(c.n), (std::uint64_t)pick(1, 9)});
  c.t_degree = (int)pick(1, 3);
  switch (pick(0, 2)) {
    case 0: break;
    case 1: c.kappa_ones = true; break;
    default:
      for (long i = 0, k = pick(1, 5); i < k; ++i) c.kappa_digits.push_back((std::uint64_t)pick(0, (long)c.p - 1));
  }
  c.N = (int)pick(1, 9);
  if (pick(0, 1)) c.M = (int)pick(1, 12);
  if (pick(0, 1)) c.W_x = Rational(pick(1, 40), pick(1, 6));
  if (pick(0, 1)) c.W_gamma = Rational(pick(1, 40), pick(1, 6));
  if (pick(0, 1)) c.W_sym = Rational(pick(1, 40), pick(1, 6));
  if (pick(0, 1)) c.L_max = (int)pick(1, 6);
  if (pick(0, 1)) c.d_T = (int)pick(1, 9);
  if (pick(0, 1)) c.d_Lambda = (int)pick(1, 60);
  if (pick(0, 1)) c.max_fiber_degree = (int)pick(1, 4);
  if (pick(0, 1)) c.command = kCommands[pick(0, (long)kCommands.size() - 1)];
  return c;
}

}  // namespace

TEST_CASE("parse the reference instance") {
  auto c = parse_config(kK);
  CHECK(c.p == 3);
  CHECK(c.f_support.size() == 2);
  CHECK(c.f_support[1].u == LatticePoint{-2});
  CHECK(c.f_support[1].var);
  REQUIRE(c.P_support.size() == 1);
  CHECK(c.P_support[0].gamma == LatticePoint{1});
  CHECK(c.t_bar == std::vector<std::uint64_t>{1, 1});
  CHECK(c.N == 4);
  CHECK_FALSE(c.W_x.has_value());
  CHECK_FALSE(c.command.has_value());
  CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("config errors carry positions") {
  auto e = parse_error("p = 3\nbogus = 1\n");
  CHECK(e.line == 2);
  CHECK(e.column == 1);
  CHECK(std::string(e.what()).find("unknown key") != std::string::npos);

  e = parse_error("p = 3\nf_support = [2] var; [-2 var\n");
  CHECK(e.line == 2);
  CHECK(e.column == 22);
  CHECK(std::string(e.what()).find("malformed lattice point") != std::string::npos);

  e = parse_error("p = 4\n");
  CHECK(e.line == 1);
  CHECK(e.column == 5);
  CHECK(std::string(e.what()).find("composite") != std::string::npos);

  e = parse_error("p = 3\nf_support = [2] var; [-2] var\nt_bar = 1, 0\n");
  CHECK(e.line == 3);
  CHECK(e.column == 12);
  CHECK(std::string(e.what()).find("zero residue") != std::string::npos);

  CHECK(parse_error("p = 3\nf_support = [2,1] var\n").line == 2);
  CHECK(parse_error("p = 3\np = 5\n").line == 2);
  CHECK(parse_error("p = 3\nf_support = [2] var\nW_x = 3/0\n").line == 3);
  CHECK(parse_error("p = 3\nf_support = [2] var\ncommand = draw\n").line == 3);
  CHECK(parse_error("f_support = [2] var\n").line == 0);
}

TEST_CASE("emit and parse round-trip on random configs") {
  std::mt19937_64 g(20261019);
  for (int i = 0; i < 50; ++i) {
    auto c = random_config(g);
    auto text = emit_config(c);
    INFO(text);
    auto back = parse_config(text);
    CHECK(back == c);
    CHECK(emit_config(back) == text);
  }
}

TEST_CASE("commands on the reference instance") {
  auto c = parse_config(kK);
  auto e = run(c, "expsum");
  CHECK(e.status == 0);
  CHECK(value(e, "expsum.S_1") == "1+z");

  auto w = run(parse_config("p = 3\nn = 1\ns = 0\nf_support = [2] 1; [-2] 1\nW_x = 1\n"), "weights");
  CHECK(w.status == 0);
  CHECK(value(w, "weights.D") == "2");
  CHECK(value(w, "weights.f.count") == "5");
  CHECK(value(w, "weights.f.w[0]") == "0");
  CHECK(value(w, "weights.f.w[1]") == "1/2");
  CHECK(value(w, "weights.f.w[-1]") == "1/2");
  CHECK(value(w, "weights.f.w[2]") == "1");
  CHECK(value(w, "weights.f.w[-2]") == "1");

  auto v = run(c, "verify");
  CHECK(v.status == 0);
  CHECK(value(v, "verify.result") == "pass");
  CHECK(std::stoi(value(v, "verify.joint")) >= 3);
}

TEST_CASE("exit statuses") {
  auto c = parse_config(kK);
  c.W_x = Rational(5);
  CHECK(run(c, "dworkdet").status == 3);
  auto bad = parse_config(kK);
  bad.t_bar = {1, 7};  // outside F_3
  CHECK(run(bad, "expsum").status == 2);
  CHECK(run(parse_config(kK), "plot").status == 2);
  auto off = parse_config("p = 3\nn = 1\ns = 0\nf_support = [2] 1; [1] 1\n");
  CHECK(run(off, "weights").status == 2);
}

TEST_CASE("reports do not depend on the worker count") {
  auto c = parse_config(kK);
  set_worker_count(1);
  auto a = run(c, "sympow");
  set_worker_count(4);
  auto b = run(c, "sympow");
  set_worker_count(0);
  CHECK(a.status == 0);
  CHECK(a.records == b.records);
}
