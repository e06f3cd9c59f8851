#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "unitroot/cli.hpp"
#include "unitroot/errors.hpp"
#include "unitroot/fp_poly.hpp"

namespace ur {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i;
  int line, col0;  // col0: column of s[0]

  int col() const { return col0 + (int)i; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line, col()); }
  void ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() {
    ws();
    return i >= s.size();
  }
  bool eat(char c) {
    ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  long integer(const char* what) {
    ws();
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec != std::errc() || ptr == s.data() + i) fail(std::string("expected ") + what);
    i = ptr - s.data();
    return v;
  }
  std::uint64_t natural(const char* what) {
    ws();
    if (i < s.size() && s[i] == '-') fail(std::string("negative ") + what);
    long v = integer(what);
    return (std::uint64_t)v;
  }
  LatticePoint point() {
    ws();
    int start = col();
    auto bad = [&] { throw ConfigError("malformed lattice point", line, start); };
    if (!eat('[')) bad();
    LatticePoint u;
    if (eat(']')) bad();
    while (true) {
      ws();
      long v = 0;
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc() || ptr == s.data() + i) bad();
      i = ptr - s.data();
      u.push_back(v);
      if (eat(']')) break;
      if (!eat(',')) bad();
    }
    return u;
  }
  std::string word() {
    ws();
    std::size_t b = i;
    while (i < s.size() && std::isalpha((unsigned char)s[i])) ++i;
    return s.substr(b, i - b);
  }
  void end() {
    if (!done()) fail("unexpected trailing text");
  }
};

// Splits on sep, keeping column offsets.
std::vector<std::pair<std::string, int>> split(const std::string& s, char sep, int col0) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(b, i - b), col0 + (int)b);
      b = i + 1;
    }
  return out;
}

Rational parse_rational(Cursor& c) {
  long num = c.integer("rational");
  long den = 1;
  if (c.eat('/')) {
    int at = c.col();
    den = c.integer("denominator");
    if (den <= 0) throw ConfigError("nonpositive denominator", c.line, at);
  }
  return Rational(num, den);
}

std::string point_str(const LatticePoint& u) {
  std::string r = "[";
  for (std::size_t i = 0; i < u.size(); ++i) r += (i ? "," : "") + std::to_string(u[i]);
  return r + "]";
}

const std::vector<std::string> kKeys{"p",       "a",     "n",        "s",     "f_support", "P_support",
                                     "t_bar",   "t_degree", "kappa_digits", "N", "M",      "W_x",
                                     "W_gamma", "L_max", "W_sym",    "d_T",   "d_Lambda",  "max_fiber_degree",
                                     "command"};

}  // namespace

const std::vector<std::string> kCommands{"weights", "expsum", "lfunction", "dworkdet", "sympow", "unitroot", "verify"};

InstanceConfig parse_config(const std::string& text) {
  InstanceConfig cfg;
  std::map<std::string, int> seen;  // key -> line
  std::map<std::string, int> vcol;  // key -> value column
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string body = raw.substr(0, raw.find('#'));
    if (std::all_of(body.begin(), body.end(), [](char ch) { return ch == ' ' || ch == '\t'; })) continue;
    std::size_t eq = body.find('=');
    std::size_t kb = body.find_first_not_of(" \t");
    if (eq == std::string::npos) throw ConfigError("expected key = value", line, (int)kb + 1);
    std::string key = body.substr(kb, eq - kb);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw ConfigError("unknown key '" + key + "'", line, (int)kb + 1);
    if (seen.count(key)) throw ConfigError("duplicate key '" + key + "'", line, (int)kb + 1);
    seen[key] = line;
    std::string val = body.substr(eq + 1);
    int col0 = (int)eq + 2;
    vcol[key] = col0 + (int)std::min(val.size(), val.find_first_not_of(" \t"));
    Cursor c{val, 0, line, col0};

    auto small = [&](const char* what, long lo) {
      c.ws();
      int at = c.col();
      long v = c.integer(what);
      if (v < lo) throw ConfigError(std::string(what) + " must be at least " + std::to_string(lo), line, at);
      c.end();
      return (int)v;
    };

    if (key == "p") {
      c.ws();
      int at = c.col();
      cfg.p = c.natural("prime");
      c.end();
      if (!is_prime(cfg.p)) throw ConfigError("p = " + std::to_string(cfg.p) + " is composite", line, at);
    } else if (key == "a") {
      cfg.a = small("a", 1);
    } else if (key == "n") {
      cfg.n = small("n", 1);
    } else if (key == "s") {
      cfg.s = small("s", 0);
    } else if (key == "t_degree") {
      cfg.t_degree = small("t_degree", 1);
    } else if (key == "N") {
      cfg.N = small("N", 1);
    } else if (key == "M") {
      cfg.M = small("M", 1);
    } else if (key == "L_max") {
      cfg.L_max = small("L_max", 1);
    } else if (key == "d_T") {
      cfg.d_T = small("d_T", 1);
    } else if (key == "d_Lambda") {
      cfg.d_Lambda = small("d_Lambda", 1);
    } else if (key == "max_fiber_degree") {
      cfg.max_fiber_degree = small("max_fiber_degree", 1);
    } else if (key == "W_x" || key == "W_gamma" || key == "W_sym") {
      c.ws();
      int at = c.col();
      Rational w = parse_rational(c);
      c.end();
      if (w <= Rational(0)) throw ConfigError(key + " must be positive", line, at);
      (key == "W_x" ? cfg.W_x : key == "W_gamma" ? cfg.W_gamma : cfg.W_sym) = w;
    } else if (key == "f_support") {
      for (auto& [part, pc] : split(val, ';', col0)) {
        Cursor e{part, 0, line, pc};
        LaurentFamily::FTerm t;
        t.u = e.point();
        e.ws();
        int at = e.col();
        if (e.word() == "var") {
          t.var = true;
        } else {
          e.i = at - pc;
          t.var = false;
          t.coeff = e.natural("coefficient code or 'var'");
          if (t.coeff == 0) throw ConfigError("zero coefficient", line, at);
        }
        e.end();
        cfg.f_support.push_back(t);
      }
    } else if (key == "P_support") {
      for (auto& [part, pc] : split(val, ';', col0)) {
        Cursor e{part, 0, line, pc};
        LaurentFamily::PTerm t;
        t.gamma = e.point();
        t.v = e.point();
        e.ws();
        int at = e.col();
        t.coeff = e.natural("coefficient code");
        if (t.coeff == 0) throw ConfigError("zero coefficient", line, at);
        e.end();
        cfg.P_support.push_back(t);
      }
    } else if (key == "t_bar") {
      for (auto& [part, pc] : split(val, ',', col0)) {
        Cursor e{part, 0, line, pc};
        e.ws();
        int at = e.col();
        std::uint64_t r = e.natural("residue code");
        if (r == 0) throw ConfigError("zero residue in t_bar", line, at);
        e.end();
        cfg.t_bar.push_back(r);
      }
    } else if (key == "kappa_digits") {
      c.ws();
      std::size_t save = c.i;
      if (c.word() == "ones") {
        c.end();
        cfg.kappa_ones = true;
      } else {
        c.i = save;
        for (auto& [part, pc] : split(val, ',', col0)) {
          Cursor e{part, 0, line, pc};
          cfg.kappa_digits.push_back(e.natural("digit"));
          e.end();
        }
      }
    } else if (key == "command") {
      c.ws();
      int at = c.col();
      std::string w = val.substr(c.i);
      w.erase(w.find_last_not_of(" \t") + 1);
      if (std::find(kCommands.begin(), kCommands.end(), w) == kCommands.end())
        throw ConfigError("unknown command '" + w + "'", line, at);
      cfg.command = w;
    }
  }

  if (!seen.count("p")) throw ConfigError("missing key 'p'");
  if (!seen.count("f_support")) throw ConfigError("missing key 'f_support'");
  for (auto& t : cfg.f_support)
    if ((int)t.u.size() != cfg.n)
      throw ConfigError("f exponent " + point_str(t.u) + " has dimension other than n", seen["f_support"], vcol["f_support"]);
  for (auto& t : cfg.P_support)
    if ((int)t.gamma.size() != cfg.s || (int)t.v.size() != cfg.n)
      throw ConfigError("P term " + point_str(t.gamma) + " " + point_str(t.v) + " has the wrong dimension",
                        seen["P_support"], vcol["P_support"]);
  for (auto d : cfg.kappa_digits)
    if (d >= cfg.p) throw ConfigError("kappa digit out of range", seen["kappa_digits"], vcol["kappa_digits"]);
  long vars = std::count_if(cfg.f_support.begin(), cfg.f_support.end(), [](auto& t) { return t.var; });
  if (seen.count("t_bar") && (long)cfg.t_bar.size() != vars)
    throw ConfigError("t_bar has " + std::to_string(cfg.t_bar.size()) + " entries, expected " + std::to_string(vars),
                      seen["t_bar"], vcol["t_bar"]);
  return cfg;
}

std::string emit_config(const InstanceConfig& c) {
  std::ostringstream os;
  os << "p = " << c.p << "\n";
  os << "a = " << c.a << "\n";
  os << "n = " << c.n << "\n";
  os << "s = " << c.s << "\n";
  os << "f_support = ";
  for (std::size_t i = 0; i < c.f_support.size(); ++i) {
    auto& t = c.f_support[i];
    os << (i ? "; " : "") << point_str(t.u) << ' ' << (t.var ? std::string("var") : std::to_string(t.coeff));
  }
  os << "\n";
  if (!c.P_support.empty()) {
    os << "P_support = ";
    for (std::size_t i = 0; i < c.P_support.size(); ++i) {
      auto& t = c.P_support[i];
      os << (i ? "; " : "") << point_str(t.gamma) << ' ' << point_str(t.v) << ' ' << t.coeff;
    }
    os << "\n";
  }
  if (!c.t_bar.empty()) {
    os << "t_bar = ";
    for (std::size_t i = 0; i < c.t_bar.size(); ++i) os << (i ? ", " : "") << c.t_bar[i];
    os << "\n";
  }
  os << "t_degree = " << c.t_degree << "\n";
  if (c.kappa_ones) {
    os << "kappa_digits = ones\n";
  } else if (!c.kappa_digits.empty()) {
    os << "kappa_digits = ";
    for (std::size_t i = 0; i < c.kappa_digits.size(); ++i) os << (i ? "," : "") << c.kappa_digits[i];
    os << "\n";
  }
  os << "N = " << c.N << "\n";
  if (c.M) os << "M = " << *c.M << "\n";
  if (c.W_x) os << "W_x = " << c.W_x->str() << "\n";
  if (c.W_gamma) os << "W_gamma = " << c.W_gamma->str() << "\n";
  if (c.L_max) os << "L_max = " << *c.L_max << "\n";
  if (c.W_sym) os << "W_sym = " << c.W_sym->str() << "\n";
  if (c.d_T) os << "d_T = " << *c.d_T << "\n";
  if (c.d_Lambda) os << "d_Lambda = " << *c.d_Lambda << "\n";
  if (c.max_fiber_degree) os << "max_fiber_degree = " << *c.max_fiber_degree << "\n";
  if (c.command) os << "command = " << *c.command << "\n";
  return os.str();
}

}  // namespace ur
