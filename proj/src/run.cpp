#include <chrono>
#include <sstream>

#include "unitroot/cli.hpp"
#include "unitroot/dwork.hpp"
#include "unitroot/errors.hpp"
#include "unitroot/formula.hpp"
#include "unitroot/splitting.hpp"

namespace ur {

namespace {

std::string pt(const LatticePoint& u) {
  std::string r = "[";
  for (std::size_t i = 0; i < u.size(); ++i) r += (i ? "," : "") + std::to_string(u[i]);
  return r + "]";
}

std::string rpt(const RationalPoint& u) {
  std::string r = "[";
  for (std::size_t i = 0; i < u.size(); ++i) r += (i ? "," : "") + u[i].str();
  return r + "]";
}

std::string closed_str(const ClosedPoint& c) {
  std::string r = "(";
  for (std::size_t i = 0; i < c.orbit_rep.size(); ++i) r += (i ? "," : "") + std::to_string(c.orbit_rep[i]);
  return r + ")/" + std::to_string(c.degree);
}

std::string padic(const PadicScalar& x, int prec) { return x.digits(std::max(0, prec)); }

struct Instance {
  const InstanceConfig& cfg;
  LaurentFamily fam;
  FiberParameter fp;
  SpecializedFamily G;
  Tower t;
  KappaExponent kappa;

  explicit Instance(const InstanceConfig& c) : cfg(c) {
    fam.p = c.p;
    fam.a = c.a;
    fam.n = c.n;
    fam.s = c.s;
    fam.f = c.f_support;
    fam.P = c.P_support;
    fam.finalize();
    fp.t_degree = c.t_degree;
    fp.t_bar = c.t_bar;
    G = specialize(fam, fp);
    t = make_tower(c.p, c.a * c.t_degree, (int)fam.D, c.N);
    if (c.kappa_ones)
      kappa = KappaExponent::ones(c.M.value_or(kappa_precision_rule(*t)));
    else if (c.kappa_digits.empty())
      kappa = KappaExponent::from_integer(c.p, 1);
    else if (c.M)
      kappa = KappaExponent::from_digits(c.kappa_digits, *c.M);
    else {
      std::uint64_t k = 0, pw = 1;
      for (auto d : c.kappa_digits) k += d * pw, pw *= c.p;
      kappa = KappaExponent::from_integer(c.p, k);
    }
  }

  int d_T() const { return cfg.d_T.value_or(4); }
  int fiber_degree() const { return cfg.max_fiber_degree.value_or(3); }
  Rational cap_x() const { return cfg.W_x.value_or(truncation_rule_cap(*t)); }

  ClosedPoint first_fiber() const {
    if (fam.s == 0) return {{}, 1};
    return closed_points(*G.field, fam.s, 1).at(0);
  }

  // Normalized volume of the Newton polytope of a generic fiber.
  int fiber_bound() const {
    std::vector<LatticePoint> A;
    for (auto& f : fam.f) A.push_back(f.u);
    for (auto& q : fam.P) A.push_back(q.v);
    return (int)normalized_volume(build_newton(A));
  }

  SymTruncation trunc() const {
    SymTruncation tr = default_sym_truncation(G, *t);
    if (cfg.W_sym) tr.W_sym = *cfg.W_sym;
    if (cfg.W_gamma) tr.W_gamma = *cfg.W_gamma;
    if (cfg.W_sym || cfg.W_gamma) tr.W_total = std::max(tr.W_sym, tr.W_gamma);
    if (cfg.L_max) tr.L_max = *cfg.L_max;
    tr.d_T = d_T();
    return tr;
  }
};

void check(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

void weight_table(RunReport& r, const std::string& sec, const WeightedGeometry& g, const Rational& cap) {
  r.add(sec + ".D", std::to_string(g.D));
  std::string v;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) v += (i ? "; " : "") + rpt(g.vertices[i]);
  r.add(sec + ".vertices", v);
  auto sl = enumerate_monoid(g, cap);
  r.add(sec + ".cap", cap.str());
  r.add(sec + ".count", std::to_string(sl.size()));
  for (std::size_t i = 0; i < sl.size(); ++i) r.add(sec + ".w" + pt(sl.points[i]), sl.weights[i].str());
}

void cmd_weights(RunReport& r, const InstanceConfig& c) {
  std::vector<LatticePoint> A;
  for (auto& f : c.f_support) A.push_back(f.u);
  auto g = build_newton(A);
  for (auto& f : c.f_support) {
    auto w = weight(g, f.u);
    if (!w || *w != Rational(1)) throw ConfigError("f exponent " + pt(f.u) + " is not on the boundary at infinity");
  }
  Rational cap = c.W_x.value_or(truncation_rule_cap(*make_tower(c.p, c.a, (int)g.D, c.N)));
  if (c.P_support.empty()) {
    r.add("weights.D", std::to_string(g.D));
    weight_table(r, "weights.f", g, cap);
    return;
  }
  Instance in(c);
  r.add("weights.D", std::to_string(in.fam.D));
  weight_table(r, "weights.f", in.fam.geom_f, cap);
  weight_table(r, "weights.gamma", in.fam.geom_gamma, c.W_gamma.value_or(truncation_rule_cap(*in.t)));
}

void cmd_expsum(RunReport& r, Instance& in) {
  auto lam = in.first_fiber();
  r.add("expsum.lambda", closed_str(lam));
  for (int m = 1; m <= in.d_T(); ++m)
    r.add("expsum.S_" + std::to_string(m), exp_sum(in.G, lam.orbit_rep, lam.degree, m).str());
  double qt = (double)in.G.field->size();
  for (int m = 1; m <= in.d_T(); ++m) {
    double cells = 1;
    for (int i = 0; i < (in.fam.s + in.fam.n) * m; ++i) cells *= qt;
    if (cells > 2e6) break;
    r.add("expsum.total.S_" + std::to_string(m), total_exp_sum(in.G, m).str());
  }
}

void cmd_lfunction(RunReport& r, Instance& in) {
  const int bound = in.fiber_bound();
  r.add("lfunction.degree_bound", std::to_string(bound));
  // rationality on the first fiber
  auto lam = in.first_fiber();
  std::vector<CyclotomicInteger> sums;
  const int dser = 2 * bound + 1;
  for (int m = 1; m <= dser; ++m) sums.push_back(exp_sum(in.G, lam.orbit_rep, lam.degree, m));
  auto rec = rational_recover(l_series(sums, dser), bound);
  check(rec.recovered.has_value(), "no rational function of degree <= bound");
  r.add("lfunction.rational.lambda", closed_str(lam));
  r.add("lfunction.rational.num_degree", std::to_string((int)rec.recovered->num.size() - 1));
  r.add("lfunction.rational.den_degree", std::to_string((int)rec.recovered->den.size() - 1));

  auto fibers = fiber_unit_roots(in.G, in.fiber_degree(), bound, *in.t);
  r.add("lfunction.fibers", std::to_string(fibers.size()));
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    auto& f = fibers[i];
    std::string k = "lfunction.fiber" + closed_str(f.lambda);
    std::string poly;
    for (std::size_t j = 0; j < f.L.exact.size(); ++j) poly += (j ? "; " : "") + f.L.exact[j].str();
    r.add(k + ".L", poly);
    int z = slope_zero_length(f.L.newton_polygon);
    r.add(k + ".slope0", std::to_string(z));
    r.add(k + ".unit_root", padic(f.pi0, f.L.unit_root_precision ? f.L.unit_root_precision : in.t->N));
    check(z == 1, "fiber " + closed_str(f.lambda) + " has " + std::to_string(z) + " slope-zero roots");
    check(f.pi0.residue()[0] == 1, "fiber unit root is not a one-unit");
  }
  auto L = unit_l_function(fibers, in.kappa, in.d_T(), *in.t);
  r.add("lfunction.kappa", in.kappa.str());
  for (std::size_t j = 0; j < L.padic.size(); ++j)
    r.add("lfunction.unit.c_" + std::to_string(j), padic(L.padic[j], L.certified[j]));
}

void cmd_dworkdet(RunReport& r, Instance& in) {
  auto lam = in.first_fiber();
  Rational cap = in.cap_x();
  auto ft = fiber_tower(in.G, lam.degree, in.cfg.N);
  r.add("dworkdet.lambda", closed_str(lam));
  r.add("dworkdet.W_x", cap.str());
  for (int m = 1; m <= 3; ++m) {
    auto tc = trace_formula_check(in.G, lam, m, cap, *ft);
    std::string k = "dworkdet.trace_" + std::to_string(m);
    r.add(k + ".sum", tc.sum.str());
    r.add(k + ".agreement", std::to_string(std::min<long>(tc.agreement, tc.certified)));
    r.add(k + ".certified", std::to_string(tc.certified));
    check(tc.ok, "trace formula fails at m = " + std::to_string(m));
  }
  auto dw = fiber_l_via_dwork(in.G, lam, in.d_T(), cap, *ft);
  auto direct = fiber_l_polynomial(in.G, lam, in.fiber_bound());
  for (std::size_t j = 0; j < dw.padic.size(); ++j) {
    r.add("dworkdet.fiber.L_" + std::to_string(j), padic(dw.padic[j], dw.certified[j]));
    PadicScalar want = j < direct.exact.size() ? zeta_embed(direct.exact[j], *ft) : PadicScalar(*ft);
    check(dw.padic[j].agreement(want) >= dw.certified[j], "fiber determinant differs from the L-polynomial");
  }
  auto A = total_family_matrix(in.G, cap, *in.t);
  auto det = fredholm(A, in.d_T());
  r.add("dworkdet.total.dim", std::to_string(A.dim()));
  for (std::size_t j = 0; j < det.coeffs.size(); ++j)
    r.add("dworkdet.total.c_" + std::to_string(j), padic(det.coeffs[j], det.certified[j]));
  int z = slope_zero_length(newton_polygon(det.coeffs));
  r.add("dworkdet.total.slope0", std::to_string(z));
  check(z == 1, "total determinant has " + std::to_string(z) + " slope-zero roots");
}

void cmd_sympow(RunReport& r, Instance& in) {
  auto tr = in.trunc();
  r.add("sympow.kappa", in.kappa.str());
  r.add("sympow.W_total", tr.W_total.str());
  auto fam = alpha_kappa_matrix(in.G, in.kappa, tr, *in.t);
  auto B = beta_matrix(in.G, fam);
  r.add("sympow.dim", std::to_string(B.dim()));
  r.add("sympow.certified", std::to_string(B.certified));
  auto det = fredholm_pruned(B, in.d_T());
  for (std::size_t j = 0; j < det.coeffs.size(); ++j)
    r.add("sympow.det.c_" + std::to_string(j), padic(det.coeffs[j], det.certified[j]));
  auto pc = projector_check(B, det);
  r.add("sympow.projector", pc.ok() ? "ok" : "fail");
  check(pc.ok(), "beta is not the rank-one projector modulo pi_hat");

  auto BD = dual_beta_matrix(in.G, dual_alpha_matrix(in.G, in.kappa, tr, *in.t));
  auto dd = fredholm_pruned(BD, in.d_T());
  long agree = in.t->N;
  for (std::size_t j = 0; j < det.coeffs.size(); ++j) {
    long need = std::min(det.certified[j], dd.certified[j]);
    long a = std::min<long>(det.coeffs[j].agreement(dd.coeffs[j]), need);
    agree = std::min(agree, a);
    check(det.coeffs[j].agreement(dd.coeffs[j]) >= need, "primal and dual determinants differ at T^" + std::to_string(j));
  }
  r.add("sympow.duality.agreement", std::to_string(agree));
  auto ac = adjoint_check(B, BD, fam, B.certified);
  r.add("sympow.adjoint", ac.ok ? "ok" : "fail");
  check(ac.ok, "pairing adjointness fails");
  auto so = sym_trace_check(in.G, in.kappa, B, B.certified, *in.t);
  r.add("sympow.trace_oracle.agreement", std::to_string(so.agreement));
  check(so.ok, "trace oracle disagrees");
  auto l0 = l0_unit_root(in.G, B, in.d_T());
  r.add("sympow.unit_root", padic(l0.unit_root, l0.certified));
}

void cmd_unitroot(RunReport& r, Instance& in) {
  auto tr = in.trunc();
  auto caps = default_exp_caps(in.G, *in.t);
  caps.W_gamma = tr.W_gamma;
  caps.W_x = tr.W_sym;
  if (in.cfg.d_Lambda) caps.d_Lambda = *in.cfg.d_Lambda;
  r.add("unitroot.d_Lambda", std::to_string(caps.d_Lambda));
  auto ser = exp_pi_h(in.fam, caps, *in.t);
  r.add("unitroot.weights_dominated", ser.weights_dominated ? "yes" : "no");
  check(ser.weights_dominated, "stored cells exceed the weight of H");
  auto Fd = f_ratio_eval(in.G, ser, *in.t, FMethod::DualPowerIteration);
  auto Fr = f_ratio_eval(in.G, ser, *in.t, FMethod::TruncatedRatio);
  r.add("unitroot.F", padic(Fd.value, Fd.precision));
  r.add("unitroot.F.certified", std::to_string(Fd.precision));
  r.add("unitroot.F_ratio", padic(Fr.value, Fr.precision));
  r.add("unitroot.F_ratio.observed", std::to_string(Fr.precision));
  long ag = std::min<long>(Fd.value.agreement(Fr.value), std::min(Fd.precision, Fr.precision));
  r.add("unitroot.F_ratio.agreement", std::to_string(ag));
  r.add("unitroot.kappa", in.kappa.str());
  r.add("unitroot.F_kappa", padic(one_unit_power(Fd.value, in.kappa), Fd.precision));
  tr.prune = in.t->N;
  auto er = eigen_residual(in.G, in.kappa, tr, caps, *in.t);
  r.add("unitroot.eigen.residual", er.min_residual.str());
  r.add("unitroot.eigen.support", std::to_string(er.support));
  r.add("unitroot.eigen.certified", std::to_string(er.certified));
  check(er.off_support_zero && er.projection_ok, "eigenvector support check fails");
  check(er.min_residual >= Rational(er.certified), "eigenvector residual below certified digits");
}

void cmd_verify(RunReport& r, Instance& in) {
  VerifyOptions opt;
  opt.d_T = in.d_T();
  opt.fiber_degree = in.fiber_degree();
  opt.fiber_deg_bound = in.fiber_bound();
  if (in.cfg.W_sym || in.cfg.W_gamma || in.cfg.L_max) opt.trunc = in.trunc();
  auto rep = verify_main_theorem(in.G, in.kappa, opt, *in.t);
  r.add("verify.kappa", in.kappa.str());
  for (auto& rv : rep.routes) {
    r.add("verify." + rv.name, padic(rv.value, rv.precision));
    r.add("verify." + rv.name + ".precision", std::to_string(rv.precision));
  }
  for (std::size_t i = 0; i < rep.routes.size(); ++i)
    for (std::size_t j = i + 1; j < rep.routes.size(); ++j)
      r.add("verify.agree." + rep.routes[i].name + "." + rep.routes[j].name, std::to_string(rep.agreement[i][j]));
  r.add("verify.joint", std::to_string(rep.joint));
  r.add("verify.result", rep.ok ? "pass" : "fail");
  check(rep.ok, "unit-root routes disagree");
}

}  // namespace

std::string RunReport::str() const {
  std::string s;
  for (auto& [k, v] : records) s += k + " = " + v + "\n";
  return s;
}

RunReport run(const InstanceConfig& cfg, const std::string& command) {
  RunReport r;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.add("input.command", command);
    r.add("input.p", std::to_string(cfg.p));
    r.add("input.N", std::to_string(cfg.N));
    if (command == "weights") {
      cmd_weights(r, cfg);
    } else {
      Instance in(cfg);
      if (command == "expsum") cmd_expsum(r, in);
      else if (command == "lfunction") cmd_lfunction(r, in);
      else if (command == "dworkdet") cmd_dworkdet(r, in);
      else if (command == "sympow") cmd_sympow(r, in);
      else if (command == "unitroot") cmd_unitroot(r, in);
      else if (command == "verify") cmd_verify(r, in);
      else throw ConfigError("unknown command '" + command + "'");
    }
  } catch (const CheckFailure& e) {
    r.status = 1;
    r.add("error", e.what());
  } catch (const PrecisionExhausted& e) {
    r.status = 3;
    r.add("error", e.what());
  } catch (const ConfigError& e) {
    r.status = 2;
    r.add("error", e.what());
  } catch (const std::invalid_argument& e) {
    r.status = 2;
    r.add("error", e.what());
  } catch (const std::exception& e) {
    r.status = 1;
    r.add("error", e.what());
  }
  r.add("status", std::to_string(r.status));
  r.timings.emplace_back(command, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return r;
}

}  // namespace ur
