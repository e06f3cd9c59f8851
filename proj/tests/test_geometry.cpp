#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "unitroot/geometry.hpp"

using namespace ur;

TEST_CASE("one-dimensional hull [-2,2]") {
  auto g = build_newton({{2}, {-2}});
  CHECK(g.D == 2);
  CHECK(g.vertices.size() == 2);
  CHECK(g.facets.size() == 2);
  CHECK(*weight(g, {1}) == Rational(1, 2));
  CHECK(*weight(g, {0}) == Rational(0));
  CHECK(*weight(g, {-3}) == Rational(3, 2));
  auto s = enumerate_monoid(g, Rational(1));
  REQUIRE(s.size() == 5);
  std::vector<LatticePoint> pts{{0}, {-1}, {1}, {-2}, {2}};
  std::vector<Rational> ws{0, Rational(1, 2), Rational(1, 2), 1, 1};
  CHECK(s.points == pts);
  CHECK(s.weights == ws);
}

TEST_CASE("standard simplex") {
  auto g = build_newton({{1, 0}, {0, 1}});
  CHECK(g.D == 1);
  CHECK_FALSE(weight(g, {-1, 0}).has_value());
  CHECK(*weight(g, {2, 3}) == Rational(5));
  CHECK(g.facets.size() == 1);
}

TEST_CASE("degenerate inputs rejected") {
  CHECK_THROWS(build_newton({{0}}));
  CHECK_THROWS(build_newton({{1, 0}, {1}}));
  CHECK_THROWS(build_newton({}));
}

TEST_CASE("relative polytope") {
  auto f = build_newton({{2}, {-2}});
  auto gam = relative_polytope({{{1}, {1}}}, f, 1);
  REQUIRE(gam.generators.size() == 1);
  CHECK(gam.generators[0][0] == Rational(2));
  auto s = enumerate_monoid(gam, Rational(3, 2));
  std::vector<LatticePoint> pts{{0}, {1}, {2}, {3}};
  std::vector<Rational> ws{0, Rational(1, 2), 1, Rational(3, 2)};
  CHECK(s.points == pts);
  CHECK(s.weights == ws);
  CHECK_FALSE(weight(gam, {-1}).has_value());

  auto empty = relative_polytope({}, f, 1);
  CHECK(enumerate_monoid(empty, Rational(5)).size() == 1);

  auto f1 = build_newton({{1}, {-1}});
  CHECK_THROWS(relative_polytope({{{1}, {1}}}, f1, 1));

  auto m0 = enumerate_unit_monoid(gam, Rational(10));
  CHECK(m0.size() == 1);
  auto m0f = enumerate_unit_monoid(f, Rational(2));
  CHECK(m0f.size() == enumerate_monoid(f, Rational(2)).size());
}

TEST_CASE("cap zero gives the apex") {
  for (auto gens : std::vector<std::vector<LatticePoint>>{{{2}, {-2}}, {{1, 0}, {0, 1}}, {{1, 2}, {-1, 1}, {0, -1}}}) {
    auto g = build_newton(gens);
    auto s = enumerate_monoid(g, Rational(0));
    REQUIRE(s.size() == 1);
    for (auto c : s.points[0]) CHECK(c == 0);
  }
}

TEST_CASE("weight properties on random polygons") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LatticePoint> gens;
    while (gens.size() < 4) {
      LatticePoint u{coord(rng), coord(rng)};
      if (u[0] || u[1]) gens.push_back(u);
    }
    auto g = build_newton(gens);
    auto s = enumerate_monoid(g, Rational(2));
    auto s1 = enumerate_monoid(g, Rational(1));
    // prefix property
    REQUIRE(s1.size() <= s.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
      CHECK(s1.points[i] == s.points[i]);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      Rational dw = s.weights[i] * Rational(g.D);
      CHECK(dw.is_integer());
      CHECK(dw >= Rational(0));
      if (i > 0) CHECK(s.weights[i - 1] <= s.weights[i]);
      LatticePoint twice{2 * s.points[i][0], 2 * s.points[i][1]};
      CHECK(*weight(g, twice) == Rational(2) * s.weights[i]);
      for (std::size_t j = 0; j < s.size(); ++j) {
        LatticePoint sum{s.points[i][0] + s.points[j][0], s.points[i][1] + s.points[j][1]};
        auto ws = weight(g, sum);
        REQUIRE(ws.has_value());
        CHECK(*ws <= s.weights[i] + s.weights[j]);
      }
    }
    for (auto& u : gens) CHECK(*weight(g, u) <= Rational(1));
  }
}
