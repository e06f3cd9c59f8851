#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unitroot/cyclotomic.hpp"
#include "unitroot/splitting.hpp"

using namespace ur;

TEST_CASE("cyclotomic formatting and arithmetic") {
  auto one = CyclotomicInteger::from_int(3, 1);
  auto z = CyclotomicInteger::zeta_power(3, 1);
  CHECK((one + z).str() == "1+z");
  CHECK((z * z).str() == "-1-z");
  CHECK(CyclotomicInteger::zeta_power(5, 5).str() == "1");
  CHECK(CyclotomicInteger::from_int(3, 0).str() == "0");
  CHECK(CyclotomicInteger::parse(3, "1+z") == one + z);
  CHECK(CyclotomicInteger::parse(5, "-z^2").str() == "-z^2");
  auto r = (one + z).to_rational();
  CHECK((r * r.inverse()) == CyclotomicRational::from_int(3, 1));
  CHECK(!CyclotomicRational::from_int(3, 1).scaled(mpq_class(1, 2)).is_integral());
}

TEST_CASE("splitting function coefficients") {
  auto t = make_tower(3, 1, 2, 4);
  auto th = theta(*t, theta_default_imax(*t));
  CHECK(th.coeffs[0] == PadicScalar::from_int(*t, 1));
  CHECK(th.coeffs[1] == PadicScalar::pi(*t));
  for (std::size_t i = 0; i < th.coeffs.size(); ++i)
    if (!th.coeffs[i].is_zero()) CHECK(th.coeffs[i].valuation() >= Rational((long)i * 2, 9));
  CHECK_THROWS(theta(*t, 2));
}

TEST_CASE("zeta embedding") {
  for (std::uint64_t p : {3, 5}) {
    auto t = make_tower(p, 1, 2, 4);
    auto z = zeta_embed(*t);
    CHECK(z.pow(p) == PadicScalar::from_int(*t, 1));
    CHECK(!(z == PadicScalar::from_int(*t, 1)));
    PadicScalar s(*t);
    for (std::uint64_t k = 0; k < p; ++k) s += z.pow(k);
    CHECK(s.is_zero());
    auto diff = z - PadicScalar::from_int(*t, 1) - PadicScalar::pi(*t);
    CHECK(diff.valuation_hat() >= 2 * t->pi_index);
    auto x = CyclotomicInteger::from_int(p, 1) + CyclotomicInteger::zeta_power(p, 1);
    CHECK(zeta_embed(x, *t) == PadicScalar::from_int(*t, 1) + z);
  }
}
