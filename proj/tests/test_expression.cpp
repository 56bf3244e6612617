#include "doctest.h"

#include <cmath>

#include "aniscale/errors.hpp"
#include "aniscale/expression.hpp"

using aniscale::ConfigError;
using aniscale::Expression;

TEST_CASE("arithmetic and precedence") {
  Expression e("1 + 2*3 - 4/2", {});
  CHECK(e.eval({}) == doctest::Approx(5.0));
  Expression f("2^3^2", {});  // right associative
  CHECK(f.eval({}) == doctest::Approx(512.0));
  Expression g("-2^2", {});  // unary minus applies to the power
  CHECK(g.eval({}) == doctest::Approx(-4.0));
}

TEST_CASE("variables and functions") {
  Expression e("1 + 0.5*abs(s1) - min(s2, 0)", {"s1", "s2"});
  CHECK(e.eval(-2.0, 3.0) == doctest::Approx(2.0));
  CHECK(e.eval(-2.0, -1.0) == doctest::Approx(3.0));
  Expression t("sqrt(s1^2 + s2^2)", {"s1", "s2"});
  CHECK(t.eval(3.0, 4.0) == doctest::Approx(5.0));
  Expression a("atan2(s2, s1)", {"s1", "s2"});
  CHECK(a.eval(1.0, 1.0) == doctest::Approx(std::atan2(1.0, 1.0)));
  Expression p("pi", {});
  CHECK(p.eval({}) == doctest::Approx(3.14159265358979));
}

TEST_CASE("parse errors are reported") {
  CHECK_THROWS_AS(Expression("1 +", {}), ConfigError);
  CHECK_THROWS_AS(Expression("foo(1)", {}), ConfigError);
  CHECK_THROWS_AS(Expression("s9", {"s1", "s2"}), ConfigError);
  CHECK_THROWS_AS(Expression("(1", {}), ConfigError);
}
