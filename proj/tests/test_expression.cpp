#include <cmath>
#include <numbers>

#include "doctest.h"
#include "geodyn/expression.hpp"

using namespace geodyn;

namespace {

double eval(const std::string& text, std::vector<double> x = {}, std::vector<std::string> vars = {},
            std::map<std::string, double> consts = {}) {
  return Expression::parse(text, vars, consts)(x);
}

int error_column(const std::string& text, std::vector<std::string> vars = {}) {
  try {
    Expression::parse(text, vars);
  } catch (const ExpressionError& e) {
    return e.column();
  }
  return -1;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2*3") == 7.0);
  CHECK(eval("(1 + 2)*3") == 9.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("5 - 3 - 1") == 1.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("2^-1") == 0.5);
  CHECK(eval("--3") == 3.0);
  CHECK(eval("2*-3") == -6.0);
  CHECK(eval("1.5e2 + .5") == 150.5);
  CHECK(eval("pi") == std::numbers::pi);
}

TEST_CASE("functions, variables and constants") {
  const std::vector<std::string> v{"x", "y"};
  CHECK(eval("sin(x)*cos(y) + exp(x) - log(y) + sqrt(y) + tan(x)", {0.3, 2.0}, v) ==
        doctest::Approx(std::sin(0.3) * std::cos(2.0) + std::exp(0.3) - std::log(2.0) + std::sqrt(2.0) +
                        std::tan(0.3))
            .epsilon(1e-15));
  CHECK(eval("x^0.5", {2.0}, {"x"}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(eval("m/r^3", {}, {}, {{"m", 2.0}, {"r", 2.0}}) == 0.25);
  // coordinates shadow constants of the same name
  CHECK(eval("r", {5.0}, {"r"}, {{"r", 1.0}}) == 5.0);
  CHECK(Expression::parse("3*pi", {"x"}).is_constant());
  CHECK_FALSE(Expression::parse("3*x", {"x"}).is_constant());
}

TEST_CASE("syntax errors carry the column") {
  CHECK(error_column("1 + * 2") == 5);
  CHECK(error_column("(1 + 2") == 7);
  CHECK(error_column("sin 2") == 5);
  CHECK(error_column("2 3") == 3);
  CHECK(error_column("") == 1);
  CHECK(error_column("x + foo", {"x"}) == 5);
  try {
    Expression::parse("x + foo", {"x"}, {{"k", 1.0}});
    FAIL("expected an error");
  } catch (const ExpressionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("unknown name 'foo'") != std::string::npos);
    CHECK(msg.find("x, k, pi") != std::string::npos);
  }
}

TEST_CASE("expression fields differentiate exactly") {
  const std::vector<std::string> v{"x", "y"};
  const ChartField f = expression_field(2, {down(2)}, {Expression::parse("x^3*sin(y)", v),
                                                       Expression::parse("exp(x*y) / (1 + y^2)", v)});
  CHECK(f.has_dual());
  const Point p{{0.7, -0.4}};
  const FieldJet j = jet(f, p, 2);
  const double x = p[0], y = p[1];
  CHECK(j.d(0, 0) == doctest::Approx(3 * x * x * std::sin(y)).epsilon(1e-14));
  CHECK(j.d(0, 1) == doctest::Approx(x * x * x * std::cos(y)).epsilon(1e-14));
  CHECK(j.dd(0, 0, 1) == doctest::Approx(3 * x * x * std::cos(y)).epsilon(1e-14));
  CHECK(j.dd(0, 1, 1) == doctest::Approx(-x * x * x * std::sin(y)).epsilon(1e-14));
  const double q = 1 + y * y;
  CHECK(j.dd(1, 0, 0) == doctest::Approx(y * y * std::exp(x * y) / q).epsilon(1e-14));
  const double dy = x * std::exp(x * y) / q - 2 * y * std::exp(x * y) / (q * q);
  CHECK(j.d(1, 1) == doctest::Approx(dy).epsilon(1e-14));
}

TEST_CASE("expression fields check their shape") {
  const auto e = Expression::parse("x", {"x", "y"});
  CHECK_THROWS_AS(expression_field(2, {down(2)}, {e}), DimensionError);
  CHECK_THROWS_AS(expression_field(3, {}, {e}), DimensionError);
}
