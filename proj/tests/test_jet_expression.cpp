#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cmc/dual.hpp"
#include "cmc/expression.hpp"
#include "cmc/jet.hpp"

using cmc::Jet;

TEST(Jet, PartialsOfProductMatchHandDerivatives) {
    const auto u = Jet<3>::variable_u(0.7), v = Jet<3>::variable_v(-0.3);
    const auto f = u * u * v + sin(u * v);
    const double uu = 0.7, vv = -0.3;
    EXPECT_NEAR(f.value(), uu * uu * vv + std::sin(uu * vv), 1e-15);
    EXPECT_NEAR(f.partial(1, 0), 2 * uu * vv + vv * std::cos(uu * vv), 1e-15);
    EXPECT_NEAR(f.partial(0, 1), uu * uu + uu * std::cos(uu * vv), 1e-15);
    EXPECT_NEAR(f.partial(1, 1), 2 * uu + std::cos(uu * vv) - uu * vv * std::sin(uu * vv), 1e-14);
    EXPECT_NEAR(f.partial(0, 3), -uu * uu * uu * std::cos(uu * vv), 1e-14);
}

TEST(Jet, ElementaryFunctionsAgreeWithFiniteDifferences) {
    const double x0 = 0.4, h = 1e-5;
    const auto x = Jet<2>::variable_u(x0);
    auto check = [&](auto jf, auto sf) {
        const auto j = jf(x);
        EXPECT_NEAR(j.value(), sf(x0), 1e-14);
        EXPECT_NEAR(j.partial(1, 0), (sf(x0 + h) - sf(x0 - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(j.partial(2, 0), (sf(x0 + h) - 2 * sf(x0) + sf(x0 - h)) / (h * h), 2e-4);
    };
    check([](const Jet<2>& a) { return exp(a); }, [](double a) { return std::exp(a); });
    check([](const Jet<2>& a) { return log(a); }, [](double a) { return std::log(a); });
    check([](const Jet<2>& a) { return sqrt(a); }, [](double a) { return std::sqrt(a); });
    check([](const Jet<2>& a) { return atanh(a); }, [](double a) { return std::atanh(a); });
    check([](const Jet<2>& a) { return asin(a); }, [](double a) { return std::asin(a); });
    check([](const Jet<2>& a) { return tanh(a); }, [](double a) { return std::tanh(a); });
    check([](const Jet<2>& a) { return 1.0 / (1.0 - a * a); }, [](double a) { return 1 / (1 - a * a); });
}

TEST(Jet, EqualityIsCoefficientwise) {
    EXPECT_EQ(Jet<2>::variable_u(1.0), Jet<2>::variable_u(1.0));
    EXPECT_FALSE(Jet<2>::variable_u(1.0) == Jet<2>::variable_v(1.0));
}

TEST(Dual, GradientOfRationalFunction) {
    using D = cmc::Dual<2>;
    const D x = D::variable(1.5, 0), y = D::variable(-0.5, 1);
    const D f = sqrt(x * x + y * y) / (x - y);
    const double r = std::sqrt(2.5);
    EXPECT_NEAR(f.v, r / 2.0, 1e-15);
    EXPECT_NEAR(f.d[0], (1.5 / r) / 2.0 - r / 4.0, 1e-15);
    EXPECT_NEAR(f.d[1], (-0.5 / r) / 2.0 + r / 4.0, 1e-15);
}

TEST(Expression, ParsesAndEvaluatesConstants) {
    EXPECT_NEAR(cmc::Expression::parse("pi/3").evaluate(0.0, 0.0), std::numbers::pi / 3, 1e-15);
    EXPECT_NEAR(cmc::Expression::parse("1/sqrt(2)").evaluate(0.0, 0.0), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(cmc::Expression::parse("2^3^2").evaluate(0.0, 0.0), 512.0, 0);
    EXPECT_NEAR(cmc::Expression::parse("-x^2").evaluate(3.0, 0.0), -9.0, 0);
}

TEST(Expression, SymbolicDerivativeMatchesJet) {
    const auto e = cmc::Expression::parse("log(2/(1 - x^2 - y^2)) + sin(x*y)");
    const auto ex = e.derivative('x'), exy = ex.derivative('y');
    const auto j = e.evaluate(Jet<2>::variable_u(0.3), Jet<2>::variable_v(0.2));
    EXPECT_NEAR(ex.evaluate(0.3, 0.2), j.partial(1, 0), 1e-14);
    EXPECT_NEAR(exy.evaluate(0.3, 0.2), j.partial(1, 1), 1e-13);
}

TEST(Expression, RejectsMalformedInput) {
    EXPECT_THROW(cmc::Expression::parse("x +"), cmc::ParseError);
    EXPECT_THROW(cmc::Expression::parse("foo(x)"), cmc::ParseError);
    EXPECT_THROW(cmc::Expression::parse("(x"), cmc::ParseError);
    EXPECT_THROW(cmc::Expression::parse("z"), cmc::ParseError);
}
