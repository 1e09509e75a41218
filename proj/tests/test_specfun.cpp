#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpmimo/specfun.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

using namespace dpmimo;
using doctest::Approx;

TEST_CASE("Ei(-x) frozen values")
{
    CHECK(exp_integral_Ei_neg(1.0) == Approx(-0.21938393439552027).epsilon(1e-14));
    CHECK(exp_integral_Ei_neg(0.5) == Approx(-0.5597735947761608).epsilon(1e-14));
    CHECK(exp_integral_Ei_neg(10.0) == Approx(-4.156968929685324e-06).epsilon(1e-13));
}

TEST_CASE("Ei(-x) against boost expint over six decades")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> lg(-3.0, 2.5);
    for (int i = 0; i < 200; ++i) {
        const double x = std::pow(10.0, lg(gen));
        const double ref = boost::math::expint(-x);
        CHECK(exp_integral_Ei_neg(x) == Approx(ref).epsilon(1e-12));
        CHECK(scaled_e1(x) == Approx(-std::exp(x) * ref).epsilon(1e-12));
    }
}

TEST_CASE("series and continued fraction agree at the switch point")
{
    const double below = std::nextafter(1.0, 0.0);
    CHECK(exp_integral_Ei_neg(below) == Approx(exp_integral_Ei_neg(1.0)).epsilon(1e-14));
    CHECK(detail::e1_series(1.0) == Approx(std::exp(-1.0) * detail::scaled_e1_cf(1.0)).epsilon(1e-14));
}

TEST_CASE("scaled E1 stays finite where e^x overflows")
{
    const double x = 1e3;
    const double s = scaled_e1(x);
    CHECK(std::isfinite(s));
    // e^x E1(x) ~ 1/x (1 - 1/x + 2/x^2)
    CHECK(s == Approx(1 / x * (1 - 1 / x + 2 / (x * x))).epsilon(1e-8));
}

TEST_CASE("extended precision E1 matches double")
{
    using R = boost::multiprecision::cpp_bin_float_100;
    for (double x : {1e-4, 0.3, 0.99, 1.0, 4.0, 60.0}) {
        R v = scaled_e1(R(x));
        CHECK(v.convert_to<double>() == Approx(scaled_e1(x)).epsilon(1e-14));
    }
    R v = exp_integral_Ei_neg(R(1));
    CHECK(abs(v - R("-0.21938393439552027367716377546012164903104729340690820757")) < R(1e-50));
}

TEST_CASE("lower incomplete gamma")
{
    CHECK(lower_incomplete_gamma(3, 2) == Approx(2 * (1 - 5 * std::exp(-2.0))).epsilon(1e-14));
    CHECK(lower_incomplete_gamma(1, 0.3) == Approx(-std::expm1(-0.3)).epsilon(1e-14));
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ua(0.5, 12.0), ux(0.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const double a = ua(gen), x = ux(gen);
        CHECK(lower_incomplete_gamma(a, x) == Approx(boost::math::tgamma_lower(a, x)).epsilon(1e-12));
    }
    CHECK(lower_incomplete_gamma(2.5, 0.0) == 0.0);
}

TEST_CASE("gamma_int and factorial")
{
    CHECK(gamma_int(1) == 1.0);
    CHECK(gamma_int(5) == 24.0);
    CHECK(factorial<double>(0) == 1.0);
    CHECK(factorial<double>(10) == 3628800.0);
}

TEST_CASE("truncated exponential series")
{
    // e_n(x) = e^x Q(n+1, x)
    for (int n : {0, 1, 3, 8, 20})
        for (double x : {0.0, 0.1, 1.5, 7.0, 25.0})
            CHECK(truncated_exp_series(n, x) ==
                  Approx(std::exp(x) * boost::math::gamma_q(n + 1.0, x)).epsilon(1e-12));
    CHECK(truncated_exp_series(2, -1.0) == Approx(0.5));
}

TEST_CASE("domain errors")
{
    CHECK_THROWS_AS(exp_integral_Ei_neg(0.0), domain_error);
    CHECK_THROWS_AS(exp_integral_Ei_neg(-1.0), domain_error);
    CHECK_THROWS_AS(scaled_e1(0.0), domain_error);
    CHECK_THROWS_AS(truncated_exp_series(-1, 1.0), domain_error);
}
