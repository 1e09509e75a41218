#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpmimo {

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// (n-1)! for n >= 1.
double gamma_int(int n);

// gamma(a, x) = int_0^x t^(a-1) e^-t dt.
double lower_incomplete_gamma(double a, double x);

namespace detail {

template <class Real>
Real euler_gamma()
{
    return Real("0.57721566490153286060651209008240243104215933593992359880576723");
}

template <>
inline double euler_gamma<double>()
{
    return 0.57721566490153286060651209008240243104215933593992;
}

template <class Real>
Real eps()
{
    return std::numeric_limits<Real>::epsilon();
}

// e^x E1(x) for x >= 1, modified Lentz on the continued fraction.
template <class Real>
Real scaled_e1_cf(const Real& x)
{
    using std::abs;
    const Real tiny = std::numeric_limits<Real>::min() * 1e10;
    Real b = x + 1;
    Real c = 1 / tiny;
    Real d = 1 / b;
    Real h = d;
    for (int i = 1; i < 100000; ++i) {
        Real an = -Real(i) * Real(i);
        b += 2;
        d = 1 / (an * d + b);
        c = b + an / c;
        Real del = c * d;
        h *= del;
        if (abs(del - 1) <= eps<Real>())
            return h;
    }
    throw std::runtime_error("E1 continued fraction did not converge");
}

// E1(x) for 0 < x < 1 by the convergent power series.
template <class Real>
Real e1_series(const Real& x)
{
    using std::abs;
    using std::log;
    Real sum = 0, term = 1;
    for (int k = 1; k < 10000; ++k) {
        term *= -x / k;
        Real add = term / k;
        sum += add;
        if (abs(add) <= abs(sum) * eps<Real>())
            break;
    }
    return -euler_gamma<Real>() - log(x) - sum;
}

} // namespace detail

// e^x E1(x) = -e^x Ei(-x); finite for every x > 0, so products like
// e^{bh/a} Ei(-bh/a) never overflow.
template <class Real>
Real scaled_e1(const Real& x)
{
    using std::exp;
    if (!(x > 0))
        throw domain_error("scaled_e1: x must be positive");
    if (x < 1)
        return exp(x) * detail::e1_series(x);
    return detail::scaled_e1_cf(x);
}

// Ei(-x) for x > 0.
template <class Real>
Real exp_integral_Ei_neg(const Real& x)
{
    using std::exp;
    if (!(x > 0))
        throw domain_error("Ei(-x): x must be positive");
    if (x < 1)
        return -detail::e1_series(x);
    return -exp(-x) * detail::scaled_e1_cf(x);
}

// e_n(x) = sum_{k=0}^{n} x^k / k!
template <class Real>
Real truncated_exp_series(int n, const Real& x)
{
    if (n < 0)
        throw domain_error("truncated_exp_series: n must be >= 0");
    Real sum = 1, term = 1;
    for (int k = 1; k <= n; ++k) {
        term *= x / k;
        sum += term;
    }
    return sum;
}

template <class Real>
Real factorial(int n)
{
    Real f = 1;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

} // namespace dpmimo
