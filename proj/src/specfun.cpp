#include "dpmimo/specfun.hpp"

#include <cmath>

namespace dpmimo {

double gamma_int(int n)
{
    if (n <= 0)
        throw domain_error("gamma_int: n must be >= 1");
    if (n > 171)
        throw std::overflow_error("gamma_int: (n-1)! overflows a double");
    double f = 1.0;
    for (int k = 2; k < n; ++k)
        f *= k;
    return f;
}

namespace {

// Regularized P(a,x) by series, x < a + 1.
double gamma_p_series(double a, double x)
{
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized Q(a,x) by continued fraction, x >= a + 1.
double gamma_q_cf(double a, double x)
{
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 100000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-17)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double lower_incomplete_gamma(double a, double x)
{
    if (!(a > 0) || !(x >= 0))
        throw domain_error("lower_incomplete_gamma: need a > 0, x >= 0");
    if (x == 0)
        return 0.0;
    double g = std::tgamma(a);
    if (x < a + 1.0)
        return gamma_p_series(a, x) * g;
    return (1.0 - gamma_q_cf(a, x)) * g;
}

} // namespace dpmimo
