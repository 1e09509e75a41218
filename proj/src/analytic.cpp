#include "dpmimo/analytic.hpp"
#include "dpmimo/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dpmimo {

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;

const Real& ln2()
{
    static const Real v = log(Real(2));
    return v;
}

// Moves x off a removable singularity at `at`.
double nudge(double x, double at)
{
    double scale = std::max(std::abs(at), 1e-300);
    if (std::abs(x - at) <= 1e-9 * scale)
        return at + 1e-9 * scale * (x >= at ? 1.0 : -1.0);
    return x;
}

double checked_probability(double p, const char* what)
{
    if (std::isnan(p))
        throw consistency_error(std::string(what) + ": NaN");
    if (p < -1e-12 || p > 1.0 + 1e-12)
        throw consistency_error(std::string(what) + ": value " + std::to_string(p) +
                                " outside [0,1]");
    return std::clamp(p, 0.0, 1.0);
}

void check_params(const AnalyticParams& p)
{
    if (!(p.phi > 0 && p.zeta > 0 && p.alpha >= 0 && p.beta > 0 && p.rho > 0 && p.U >= 1))
        throw domain_error("analytic: phi, zeta, beta, rho must be positive and U >= 1");
    if (!(p.chi >= 0 && p.chi <= 1 && p.xi >= 0 && p.tau_c >= 0 && p.tau_p >= 0))
        throw domain_error("analytic: chi in [0,1], xi >= 0, tau >= 0 required");
}

// e^x E1(x) = -e^x Ei(-x)
Real sE1(const Real& x) { return scaled_e1(x); }

// e^{mu tau + nu} Phi(mu, nu, tau, n). Every exponential is folded into
// scaled E1 values so large mu tau + nu never overflows.
Real phi_scaled(const Real& mu, const Real& nu, const Real& tau, int n)
{
    const Real r = pow(mu / nu, n + 1);
    const Real s = (n % 2 == 0) ? Real(1) : Real(-1);
    const Real np1 = n + 1;
    Real out = (1 / pow(tau, n + 1) + s * r) * sE1(mu * tau + nu) / np1;
    out -= s * r * truncated_exp_series(n, nu) * sE1(mu * tau) / np1;
    Real inner = 0;
    for (int m = 1; m <= n; ++m) {
        Real sk = 0;
        for (int k = 0; k < m; ++k)
            sk += factorial<Real>(m - k - 1) * pow(-mu * tau, k);
        inner += pow(-nu / (mu * tau), m) / factorial<Real>(m) * sk;
    }
    out -= s * r * inner / np1;
    return out;
}

// e^{mu tau + nu} Phibar(mu, nu, tau, n)
Real phi_bar_scaled(const Real& mu, const Real& nu, const Real& tau, int n)
{
    if (nu != 0)
        return phi_scaled(mu, nu, tau, n);
    const Real s = (n % 2 == 0) ? Real(1) : Real(-1);
    const Real f1 = factorial<Real>(n + 1);
    Real sum = 0;
    for (int m = 0; m <= n; ++m)
        sum += factorial<Real>(n - m) * pow(-mu * tau, m);
    Real out = (1 / pow(tau, n + 1) + s * pow(mu, n + 1) / f1) * sE1(mu * tau);
    out -= sum / (f1 * pow(tau, n + 1));
    return out / (n + 1);
}

Real theta_r(const Real& a, const Real& b, const Real& c, const Real& d, const Real& h, int l)
{
    const Real X = -sE1(b * h / a);
    const Real Y = -sE1(b * h * d / a);
    const Real Z = -sE1(h);
    Real t = -X / (a - b) + Y / (a - d * b) + (1 - d) * b * Z / ((a - b) * (a - d * b));
    if (l >= 2) {
        const Real one = 1;
        t -= (l - 1) * phi_bar_scaled(h / c, h * (b * c - a) / (a * c), one, l - 2) / (a - b);
        t += (l - 1) * phi_bar_scaled(h / c, h * (b * c * d - a) / (a * c), one, l - 2) /
             (a - d * b);
        t += (l - 1) * (1 - d) * b * phi_bar_scaled(h / c, h * (c - 1) / c, one, l - 2) /
             ((a - b) * (a - d * b));
    }
    return t / ln2();
}

Real psi_r(const Real& a, const Real& b, const Real& c, const Real& h, int l)
{
    Real out = pow(a, -l) / (a - c) * (sE1(h) - sE1(a * h / c));
    out -= l / (a - c) * phi_bar_scaled(h / b, h * (b - a) / b, a, l - 1);
    out += l / (a - c) * phi_bar_scaled(h / b, a * h * (b - c) / (b * c), a, l - 1);
    return out;
}

// int_0^inf e^-hz / ((1+z)(a+bz)) dz, b >= 0.
Real j_r(const Real& a, const Real& b, const Real& h)
{
    if (b == 0)
        return sE1(h) / a;
    return (sE1(h) - sE1(a * h / b)) / (a - b);
}

double inv_zeta_sum(const std::vector<AnalyticParams>& users)
{
    double s = 0.0;
    for (auto& u : users)
        s += 1.0 / u.zeta;
    return s;
}

void check_users(const std::vector<AnalyticParams>& users)
{
    if (users.empty())
        throw domain_error("ergodic: empty user list");
    for (auto& u : users)
        check_params(u);
}

double finite(const Real& v, const char* what)
{
    double d = v.convert_to<double>();
    if (!std::isfinite(d))
        throw consistency_error(std::string(what) + ": non-finite result");
    return d;
}

} // namespace

double phi_factor(const OuterPrecoder& F, const CovarianceModel& cov)
{
    const double M_bar = 2.0 * static_cast<double>(F.F.cols());
    const double tr = (F.F.adjoint() * cov.truncated() * F.F).trace().real();
    if (!(tr > 0))
        throw consistency_error("phi_factor: tr{F^H R F} is not positive");
    return M_bar / tr;
}

double outage_common_pmux(const AnalyticParams& p)
{
    check_params(p);
    const double t = p.tau_c;
    double v = 1.0 - std::pow(p.alpha / (p.alpha + p.chi * p.beta * t), p.U) *
                         std::exp(-p.phi * t / (p.rho * p.zeta * p.alpha));
    return checked_probability(v, "outage_common_pmux");
}

double outage_private_pmux(const AnalyticParams& p)
{
    check_params(p);
    const double t = p.tau_p;
    double v = 1.0 - p.beta / (p.chi * p.alpha * t + p.beta) *
                         std::exp(-p.phi * t / (p.rho * p.zeta * p.beta));
    return checked_probability(v, "outage_private_pmux");
}

double outage_common_pdiv(const AnalyticParams& p)
{
    check_params(p);
    const double t = p.tau_c, a = p.alpha, b = p.beta, U = p.U;
    const double s = p.phi * t / (p.rho * p.zeta * a);
    double br;
    if (p.chi == 0.0) {
        br = a / (a + b * t) * std::exp(-s) - a / (2 * (a + 2 * b * t)) * std::exp(-2 * s);
    } else {
        const double x = nudge(p.chi, 1.0);
        const double aU = std::pow(a, U + 1);
        br = aU * std::pow(a + x * b * t, -U) / ((1 - x) * (a + b * t)) * std::exp(-s) -
             x * x * aU * std::pow(a + b * t, -U) / ((1 - x) * (x * a + b * t)) * std::exp(-s / x) -
             x * x * x * aU * std::pow(a + 2 * b * t, -U) /
                 (2 * (1 - x) * (1 - x) * (x * a + 2 * b * t)) * std::exp(-2 * s / x) -
             aU * std::pow(a + 2 * x * b * t, -U) / (2 * (1 - x) * (1 - x) * (a + 2 * b * t)) *
                 std::exp(-2 * s) +
             x * x * aU * std::pow(a + (1 + x) * b * t, -U) /
                 ((1 - x) * (1 - x) * (x * a + (1 + x) * b * t)) * std::exp(-s * (1 + x) / x);
    }
    return checked_probability(1.0 - 2.0 * br, "outage_common_pdiv");
}

double outage_private_pdiv(const AnalyticParams& p)
{
    check_params(p);
    const double t = p.tau_p, b = p.beta, U = p.U;
    const double s = p.phi * t / (p.rho * p.zeta * b);
    double br;
    if (p.chi == 0.0) {
        const double xa = p.xi * p.alpha;
        br = b / (xa * t + b) * std::exp(-s) - b / (2 * (2 * xa * t + b)) * std::exp(-2 * s);
    } else {
        const double x = nudge(p.chi, 1.0);
        // xi*alpha*tau equal to beta or chi*beta only cancels in pairs; keep off both.
        const double xa = p.xi * p.alpha;
        const double bb = b * b, om = 1 - x;
        br = bb / om * std::pow(1 + x * t, 1 - U) / (x * (xa * t + b) * (xa * t + b / x)) *
                 std::exp(-s) -
             x * x * bb / om * std::pow(1 + t, 1 - U) / ((xa * t + b) * (xa * t + x * b)) *
                 std::exp(-s / x) -
             x * x * x * bb / (om * om) * std::pow(1 + 2 * t, 1 - U) /
                 (2 * (2 * xa * t + b) * (2 * xa * t + x * b)) * std::exp(-2 * s / x) -
             bb / (x * om * om) * std::pow(1 + 2 * x * t, 1 - U) /
                 (2 * (2 * xa * t + b) * (2 * xa * t + b / x)) * std::exp(-2 * s) +
             x * x * bb / (om * om) * std::pow(1 + (1 + x) * t, 1 - U) /
                 ((xa * t * (1 + x) + b) * (xa * t * (1 + x) + x * b)) *
                 std::exp(-s * (1 + x) / x);
    }
    return checked_probability(1.0 - 2.0 * br, "outage_private_pdiv");
}

double outage_common_spmux(const AnalyticParams& p)
{
    check_params(p);
    const double t = p.tau_c, a = p.alpha, b = p.beta;
    double v = 1.0 - a / ((p.chi * t + 1) * (a + b * t)) *
                         std::pow(1 + p.chi * b * t / a, -p.U) *
                         std::exp(-p.phi * t / (p.rho * p.zeta * a));
    return checked_probability(v, "outage_common_spmux");
}

double outage_private_spmux(const AnalyticParams& p)
{
    check_params(p);
    const double t = p.tau_p, a = p.alpha, b = p.beta;
    double v = 1.0 - b * b / ((p.xi * a * t + b) * (p.chi * a * t + b)) *
                         std::pow(1 + p.chi * t, -p.U) *
                         std::exp(-p.phi * t / (p.rho * p.zeta * b));
    return checked_probability(v, "outage_private_spmux");
}

double outage_total(double pc, double pp)
{
    return checked_probability(pc + pp - pc * pp, "outage_total");
}

double outage_sum_rate(const std::vector<std::pair<double, double>>& outages, double rate_common,
                       const std::vector<double>& rate_private)
{
    if (outages.size() != rate_private.size())
        throw domain_error("outage_sum_rate: one private rate per user required");
    double s = 0.0;
    for (std::size_t u = 0; u < outages.size(); ++u)
        s += (1.0 - outages[u].first) * rate_common + (1.0 - outages[u].second) * rate_private[u];
    return s;
}

double ergodic_common_pmux(const std::vector<AnalyticParams>& users)
{
    check_users(users);
    const Real S = inv_zeta_sum(users);
    Real total = 0;
    for (auto& p : users) {
        const Real al = p.alpha, phi = p.phi, rho = p.rho;
        const Real A = phi * S / (rho * al);
        if (p.chi == 0.0) {
            total += sE1(A) / ln2();
            continue;
        }
        const Real cb = nudge(p.chi * p.beta, p.alpha);
        const Real chi = cb / Real(p.beta);
        const int N = users.size() * users.size();
        const Real B = phi * (cb - al) * S / (chi * rho * Real(p.beta) * al);
        const Real C = phi * S / (rho * cb);
        Real inner = 0;
        for (int m = 1; m < N; ++m) {
            Real sk = 0;
            for (int k = 0; k < m; ++k)
                sk += factorial<Real>(m - k - 1) * pow(-C, k);
            inner += pow(-(cb - al) / al, m) / factorial<Real>(m) * sk;
        }
        const Real sign = (N - 1) % 2 == 0 ? Real(1) : Real(-1);
        // A - B - C = 0, so e^A e^-B Ei(-C) = -e^C E1(C); no exponential survives.
        total += sign / ln2() * pow(al / (cb - al), N) *
                 (-sE1(A) + truncated_exp_series(N - 1, B) * sE1(C) + inner);
    }
    return finite(total, "ergodic_common_pmux");
}

double ergodic_private_pmux(const std::vector<AnalyticParams>& users)
{
    check_users(users);
    Real total = 0;
    for (auto& p : users) {
        const Real b = Real(p.phi) / (Real(p.rho) * p.zeta * p.beta);
        if (p.chi == 0.0) {
            total += sE1(b) / ln2();
            continue;
        }
        const Real ca = nudge(p.chi * p.alpha, p.beta);
        const Real a = Real(p.phi) / (Real(p.rho) * p.zeta * ca);
        total += Real(p.beta) / (ln2() * (p.beta - ca)) * (sE1(b) - sE1(a));
    }
    return finite(total, "ergodic_private_pmux");
}

double ergodic_private_pdiv(const std::vector<AnalyticParams>& users)
{
    check_users(users);
    Real total = 0;
    for (auto& p : users) {
        const Real b = p.beta;
        const Real H = Real(p.phi) / (Real(p.rho) * p.zeta * p.beta);
        const int U = p.U;
        if (p.chi == 0.0) {
            const Real xa = Real(p.xi) * p.alpha;
            total += (2 * b * j_r(b, xa, H) - b * j_r(b, 2 * xa, 2 * H)) / ln2();
            continue;
        }
        const Real x = nudge(p.chi, 1.0);
        const Real a = p.xi * p.alpha > 1e-30 * p.beta ? Real(p.xi * p.alpha) : Real(1e-30 * p.beta);
        const Real om = 1 - x;
        struct Term {
            Real coef, a, c, d, h;
        };
        const Term terms[5] = {
            {2 * b * b / (x * om), a, x, 1 / x, H},
            {-2 * x * x * b * b / om, a, 1, x, H / x},
            {-x * x * x * b * b / (om * om), 2 * a, 2, x, 2 * H / x},
            {-b * b / (x * om * om), 2 * a, 2 * x, 1 / x, 2 * H},
            {2 * x * x * b * b / (om * om), (1 + x) * a, 1 + x, x, (1 + x) * H / x},
        };
        for (auto& t : terms) {
            Real ta = t.a;
            if (abs(ta - b) <= 1e-9 * b)
                ta = b * (1 + Real(1e-9));
            if (abs(ta - t.d * b) <= 1e-9 * b)
                ta = t.d * b * (1 + Real(1e-9));
            total += t.coef / (b * (t.d - 1)) * theta_r(ta, b, t.c, t.d, t.h, U);
        }
    }
    return finite(total, "ergodic_private_pdiv");
}

double ergodic_common_pdiv(const std::vector<AnalyticParams>& users)
{
    check_users(users);
    const double S = inv_zeta_sum(users);
    Real total = 0;
    for (auto& p : users) {
        const int U = p.U;
        const Real al = p.alpha, be = p.beta;
        const Real h = Real(p.phi) * S / (Real(U) * p.rho * p.alpha);
        const Real pre = pow(Real(2), U - 1) / (Real(U) * ln2());
        if (p.chi == 0.0) {
            total += pre * al * (j_r(al, be, h) - j_r(al, 2 * be, 2 * h) / 2);
            continue;
        }
        const Real x = nudge(p.chi, 1.0);
        const Real om = 1 - x;
        auto psi = [&](const Real& b, const Real& c, const Real& hh) {
            Real cc = abs(al - c) <= 1e-9 * al ? c * (1 + Real(1e-9)) : c;
            return psi_r(al, b, cc, hh, U);
        };
        Real s = psi(x * be, be, h) / om - x * psi(be, be / x, h / x) / om -
                 x * x * psi(2 * be, 2 * be / x, 2 * h / x) / (2 * om * om) -
                 psi(2 * x * be, 2 * be, 2 * h) / (2 * om * om) +
                 x * psi((1 + x) * be, (1 + x) * be / x, (1 + x) * h / x) / (om * om);
        total += pre * pow(al, U + 1) * s;
    }
    return finite(total, "ergodic_common_pdiv");
}

double phi_helper(double mu, double nu, double tau, int n)
{
    if (nu == 0.0)
        throw domain_error("phi_helper: nu = 0 (use phi_bar_helper)");
    const Real m = mu, v = nu, t = tau;
    return (exp(-(m * t + v)) * phi_scaled(m, v, t, n)).convert_to<double>();
}

double phi_bar_helper(double mu, double nu, double tau, int n)
{
    const Real m = mu, v = nu, t = tau;
    return (exp(-(m * t + v)) * phi_bar_scaled(m, v, t, n)).convert_to<double>();
}

double theta_helper(double a, double b, double c, double d, double h, int l)
{
    return theta_r(a, b, c, d, h, l).convert_to<double>();
}

double psi_helper(double a, double b, double c, double h, int l)
{
    return psi_r(a, b, c, h, l).convert_to<double>();
}

MetricEstimate oracle_outage_by_gain_sampling(Scheme scheme, Message msg, const AnalyticParams& p,
                                              std::int64_t n, Stream& rng)
{
    check_params(p);
    // Means of the branch gains; every entry is zeta * power / phi.
    const double za = p.zeta * p.alpha / p.phi;
    const double zb = p.zeta * p.beta / p.phi;
    const double chi = p.chi, xi = p.xi, s2 = 1.0 / p.rho;
    const int U = p.U;
    auto ex = [&](double mean) { return mean > 0 ? rng.exponential(mean) : 0.0; };
    auto gam = [&](int k, double mean) { return k > 0 && mean > 0 ? rng.gamma(k, mean) : 0.0; };
    auto hypo = [&](double m1, double m2) { return ex(m1) + ex(m2); };

    const bool common = msg == Message::Common;
    const double tau = common ? p.tau_c : p.tau_p;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        double gain = 0.0, intf = 0.0;
        switch (scheme) {
        case Scheme::PMUX:
            if (common) {
                gain = ex(za);
                intf = gam(U, chi * zb);
            } else {
                gain = ex(zb);
                intf = ex(chi * za);
            }
            break;
        case Scheme::PDIV:
            if (common) {
                gain = std::max(hypo(za, chi * za), hypo(za, chi * za));
                intf = ex(zb) + gam(U, chi * zb);
            } else {
                gain = std::max(hypo(zb, chi * zb), hypo(zb, chi * zb));
                intf = hypo(xi * za, xi * chi * za) + gam(U - 1, chi * zb);
            }
            break;
        case Scheme::SPMUX:
            if (common) {
                gain = ex(za);
                intf = ex(zb) + ex(chi * za) + gam(U, chi * zb);
            } else {
                gain = ex(zb);
                intf = ex(xi * za) + ex(chi * za) + gam(U, chi * zb);
            }
            break;
        default:
            throw domain_error("oracle_outage_by_gain_sampling: no closed form for this scheme");
        }
        if (gain < tau * (intf + s2))
            ++hits;
    }
    return proportion(common ? "outage_common" : "outage_private", hits, n);
}

double oracle_ergodic_by_cdf_quadrature(const std::function<double(double)>& cdf)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double z) { return (1.0 - cdf(z)) / (1.0 + z); };
    double err = 0.0;
    double v = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err);
    if (!(err <= 1e-8 * std::max(1.0, std::abs(v))))
        throw consistency_error("oracle_ergodic_by_cdf_quadrature: no convergence");
    return v / std::log(2.0);
}

} // namespace dpmimo
