#pragma once

#include "dpmimo/estimate.hpp"
#include "dpmimo/precoder.hpp"
#include "dpmimo/schemes.hpp"

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dpmimo {

// A closed form produced a probability outside [0, 1] by more than rounding.
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AnalyticParams {
    double phi = 1.0;
    double zeta = 1.0;
    double alpha = 0.7;
    double beta = 0.1;
    double chi = 0.0;
    double xi = 0.0;
    int U = 3;
    double rho = 1.0;
    double tau_c = 0.0;
    double tau_p = 0.0;
};

inline double tau_from_rate(double rate_bpcu) { return std::exp2(rate_bpcu) - 1.0; }

// M_bar / tr{F^H R F} with R the rank-truncated covariance.
double phi_factor(const OuterPrecoder& F, const CovarianceModel& cov);

double outage_common_pmux(const AnalyticParams& p);
double outage_private_pmux(const AnalyticParams& p);
double outage_common_pdiv(const AnalyticParams& p);
double outage_private_pdiv(const AnalyticParams& p);
double outage_common_spmux(const AnalyticParams& p);
double outage_private_spmux(const AnalyticParams& p);

double outage_total(double p_common, double p_private);

// sum_u (1 - Pc_u) Rc + (1 - Pp_u) Rp_u
double outage_sum_rate(const std::vector<std::pair<double, double>>& outages, double rate_common,
                       const std::vector<double>& rate_private);

// Ergodic rates in bpcu. One entry per user of the group; zeta varies.
double ergodic_common_pmux(const std::vector<AnalyticParams>& users);
double ergodic_private_pmux(const std::vector<AnalyticParams>& users);
double ergodic_private_pdiv(const std::vector<AnalyticParams>& users);
double ergodic_common_pdiv(const std::vector<AnalyticParams>& users);

// Helpers of the PDIV ergodic forms, evaluated in extended precision.
// phi_helper(mu, nu, tau, n) = int_tau^inf t^-(n+2) E1(mu t + nu) dt
double phi_helper(double mu, double nu, double tau, int n);
// nu = 0 branch, otherwise phi_helper.
double phi_bar_helper(double mu, double nu, double tau, int n);
// theta = b(d-1)/ln2 * int_0^inf (1+cz)^(1-l) e^-hz / ((1+z)(az+b)(az+db)) dz
double theta_helper(double a, double b, double c, double d, double h, int l);
// psi = int_0^inf (a+bz)^-l (a+cz)^-1 e^-hz / (1+z) dz
double psi_helper(double a, double b, double c, double h, int l);

enum class Message { Common, Private };

// Draws the independent-gain model behind each closed form (exponential,
// gamma, hypoexponential, max of two, sums) and counts
// gain < tau (interference + 1/rho).
MetricEstimate oracle_outage_by_gain_sampling(Scheme scheme, Message msg, const AnalyticParams& p,
                                              std::int64_t n, Stream& rng);

// int_0^inf (1 - F(z)) / ((1+z) ln 2) dz
double oracle_ergodic_by_cdf_quadrature(const std::function<double(double)>& cdf);

} // namespace dpmimo
