#include "dpmimo/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace dpmimo {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15)
                break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

} // namespace

CMat CovarianceModel::truncated() const
{
    return U * lambda.asDiagonal() * U.adjoint();
}

UserLinkParams make_link(double distance_m, double delta, double eta)
{
    if (!(distance_m > 0))
        throw std::invalid_argument("user distance must be positive");
    return {delta * std::pow(distance_m, -eta), delta, eta};
}

double angular_spread_rad(const GroupGeometry& geo)
{
    return std::atan(geo.radius_m / geo.distance_m);
}

CovarianceModel build_one_ring_covariance(const GroupGeometry& geo, int half_antennas,
                                          double spacing_wavelengths, double rank_rel_threshold)
{
    if (!(geo.radius_m > 0) || !(geo.distance_m > geo.radius_m))
        throw std::invalid_argument("one-ring geometry needs distance > radius > 0");
    if (half_antennas < 2 || !(spacing_wavelengths > 0))
        throw std::invalid_argument("one-ring: need M/2 >= 2 and positive spacing");

    const int n = half_antennas;
    const double theta = geo.azimuth_deg * std::numbers::pi / 180.0;
    const double spread = angular_spread_rad(geo);
    std::vector<double> x, w;
    gauss_legendre(200, x, w);

    // [R]_{mn} depends on m-n only; fill the first column then mirror.
    std::vector<std::complex<double>> col(n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q) {
            double om = theta + spread * x[q];
            double ph = -2.0 * std::numbers::pi * spacing_wavelengths * k * std::cos(om);
            acc += 0.5 * w[q] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        col[k] = acc;
    }
    CovarianceModel cov;
    cov.R.resize(n, n);
    for (int m = 0; m < n; ++m)
        for (int c = 0; c < n; ++c)
            cov.R(m, c) = m >= c ? col[m - c] : std::conj(col[c - m]);

    Eigen::SelfAdjointEigenSolver<CMat> es(cov.R);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("covariance eigendecomposition failed");
    RVec ev = es.eigenvalues().reverse();
    CMat V = es.eigenvectors().rowwise().reverse();
    const double cut = rank_rel_threshold * ev(0);
    int r = 0;
    while (r < n && ev(r) > cut)
        ++r;
    cov.rank = r;
    cov.truncated_rank = r;
    cov.lambda = ev.head(r);
    cov.U = V.leftCols(r);
    return cov;
}

int truncated_rank_cap(int half_antennas, int M_bar, int G)
{
    if (G <= 1)
        return half_antennas;
    return (half_antennas - M_bar / 2) / (G - 1);
}

CovarianceModel truncate_rank(const CovarianceModel& cov, int M_bar, int G)
{
    if (G < 1)
        throw std::invalid_argument("truncate_rank: G must be >= 1");
    const int half = static_cast<int>(cov.R.rows());
    if (M_bar / 2 > half)
        throw infeasible_error("M_bar/2 > M/2");
    int rbar = G == 1 ? cov.rank : std::min(cov.rank, truncated_rank_cap(half, M_bar, G));
    if (rbar < 1)
        throw infeasible_error("truncated rank is zero: M/2 - M_bar/2 < G - 1");
    CovarianceModel out = cov;
    out.truncated_rank = rbar;
    out.U = cov.U.leftCols(rbar);
    out.lambda = cov.lambda.head(rbar);
    return out;
}

DualPolChannelSample sample_channel(const CovarianceModel& cov, const UserLinkParams& link,
                                    Stream& rng)
{
    const int r = cov.truncated_rank;
    DualPolChannelSample s;
    s.zeta = link.zeta;
    for (CVec* g : {&s.g_vv, &s.g_vh, &s.g_hv, &s.g_hh}) {
        g->resize(r);
        for (int i = 0; i < r; ++i)
            (*g)(i) = rng.cnormal();
    }
    return s;
}

CVec apply_csi_error(const CVec& h, double error_variance, Stream& rng)
{
    if (!(error_variance >= 0.0) || error_variance > 1.0)
        throw std::domain_error("csi error variance must lie in [0, 1]");
    if (error_variance == 0.0)
        return h;
    const double a = std::sqrt(1.0 - error_variance), b = std::sqrt(error_variance);
    CVec out(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i)
        out(i) = a * h(i) + b * rng.cnormal();
    return out;
}

} // namespace dpmimo
