#pragma once

#include "dpmimo/rng.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace dpmimo {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroupGeometry {
    double azimuth_deg = 30.0;
    double distance_m = 170.0;
    double radius_m = 30.0;
    std::vector<double> user_distances_m{200.0, 170.0, 140.0};
};

struct CovarianceModel {
    CMat R;          // (M/2)x(M/2)
    CMat U;          // dominant eigenvectors, (M/2) x rbar
    RVec lambda;     // descending, length rbar
    int rank = 0;    // r_g
    int truncated_rank = 0; // rbar_g

    // U diag(lambda) U^H, the covariance the sampled channel actually has.
    CMat truncated() const;
};

struct UserLinkParams {
    double zeta = 1.0;
    double delta = 4e4;
    double eta = 2.5;
};

UserLinkParams make_link(double distance_m, double delta, double eta);

// Reduced-dimension fast fading of one user; length rbar each.
struct DualPolChannelSample {
    CVec g_vv, g_vh, g_hv, g_hh;
    double zeta = 1.0;
};

double angular_spread_rad(const GroupGeometry& geo);

// rank_rel_threshold: eigenvalues below threshold * lambda_max count as zero.
CovarianceModel build_one_ring_covariance(const GroupGeometry& geo, int half_antennas,
                                          double spacing_wavelengths,
                                          double rank_rel_threshold = 1e-2);

int truncated_rank_cap(int half_antennas, int M_bar, int G);

CovarianceModel truncate_rank(const CovarianceModel& cov, int M_bar, int G);

DualPolChannelSample sample_channel(const CovarianceModel& cov, const UserLinkParams& link,
                                    Stream& rng);

// h_hat = sqrt(1-eps) h + sqrt(eps) e, e ~ CN(0, I).
CVec apply_csi_error(const CVec& h, double error_variance, Stream& rng);

} // namespace dpmimo
