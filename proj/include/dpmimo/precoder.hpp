#pragma once

#include "dpmimo/channel.hpp"

#include <vector>

namespace dpmimo {

struct OuterPrecoder {
    CMat F;    // (M/2) x (M_bar/2), F^H F = I
    int group = 0;
    // Projected covariance F^H Rtilde F; q*I when the equal-gain basis exists.
    CMat Q;
    bool equal_gain = false;
};

struct InnerPrecoders {
    CVec common_v, common_h;
    std::vector<CVec> private_v, private_h;
};

// Orthonormal basis of the orthogonal complement of span(A); A may have zero columns.
CMat null_space(const CMat& A, int ambient_dim, double rel_tol = 1e-10);

// F_g lies in null{U*_g} (stacked interfering eigenvectors). Inside that
// null space we pick the M_bar/2-dim subspace on which the projected
// covariance is q*I with q as large as possible: the i-th strongest
// eigenvector is blended with the i-th weakest until its Rayleigh
// quotient drops to q, the M_bar/2-th eigenvalue. Falls back to the
// dominant eigenvectors when the null space is too small to pair.
OuterPrecoder build_outer_precoder(const std::vector<CovarianceModel>& all, int g, int M_bar);

// Unit vector orthogonal to every column of `others` (effective channels
// F^H h of the other users). With a null space wider than one dimension,
// returns the projection of `own` onto it, which maximises |own^H p|.
CVec build_private_precoder(const std::vector<CVec>& others, const CVec& own, Stream& rng);

// i.i.d. CN(0,1) entries, normalised.
CVec build_common_precoder(int dim, Stream& rng);

} // namespace dpmimo
