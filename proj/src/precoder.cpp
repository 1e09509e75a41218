#include "dpmimo/precoder.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace dpmimo {

CMat null_space(const CMat& A, int ambient_dim, double rel_tol)
{
    if (A.cols() == 0)
        return CMat::Identity(ambient_dim, ambient_dim);
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double cut = rel_tol * (s.size() ? s(0) : 0.0);
    int r = 0;
    while (r < s.size() && s(r) > cut)
        ++r;
    return svd.matrixU().rightCols(ambient_dim - r);
}

OuterPrecoder build_outer_precoder(const std::vector<CovarianceModel>& all, int g, int M_bar)
{
    if (g < 0 || g >= static_cast<int>(all.size()))
        throw std::out_of_range("build_outer_precoder: bad group index");
    const int half = static_cast<int>(all[g].R.rows());
    const int k = M_bar / 2;
    int stacked = 0;
    for (int j = 0; j < static_cast<int>(all.size()); ++j)
        if (j != g)
            stacked += all[j].truncated_rank;
    if (stacked >= half)
        throw infeasible_error("M/2 > sum of interfering truncated ranks violated (" +
                               std::to_string(half) + " <= " + std::to_string(stacked) + ")");
    if (k > half - stacked)
        throw infeasible_error("M_bar/2 <= M/2 - sum of interfering truncated ranks violated (" +
                               std::to_string(k) + " > " + std::to_string(half - stacked) + ")");
    if (k > all[g].truncated_rank)
        throw infeasible_error("M_bar/2 <= truncated rank of the served group violated (" +
                               std::to_string(k) + " > " +
                               std::to_string(all[g].truncated_rank) + ")");

    CMat Ustar(half, stacked);
    int c = 0;
    for (int j = 0; j < static_cast<int>(all.size()); ++j) {
        if (j == g)
            continue;
        Ustar.middleCols(c, all[j].truncated_rank) = all[j].U;
        c += all[j].truncated_rank;
    }
    CMat E0 = null_space(Ustar, half);
    const int n0 = static_cast<int>(E0.cols());

    CMat Rt = all[g].truncated();
    CMat P = E0.adjoint() * Rt * E0;
    Eigen::SelfAdjointEigenSolver<CMat> es(P);
    Eigen::VectorXd lam = es.eigenvalues().reverse();
    CMat V = es.eigenvectors().rowwise().reverse();

    OuterPrecoder out;
    out.group = g;
    CMat W(n0, k);
    if (n0 >= 2 * k - 1) {
        const double q = lam(k - 1);
        for (int i = 0; i < k; ++i) {
            double hi = lam(i), lo = lam(n0 - 1 - i);
            double c2 = (i == k - 1 || hi <= lo) ? 1.0 : (q - lo) / (hi - lo);
            c2 = std::clamp(c2, 0.0, 1.0);
            W.col(i) = std::sqrt(c2) * V.col(i);
            if (c2 < 1.0)
                W.col(i) += std::sqrt(1.0 - c2) * V.col(n0 - 1 - i);
        }
        out.equal_gain = true;
    } else {
        W = V.leftCols(k);
    }
    out.F = E0 * W;
    out.Q = out.F.adjoint() * Rt * out.F;
    return out;
}

CVec build_private_precoder(const std::vector<CVec>& others, const CVec& own, Stream& rng)
{
    const int dim = static_cast<int>(own.size());
    if (static_cast<int>(others.size()) >= dim)
        throw infeasible_error("private precoder needs M_bar/2 > U - 1");
    CMat A(dim, others.size());
    for (std::size_t j = 0; j < others.size(); ++j)
        A.col(j) = others[j];
    CMat N = null_space(A, dim);
    if (N.cols() == 1)
        return N.col(0).normalized();
    CVec p = N * (N.adjoint() * own);
    double nrm = p.norm();
    if (nrm > 1e-300)
        return p / nrm;
    // Own channel orthogonal to the whole null space: any unit vector there.
    CVec z(N.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = rng.cnormal();
    return (N * z).normalized();
}

CVec build_common_precoder(int dim, Stream& rng)
{
    if (dim < 1)
        throw std::invalid_argument("build_common_precoder: dim must be >= 1");
    CVec c(dim);
    for (int i = 0; i < dim; ++i)
        c(i) = rng.cnormal();
    return c.normalized();
}

} // namespace dpmimo
