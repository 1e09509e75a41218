#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpmimo/analytic.hpp"
#include "dpmimo/channel.hpp"
#include "dpmimo/mc.hpp"
#include "dpmimo/precoder.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace dpmimo;
using doctest::Approx;

namespace {

Scenario section_v()
{
    Scenario sc;
    sc.groups = default_groups(sc.G, {200.0, 170.0, 140.0});
    return sc;
}

} // namespace

TEST_CASE("one-ring covariance is a Hermitian PSD Toeplitz matrix with unit diagonal")
{
    GroupGeometry geo;
    auto cov = build_one_ring_covariance(geo, 50, 0.5);
    CHECK((cov.R - cov.R.adjoint()).norm() < 1e-12);
    for (int i = 0; i < 50; ++i)
        CHECK(std::abs(cov.R(i, i) - 1.0) < 1e-12);
    CHECK(std::abs(cov.R(7, 3) - cov.R(10, 6)) < 1e-14);
    Eigen::SelfAdjointEigenSolver<CMat> es(cov.R);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    CHECK((cov.R * cov.U - cov.U * cov.lambda.asDiagonal()).norm() < 1e-9);
    for (int i = 1; i < cov.lambda.size(); ++i)
        CHECK(cov.lambda(i) <= cov.lambda(i - 1));
    CHECK(cov.lambda(cov.rank - 1) > 1e-2 * cov.lambda(0));
}

TEST_CASE("vanishing scatter radius collapses the covariance to one steering vector")
{
    GroupGeometry geo;
    geo.radius_m = 1e-6;
    auto cov = build_one_ring_covariance(geo, 16, 0.5);
    CHECK(cov.rank == 1);
    CHECK(cov.lambda(0) == Approx(16.0).epsilon(1e-8));
    const double th = geo.azimuth_deg * std::numbers::pi / 180.0;
    CVec a(16);
    for (int k = 0; k < 16; ++k)
        a(k) = std::polar(1.0, -std::numbers::pi * k * std::cos(th));
    CHECK((cov.R - a * a.adjoint()).norm() < 1e-6);
}

TEST_CASE("rank truncation and the scenario ranks")
{
    CHECK(truncated_rank_cap(50, 6, 4) == 15);
    CHECK(truncated_rank_cap(50, 6, 1) == 50);
    auto ps = prepare(section_v());
    const int expect[] = {6, 3, 3, 6};
    for (int g = 0; g < 4; ++g) {
        CHECK(ps.covariances[g].rank == expect[g]);
        CHECK(ps.covariances[g].truncated_rank == expect[g]);
    }
    CHECK(ps.phi == Approx(0.476565).epsilon(1e-5));
    CHECK(ps.phi == Approx(phi_factor(ps.outer, ps.covariances[0])).epsilon(1e-14));
}

TEST_CASE("infeasible dimensions are rejected")
{
    auto sc = section_v();
    sc.U = 8;
    sc.groups = default_groups(sc.G, std::vector<double>(8, 170.0));
    CHECK_THROWS_AS(prepare(sc), infeasible_error);
    auto cov = build_one_ring_covariance(GroupGeometry{}, 4, 0.5);
    CHECK_THROWS_AS(truncate_rank(cov, 6, 4), infeasible_error);
    GroupGeometry bad;
    bad.radius_m = 200;
    CHECK_THROWS(build_one_ring_covariance(bad, 50, 0.5));
}

TEST_CASE("large-scale fading")
{
    auto l = make_link(170.0, 4e4, 2.5);
    CHECK(l.zeta == Approx(4e4 * std::pow(170.0, -2.5)).epsilon(1e-14));
    CHECK_THROWS(make_link(0.0, 4e4, 2.5));
}

TEST_CASE("fast fading entries are CN(0,1)")
{
    auto cov = build_one_ring_covariance(GroupGeometry{}, 50, 0.5);
    Stream rng(3, 0);
    double p = 0, re2 = 0;
    std::complex<double> mean = 0;
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
        auto s = sample_channel(cov, UserLinkParams{}, rng);
        CHECK(s.g_vv.size() == cov.truncated_rank);
        p += std::norm(s.g_hv(0));
        re2 += s.g_vh(1).real() * s.g_vh(1).real();
        mean += s.g_hh(2);
    }
    CHECK(p / n == Approx(1.0).epsilon(0.03));
    CHECK(re2 / n == Approx(0.5).epsilon(0.03));
    CHECK(std::abs(mean / double(n)) < 0.03);
}

TEST_CASE("CSI error model")
{
    Stream rng(5, 1);
    CVec h(4);
    h << 1.0, std::complex<double>(0, 2), -1.0, 0.5;
    CHECK((apply_csi_error(h, 0.0, rng) - h).norm() == 0.0);
    CHECK_THROWS(apply_csi_error(h, 1.5, rng));
    double cross = 0, pw = 0;
    const int n = 40000;
    CVec one(1);
    one(0) = 1.0;
    for (int t = 0; t < n; ++t) {
        CVec x = CVec::Constant(1, rng.cnormal());
        CVec y = apply_csi_error(x, 0.3, rng);
        cross += (std::conj(x(0)) * y(0)).real();
        pw += std::norm(y(0));
    }
    CHECK(cross / n == Approx(std::sqrt(0.7)).epsilon(0.03));
    CHECK(pw / n == Approx(1.0).epsilon(0.03));
}

TEST_CASE("null space")
{
    Stream rng(9, 0);
    CMat A(6, 2);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 2; ++j)
            A(i, j) = rng.cnormal();
    CMat N = null_space(A, 6);
    CHECK(N.cols() == 4);
    CHECK((N.adjoint() * N - CMat::Identity(4, 4)).norm() < 1e-12);
    CHECK((A.adjoint() * N).norm() < 1e-12);
    CHECK(null_space(CMat(6, 0), 6).cols() == 6);
}

TEST_CASE("outer precoder: semi-unitary, nulls other groups, equal gain")
{
    auto ps = prepare(section_v());
    const auto& F = ps.outer.F;
    CHECK(F.rows() == 50);
    CHECK(F.cols() == 3);
    CHECK((F.adjoint() * F - CMat::Identity(3, 3)).norm() < 1e-12);
    for (int j = 1; j < 4; ++j)
        CHECK((F.adjoint() * ps.covariances[j].U).norm() < 1e-10);
    CHECK(ps.outer.equal_gain);
    const double q = ps.outer.Q(0, 0).real();
    CHECK((ps.outer.Q - q * CMat::Identity(3, 3)).norm() < 1e-9 * q);
    // phi = M_bar / tr{F^H R F} = 6 / (3 q)
    CHECK(ps.phi == Approx(2.0 / q).epsilon(1e-9));
}

TEST_CASE("inner precoders")
{
    Stream rng(13, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<CVec> h(3, CVec(3));
        for (auto& v : h)
            for (int i = 0; i < 3; ++i)
                v(i) = rng.cnormal();
        for (int u = 0; u < 3; ++u) {
            std::vector<CVec> others;
            for (int j = 0; j < 3; ++j)
                if (j != u)
                    others.push_back(h[j]);
            CVec p = build_private_precoder(others, h[u], rng);
            CHECK(p.norm() == Approx(1.0).epsilon(1e-12));
            for (auto& o : others)
                CHECK(std::abs(o.dot(p)) < 1e-12 * o.norm());
        }
        // One interferer in C^3 leaves a plane; the precoder is the projection of h.
        CVec p = build_private_precoder({h[1]}, h[0], rng);
        CVec proj = h[0] - h[1] * (h[1].dot(h[0]) / h[1].squaredNorm());
        CHECK(std::abs(std::abs(proj.normalized().dot(p)) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(build_private_precoder({CVec::Ones(2), CVec::Ones(2)}, CVec::Ones(2), rng),
                    infeasible_error);
    CVec c = build_common_precoder(3, rng);
    CHECK(c.norm() == Approx(1.0).epsilon(1e-14));
}
