#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpmimo/mc.hpp"
#include "dpmimo/schemes.hpp"

#include <algorithm>
#include <cmath>

using namespace dpmimo;
using doctest::Approx;

namespace {

CVec basis(int i, double s = 1.0)
{
    CVec v = CVec::Zero(3);
    v(i) = s;
    return v;
}

// Orthogonal users: vv = hh = 2 e_u, vh = hv = e_u. Uniform common beams, private beams e_u.
struct Toy {
    std::vector<EffectiveChannel> ch;
    InnerPrecoders pre;
    Toy()
    {
        for (int u = 0; u < 3; ++u)
            ch.push_back({basis(u, 2), basis(u), basis(u), basis(u, 2), 1.0});
        pre.common_v = CVec::Constant(3, 1.0 / std::sqrt(3.0));
        pre.common_h = pre.common_v;
        for (int u = 0; u < 3; ++u) {
            pre.private_v.push_back(basis(u));
            pre.private_h.push_back(basis(u));
        }
    }
};

std::vector<EffectiveChannel> random_channels(Stream& rng, int U = 3, int d = 3)
{
    std::vector<EffectiveChannel> out;
    for (int u = 0; u < U; ++u) {
        EffectiveChannel e;
        for (CVec* v : {&e.vv, &e.vh, &e.hv, &e.hh}) {
            v->resize(d);
            for (int i = 0; i < d; ++i)
                (*v)(i) = rng.cnormal();
        }
        e.zeta = 0.5 + u;
        out.push_back(e);
    }
    return out;
}

// Asymptotic Kolmogorov-Smirnov statistic sqrt(n) D against Exp(mean).
double ks_exponential(std::vector<double> x, double mean)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double F = -std::expm1(-x[i] / mean);
        d = std::max({d, F - i / n, (i + 1) / n - F});
    }
    return std::sqrt(n) * d;
}

} // namespace

TEST_CASE("names round-trip")
{
    for (Scheme s : all_schemes())
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK_FALSE(parse_scheme("pmux").has_value());
    CHECK(all_schemes().size() == 10);
    CHECK(is_rsma(Scheme::SP_RSMA));
    CHECK_FALSE(is_rsma(Scheme::SP_NOMA));
    CHECK(is_dual_polarized(Scheme::DP_SDMA_MUX));
    CHECK_FALSE(is_dual_polarized(Scheme::SP_OMA));
    CHECK(has_two_layers(Scheme::SPMUX));
    CHECK_FALSE(has_two_layers(Scheme::PDIV));
}

TEST_CASE("hand-computed SINRs on orthogonal users")
{
    Toy t;
    PowerAllocation pw;
    ImpairmentParams imp{0.1, 0.0, 0.0};
    const double s2 = 0.1;

    auto pm = sinr_pmux(t.ch, t.pre, pw, imp, s2);
    // common: 0.5*4/3*0.7 / (0.1*0.5*0.1 + 0.1)
    CHECK(pm.common[0] == Approx((2.0 / 3) * 0.7 / 0.105).epsilon(1e-12));
    // private: 0.5*4*0.1 / (0.1*0.5/3*0.7 + 0.1)
    CHECK(pm.priv[1] == Approx(0.2 / (0.1 * 0.7 / 6 + 0.1)).epsilon(1e-12));

    auto pd = sinr_pdiv(t.ch, t.pre, pw, imp, s2);
    // Both branches carry 2/3 + 0.1/6 of common power; private own 2*0.1, cross leak 0.05.
    const double cv = (2.0 / 3 + 0.1 / 6) * 0.7;
    CHECK(pd.common[2] == Approx(cv / (0.2 + 0.1 * 0.05 + 0.1)).epsilon(1e-12));
    CHECK(pd.priv[0] == Approx((2.0 + 0.05) * 0.1 / 0.1).epsilon(1e-12));

    auto sp = sinr_spmux(t.ch, t.pre, pw, imp, s2);
    const double leak = 0.1 * (0.7 / 6 + 0.05);
    CHECK(sp.common[0] == Approx((2.0 / 3) * 0.7 / (0.2 + leak + 0.1)).epsilon(1e-12));
    CHECK(sp.priv_h[0] == Approx(0.2 / (leak + 0.1)).epsilon(1e-12));

    auto oma = sinr_baseline(Scheme::SP_OMA, t.ch, t.pre, pw, imp, s2);
    CHECK(oma.priv[0] == Approx(40.0));
    auto sdma = sinr_baseline(Scheme::SP_SDMA, t.ch, t.pre, pw, imp, s2);
    CHECK(sdma.priv[0] == Approx(4.0 / 3 / 0.1));
    auto noma = sinr_baseline(Scheme::SP_NOMA, t.ch, t.pre, pw, imp, s2);
    const double g = 4.0 / 3;
    CHECK(noma.priv[0] == Approx(g * 5 / 8 / (g * 3 / 8 + 0.1)));
    CHECK(noma.priv[2] == Approx(g / 8 / 0.1));
}

TEST_CASE("NOMA residual SIC error hits only the cancelled layers")
{
    Toy t;
    PowerAllocation pw;
    ImpairmentParams imp{0.0, 0.2, 0.0};
    auto o = sinr_baseline(Scheme::SP_NOMA, t.ch, t.pre, pw, imp, 0.1);
    const double g = 4.0 / 3;
    CHECK(o.priv[0] == Approx(g * 5 / 8 / (g * 3 / 8 + 0.1)));
    CHECK(o.priv[1] == Approx(g * 2 / 8 / (g / 8 + 0.2 * g * 5 / 8 + 0.1)));
    CHECK(o.priv[2] == Approx(g / 8 / (0.2 * g * 7 / 8 + 0.1)));
}

TEST_CASE("reductions")
{
    Stream rng(21, 0);
    PowerAllocation pw;
    for (int t = 0; t < 20; ++t) {
        auto ch = random_channels(rng);
        auto pre = build_inner_precoders(ch, rng);
        ImpairmentParams ideal{0.0, 0.0, 0.0};
        // Without cross-polar leakage each SPMUX layer is single-polarized RSMA at half power.
        auto sp = sinr_spmux(ch, pre, pw, ideal, 0.05);
        auto sr = sinr_baseline(Scheme::SP_RSMA, ch, pre, pw, ideal, 0.1);
        for (int u = 0; u < 3; ++u) {
            CHECK(sp.common[u] == Approx(sr.common[u]).epsilon(1e-12));
            CHECK(sp.priv[u] == Approx(sr.priv[u]).epsilon(1e-12));
        }
        // PMUX at chi = 0 is interference-free.
        auto pm = sinr_pmux(ch, pre, pw, ideal, 0.1);
        for (int u = 0; u < 3; ++u) {
            double gc = 0.5 * std::norm(ch[u].vv.dot(pre.common_v));
            CHECK(pm.common[u] == Approx(ch[u].zeta * gc * 0.7 / 0.1).epsilon(1e-12));
        }
        // Zero-forcing private beams: DP-SDMA-mux at chi = 0 has no inter-user term.
        auto dm = sinr_baseline(Scheme::DP_SDMA_MUX, ch, pre, pw, ideal, 0.1);
        auto dm2 = sinr_baseline(Scheme::DP_SDMA_MUX, ch, pre, pw, {0.3, 0, 0}, 0.1);
        for (int u = 0; u < 3; ++u)
            CHECK(dm2.priv[u] <= dm.priv[u]);
        // DP-SDMA-div is PDIV's private stream with the common power removed.
        PowerAllocation sd = pw;
        sd.alpha = 0.0;
        sd.beta = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        ImpairmentParams imp{0.01, 0.0, 0.0};
        auto pd = sinr_pdiv(ch, pre, sd, imp, 0.1);
        auto ds = sinr_baseline(Scheme::DP_SDMA_DIV, ch, pre, pw, imp, 0.1);
        for (int u = 0; u < 3; ++u)
            CHECK(ds.priv[u] == Approx(pd.priv[u]).epsilon(1e-12));
    }
}

TEST_CASE("monotone in chi, xi and noise")
{
    Stream rng(22, 0);
    PowerAllocation pw;
    for (int t = 0; t < 20; ++t) {
        auto ch = random_channels(rng);
        auto pre = build_inner_precoders(ch, rng);
        for (Scheme s : {Scheme::PMUX, Scheme::SPMUX}) {
            auto lo = sinr(s, ch, pre, pw, {0.001, 0.0, 0.0}, 0.1);
            auto hi = sinr(s, ch, pre, pw, {0.1, 0.0, 0.0}, 0.1);
            for (int u = 0; u < 3; ++u) {
                CHECK(hi.common[u] <= lo.common[u]);
                CHECK(hi.priv[u] <= lo.priv[u]);
            }
        }
        for (Scheme s : {Scheme::PDIV, Scheme::SPMUX, Scheme::SP_RSMA}) {
            auto lo = sinr(s, ch, pre, pw, {0.001, 0.0, 0.0}, 0.1);
            auto hi = sinr(s, ch, pre, pw, {0.001, 0.05, 0.0}, 0.1);
            auto quiet = sinr(s, ch, pre, pw, {0.001, 0.05, 0.0}, 0.01);
            for (int u = 0; u < 3; ++u) {
                CHECK(hi.priv[u] <= lo.priv[u]);
                CHECK(hi.common[u] == lo.common[u]);
                CHECK(quiet.priv[u] >= hi.priv[u]);
            }
        }
    }
}

TEST_CASE("PDIV is invariant under swapping the polarizations")
{
    Stream rng(23, 0);
    PowerAllocation pw;
    for (int t = 0; t < 20; ++t) {
        auto ch = random_channels(rng);
        auto pre = build_inner_precoders(ch, rng);
        auto sw = ch;
        for (auto& e : sw) {
            std::swap(e.vv, e.hh);
            std::swap(e.vh, e.hv);
        }
        InnerPrecoders ps = pre;
        std::swap(ps.common_v, ps.common_h);
        std::swap(ps.private_v, ps.private_h);
        ImpairmentParams imp{0.05, 0.02, 0.0};
        auto a = sinr_pdiv(ch, pre, pw, imp, 0.1);
        auto b = sinr_pdiv(sw, ps, pw, imp, 0.1);
        for (int u = 0; u < 3; ++u) {
            CHECK(a.common[u] == Approx(b.common[u]).epsilon(1e-12));
            CHECK(a.priv[u] == Approx(b.priv[u]).epsilon(1e-12));
        }
    }
}

TEST_CASE("scenario branch gains are exponential with mean zeta/phi")
{
    Scenario sc;
    sc.groups = default_groups(sc.G, {200.0, 170.0, 140.0});
    auto ps = prepare(sc);
    Stream rng(31, 0);
    const int n = 20000;
    std::vector<double> gc, gp;
    const auto& cov = ps.covariances[0];
    for (int t = 0; t < n; ++t) {
        std::vector<EffectiveChannel> ch;
        for (double z : ps.zeta)
            ch.push_back(effective_channel(ps.A, sample_channel(cov, {z, 4e4, 2.5}, rng)));
        auto pre = build_inner_precoders(ch, rng);
        gc.push_back(kBranchShare * std::norm(ch[0].vv.dot(pre.common_v)));
        gp.push_back(kBranchShare * std::norm(ch[1].hh.dot(pre.private_h[1])));
    }
    // 1% critical value of the Kolmogorov distribution.
    CHECK(ks_exponential(gc, 1.0 / ps.phi) < 1.63);
    CHECK(ks_exponential(gp, 1.0 / ps.phi) < 1.63);
}

TEST_CASE("size mismatches are rejected")
{
    Toy t;
    auto pre = t.pre;
    pre.private_v.pop_back();
    CHECK_THROWS(sinr_pmux(t.ch, pre, PowerAllocation{}, {}, 0.1));
    CHECK_THROWS(sinr_baseline(Scheme::PMUX, t.ch, t.pre, PowerAllocation{}, {}, 0.1));
    PowerAllocation pw;
    pw.noma = {0.5, 0.5};
    CHECK_THROWS(sinr_baseline(Scheme::SP_NOMA, t.ch, t.pre, pw, {}, 0.1));
}
