#include "dpmimo/schemes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace dpmimo {

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 10> kNames{{
    {Scheme::PMUX, "PMUX"},
    {Scheme::PDIV, "PDIV"},
    {Scheme::SPMUX, "SPMUX"},
    {Scheme::SP_OMA, "SP-OMA"},
    {Scheme::SP_SDMA, "SP-SDMA"},
    {Scheme::SP_RSMA, "SP-RSMA"},
    {Scheme::SP_NOMA, "SP-NOMA"},
    {Scheme::DP_NOMA_DIV, "DP-NOMA-div"},
    {Scheme::DP_SDMA_DIV, "DP-SDMA-div"},
    {Scheme::DP_SDMA_MUX, "DP-SDMA-mux"},
}};

// Branch gain |x^H y|^2 scaled by the branch power share.
inline double bg(const CVec& x, const CVec& y, double share)
{
    return share * std::norm(x.dot(y));
}

void check(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre)
{
    if (ch.empty() || pre.private_v.size() != ch.size() || pre.private_h.size() != ch.size())
        throw std::invalid_argument("sinr: precoder/channel user count mismatch");
    const auto d = pre.common_v.size();
    for (const auto& e : ch)
        if (e.vv.size() != d || e.hh.size() != d || e.vh.size() != d || e.hv.size() != d)
            throw std::invalid_argument("sinr: dimension mismatch");
}

} // namespace

std::string_view scheme_name(Scheme s)
{
    for (auto& [k, n] : kNames)
        if (k == s)
            return n;
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (auto& [k, n] : kNames)
        if (n == name)
            return k;
    return std::nullopt;
}

const std::vector<Scheme>& all_schemes()
{
    static const std::vector<Scheme> v = [] {
        std::vector<Scheme> out;
        for (auto& [k, n] : kNames)
            out.push_back(k);
        return out;
    }();
    return v;
}

bool is_rsma(Scheme s)
{
    return s == Scheme::PMUX || s == Scheme::PDIV || s == Scheme::SPMUX || s == Scheme::SP_RSMA;
}

bool is_dual_polarized(Scheme s)
{
    return s == Scheme::PMUX || s == Scheme::PDIV || s == Scheme::SPMUX ||
           s == Scheme::DP_NOMA_DIV || s == Scheme::DP_SDMA_DIV || s == Scheme::DP_SDMA_MUX;
}

bool has_two_layers(Scheme s)
{
    return s == Scheme::SPMUX || s == Scheme::DP_SDMA_MUX;
}

EffectiveChannel effective_channel(const CMat& A, const DualPolChannelSample& s)
{
    return {A * s.g_vv, A * s.g_vh, A * s.g_hv, A * s.g_hh, s.zeta};
}

InnerPrecoders build_inner_precoders(const std::vector<EffectiveChannel>& design, Stream& rng)
{
    const int U = static_cast<int>(design.size());
    const int dim = static_cast<int>(design.front().vv.size());
    InnerPrecoders p;
    p.common_v = build_common_precoder(dim, rng);
    p.common_h = build_common_precoder(dim, rng);
    std::vector<CVec> ov, oh;
    for (int u = 0; u < U; ++u) {
        ov.clear();
        oh.clear();
        for (int j = 0; j < U; ++j) {
            if (j == u)
                continue;
            ov.push_back(design[j].vv);
            oh.push_back(design[j].hh);
        }
        p.private_v.push_back(build_private_precoder(ov, design[u].vv, rng));
        p.private_h.push_back(build_private_precoder(oh, design[u].hh, rng));
    }
    return p;
}

SinrOutcome sinr_pmux(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                      const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var)
{
    check(ch, pre);
    const int U = static_cast<int>(ch.size());
    const double k = kBranchShare, a = pw.alpha, chi = imp.chi;
    SinrOutcome o{Scheme::PMUX, {}, {}, {}, {}};
    for (int u = 0; u < U; ++u) {
        const auto& e = ch[u];
        const double z = e.zeta;
        double leak = 0.0;
        for (int n = 0; n < U; ++n)
            leak += bg(e.hv, pre.private_h[n], k) * pw.beta[n];
        o.common.push_back(z * bg(e.vv, pre.common_v, k) * a / (z * chi * leak + noise_var));
        o.priv.push_back(z * bg(e.hh, pre.private_h[u], k) * pw.beta[u] /
                         (z * chi * bg(e.vh, pre.common_v, k) * a + noise_var));
    }
    return o;
}

SinrOutcome sinr_pdiv(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                      const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var)
{
    check(ch, pre);
    const int U = static_cast<int>(ch.size());
    const double k = kBranchShare, a = pw.alpha, chi = imp.chi, xi = imp.xi;
    SinrOutcome o{Scheme::PDIV, {}, {}, {}, {}};
    for (int u = 0; u < U; ++u) {
        const auto& e = ch[u];
        const double z = e.zeta, b = pw.beta[u];
        double cv = z * (bg(e.vv, pre.common_v, k) + chi * bg(e.hv, pre.common_h, k)) * a;
        double chh = z * (bg(e.hh, pre.common_h, k) + chi * bg(e.vh, pre.common_v, k)) * a;
        double xv_all = 0.0, xh_all = 0.0, xv_oth = 0.0, xh_oth = 0.0;
        for (int n = 0; n < U; ++n) {
            double lv = bg(e.hv, pre.private_h[n], k) * pw.beta[n];
            double lh = bg(e.vh, pre.private_v[n], k) * pw.beta[n];
            xv_all += lv;
            xh_all += lh;
            if (n != u) {
                xv_oth += lv;
                xh_oth += lh;
            }
        }
        bool common_v = cv >= chh;
        double wc = common_v ? z * (bg(e.vv, pre.private_v[u], k) * b + chi * xv_all)
                             : z * (bg(e.hh, pre.private_h[u], k) * b + chi * xh_all);
        o.common.push_back(std::max(cv, chh) / (wc + noise_var));

        double pv = z * (bg(e.vv, pre.private_v[u], k) + chi * bg(e.hv, pre.private_h[u], k)) * b;
        double ph = z * (bg(e.hh, pre.private_h[u], k) + chi * bg(e.vh, pre.private_v[u], k)) * b;
        bool priv_v = pv >= ph;
        double wp = priv_v ? xi * cv + z * chi * xv_oth : xi * chh + z * chi * xh_oth;
        o.priv.push_back(std::max(pv, ph) / (wp + noise_var));
    }
    return o;
}

SinrOutcome sinr_spmux(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                       const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var)
{
    check(ch, pre);
    const int U = static_cast<int>(ch.size());
    const double k = kBranchShare, a = pw.alpha, chi = imp.chi, xi = imp.xi;
    SinrOutcome o{Scheme::SPMUX, {}, {}, {}, {}};
    for (int pol = 0; pol < 2; ++pol) {
        const bool v = pol == 0;
        const CVec& ci = v ? pre.common_v : pre.common_h;
        const CVec& cj = v ? pre.common_h : pre.common_v;
        const auto& pi = v ? pre.private_v : pre.private_h;
        const auto& pj = v ? pre.private_h : pre.private_v;
        auto& oc = v ? o.common : o.common_h;
        auto& op = v ? o.priv : o.priv_h;
        for (int u = 0; u < U; ++u) {
            const auto& e = ch[u];
            const CVec& hii = v ? e.vv : e.hh;
            const CVec& hji = v ? e.hv : e.vh;
            const double z = e.zeta, b = pw.beta[u];
            double rc = z * bg(hii, ci, k) * a;
            double rp = z * bg(hii, pi[u], k) * b;
            double leak = bg(hji, cj, k) * a;
            for (int n = 0; n < U; ++n)
                leak += bg(hji, pj[n], k) * pw.beta[n];
            leak *= z * chi;
            oc.push_back(rc / (rp + leak + noise_var));
            op.push_back(rp / (xi * rc + leak + noise_var));
        }
    }
    return o;
}

SinrOutcome sinr_baseline(Scheme kind, const std::vector<EffectiveChannel>& ch,
                          const InnerPrecoders& pre, const PowerAllocation& pw,
                          const ImpairmentParams& imp, double noise_var)
{
    check(ch, pre);
    const int U = static_cast<int>(ch.size());
    const double chi = imp.chi, xi = imp.xi, k = kBranchShare;
    const double sdma = 1.0 / U;
    SinrOutcome o{kind, {}, {}, {}, {}};

    auto noma = [&](auto gain) {
        if (static_cast<int>(pw.noma.size()) != U)
            throw std::invalid_argument("NOMA power list must have one entry per user");
        for (int u = 0; u < U; ++u) {
            double g = gain(u);
            double later = 0.0, earlier = 0.0;
            for (int j = 0; j < U; ++j)
                (j < u ? earlier : later) += j == u ? 0.0 : pw.noma[j];
            o.priv.push_back(g * pw.noma[u] / (g * later + xi * g * earlier + noise_var));
        }
    };

    switch (kind) {
    case Scheme::SP_OMA:
        // One user per slot, matched beam, full power.
        for (int u = 0; u < U; ++u)
            o.priv.push_back(ch[u].zeta * ch[u].vv.squaredNorm() / noise_var);
        break;
    case Scheme::SP_SDMA:
        for (int u = 0; u < U; ++u)
            o.priv.push_back(ch[u].zeta * bg(ch[u].vv, pre.private_v[u], 1.0) * sdma / noise_var);
        break;
    case Scheme::SP_RSMA:
        for (int u = 0; u < U; ++u) {
            const auto& e = ch[u];
            double rc = e.zeta * bg(e.vv, pre.common_v, 1.0) * pw.alpha;
            double rp = e.zeta * bg(e.vv, pre.private_v[u], 1.0) * pw.beta[u];
            o.common.push_back(rc / (rp + noise_var));
            o.priv.push_back(rp / (xi * rc + noise_var));
        }
        break;
    case Scheme::SP_NOMA:
        noma([&](int u) { return ch[u].zeta * bg(ch[u].vv, pre.common_v, 1.0); });
        break;
    case Scheme::DP_NOMA_DIV:
        noma([&](int u) {
            const auto& e = ch[u];
            double gv = bg(e.vv, pre.common_v, k) + chi * bg(e.hv, pre.common_h, k);
            double gh = bg(e.hh, pre.common_h, k) + chi * bg(e.vh, pre.common_v, k);
            return e.zeta * std::max(gv, gh);
        });
        break;
    case Scheme::DP_SDMA_DIV:
        for (int u = 0; u < U; ++u) {
            const auto& e = ch[u];
            double pv = bg(e.vv, pre.private_v[u], k) + chi * bg(e.hv, pre.private_h[u], k);
            double ph = bg(e.hh, pre.private_h[u], k) + chi * bg(e.vh, pre.private_v[u], k);
            double xv = 0.0, xh = 0.0;
            for (int n = 0; n < U; ++n) {
                if (n == u)
                    continue;
                xv += bg(e.hv, pre.private_h[n], k);
                xh += bg(e.vh, pre.private_v[n], k);
            }
            double w = pv >= ph ? xv : xh;
            o.priv.push_back(e.zeta * std::max(pv, ph) * sdma /
                             (e.zeta * chi * w * sdma + noise_var));
        }
        break;
    case Scheme::DP_SDMA_MUX:
        for (int pol = 0; pol < 2; ++pol) {
            const bool v = pol == 0;
            auto& out = v ? o.priv : o.priv_h;
            for (int u = 0; u < U; ++u) {
                const auto& e = ch[u];
                const CVec& hii = v ? e.vv : e.hh;
                const CVec& hji = v ? e.hv : e.vh;
                const auto& pi = v ? pre.private_v : pre.private_h;
                const auto& pj = v ? pre.private_h : pre.private_v;
                double leak = 0.0;
                for (int n = 0; n < U; ++n)
                    leak += bg(hji, pj[n], k);
                out.push_back(e.zeta * bg(hii, pi[u], k) * sdma /
                              (e.zeta * chi * leak * sdma + noise_var));
            }
        }
        break;
    default:
        throw std::invalid_argument("sinr_baseline: not a baseline scheme");
    }
    return o;
}

SinrOutcome sinr(Scheme s, const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                 const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var)
{
    switch (s) {
    case Scheme::PMUX:
        return sinr_pmux(ch, pre, pw, imp, noise_var);
    case Scheme::PDIV:
        return sinr_pdiv(ch, pre, pw, imp, noise_var);
    case Scheme::SPMUX:
        return sinr_spmux(ch, pre, pw, imp, noise_var);
    default:
        return sinr_baseline(s, ch, pre, pw, imp, noise_var);
    }
}

} // namespace dpmimo
