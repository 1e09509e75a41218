#pragma once

#include "dpmimo/precoder.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpmimo {

enum class Scheme {
    PMUX,
    PDIV,
    SPMUX,
    SP_OMA,
    SP_SDMA,
    SP_RSMA,
    SP_NOMA,
    DP_NOMA_DIV,
    DP_SDMA_DIV,
    DP_SDMA_MUX,
};

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
const std::vector<Scheme>& all_schemes();
bool is_rsma(Scheme s);
bool is_dual_polarized(Scheme s);
// Two independent stream pairs per user (SPMUX, DP-SDMA-mux).
bool has_two_layers(Scheme s);

struct PowerAllocation {
    double alpha = 0.7;
    std::vector<double> beta{0.1, 0.1, 0.1};
    std::vector<double> noma{5.0 / 8, 2.0 / 8, 1.0 / 8};
};

struct ImpairmentParams {
    double chi = 0.0;
    double xi = 0.0;
    double csi_error = 0.0;
};

// F^H h^{ij} for one user (M_bar/2 each), no zeta or chi applied.
struct EffectiveChannel {
    CVec vv, vh, hv, hh;
    double zeta = 1.0;
};

EffectiveChannel effective_channel(const CMat& A, const DualPolChannelSample& s);

// Per-user SINRs. RSMA schemes fill common/priv; SPMUX and DP-SDMA-mux
// put the horizontal-polarization stream in common_h/priv_h. Non-RSMA
// baselines leave common empty and report their single stream in priv.
struct SinrOutcome {
    Scheme scheme = Scheme::PMUX;
    std::vector<double> common, priv;
    std::vector<double> common_h, priv_h;
};

// Inner precoders designed from (possibly CSI-perturbed) effective channels.
InnerPrecoders build_inner_precoders(const std::vector<EffectiveChannel>& design, Stream& rng);

// Fraction of the group's power a single polarization branch carries.
inline constexpr double kBranchShare = 0.5;

SinrOutcome sinr_pmux(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                      const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var);
SinrOutcome sinr_pdiv(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                      const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var);
SinrOutcome sinr_spmux(const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                       const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var);
SinrOutcome sinr_baseline(Scheme kind, const std::vector<EffectiveChannel>& ch,
                          const InnerPrecoders& pre, const PowerAllocation& pw,
                          const ImpairmentParams& imp, double noise_var);

SinrOutcome sinr(Scheme s, const std::vector<EffectiveChannel>& ch, const InnerPrecoders& pre,
                 const PowerAllocation& pw, const ImpairmentParams& imp, double noise_var);

} // namespace dpmimo
