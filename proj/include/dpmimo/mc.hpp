#pragma once

#include "dpmimo/estimate.hpp"
#include "dpmimo/schemes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpmimo {

struct Scenario {
    int M = 100;
    int G = 4;
    int U = 3;
    int M_bar = 6;
    double spacing_wavelengths = 0.5;
    double rank_rel_threshold = 1e-2;
    double delta = 4e4;
    double eta = 2.5;
    std::vector<GroupGeometry> groups; // G entries
    int group = 0;                     // group under study
};

// Default geometry: azimuths 30 + 160 g degrees, group 0 carries the users.
std::vector<GroupGeometry> default_groups(int G, const std::vector<double>& user_distances_m);

struct PreparedScenario {
    std::vector<CovarianceModel> covariances;
    OuterPrecoder outer;
    CMat A; // F^H U Lambda^{1/2}: maps reduced fading to the effective channel
    std::vector<double> zeta;
    double phi = 1.0;
};

PreparedScenario prepare(const Scenario& sc);

struct SweepPoint {
    double snr_db = 0.0;
    double chi = 0.0;
    double xi = 0.0;
    double csi_error = 0.0;
};

struct RateSet {
    double common = 0.5;
    std::vector<double> priv{0.1, 1.0, 2.0};
};

struct TrialPlan {
    std::uint64_t seed = 1;
    std::int64_t n_trials = 1000;
    int workers = 1;
};

struct McRequest {
    std::vector<Scheme> schemes;
    std::vector<SweepPoint> points;
    std::vector<RateSet> rate_sets;
    PowerAllocation power;
    bool outage = true;
    bool ergodic = false;
};

struct McRow {
    std::string scheme; // label, with "-V"/"-H" and "#set<k>" suffixes
    std::string user;   // "1".."U", "sum", "min"
    SweepPoint point;
    MetricEstimate est;
};

// Scheme column label: per-layer outage rows of two-layer schemes get
// "-V"/"-H", and "#set<k>" marks the rate set when there are several.
std::string scheme_label(Scheme s, int layer, bool per_layer, int rate_set, int n_sets);

// Trial t draws from Philox streams keyed by (seed, t) only, and trials
// are reduced in fixed blocks in block order, so the rows are the same
// for any worker count.
std::vector<McRow> run_mc(const PreparedScenario& ps, const McRequest& req, const TrialPlan& plan);

// Single-scheme conveniences over run_mc.
std::vector<McRow> estimate_outage(const PreparedScenario& ps, Scheme s, const SweepPoint& pt,
                                   const RateSet& rates, const PowerAllocation& pw,
                                   const TrialPlan& plan);
std::vector<McRow> estimate_ergodic(const PreparedScenario& ps, Scheme s, const SweepPoint& pt,
                                    const PowerAllocation& pw, const TrialPlan& plan);
MetricEstimate estimate_outage_sum_rate(const PreparedScenario& ps, Scheme s,
                                        const SweepPoint& pt, const RateSet& rates,
                                        const PowerAllocation& pw, const TrialPlan& plan);

} // namespace dpmimo
