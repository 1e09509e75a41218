#include "dpmimo/mc.hpp"
#include "dpmimo/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dpmimo {

namespace {

constexpr std::int64_t kBlock = 250;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Key of the precoder-design stream for one CSI error level.
std::uint64_t design_key(std::uint64_t seed, double eps)
{
    return splitmix64(seed ^ splitmix64(std::bit_cast<std::uint64_t>(eps) + 0x5851F42D4C957F2DULL));
}

struct Welford {
    double n = 0, mean = 0, m2 = 0;

    void add(double x)
    {
        n += 1;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }

    void merge(const Welford& o)
    {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        double tot = n + o.n;
        double d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }

    double se() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

enum Slot { kCommon = 0, kPrivate = 1, kTotal = 2 };

struct Layout {
    int U = 0, R = 0;
    std::vector<int> layers; // per scheme
    std::size_t n_points = 0;

    std::size_t cell(std::size_t s, std::size_t k) const { return s * n_points + k; }
    std::size_t count_index(int rs, int layer, int u, int slot) const
    {
        return ((static_cast<std::size_t>(rs) * 2 + layer) * U + u) * 3 + slot;
    }
    std::size_t count_size() const { return static_cast<std::size_t>(R) * 2 * U * 3; }
};

struct Cell {
    std::vector<std::int64_t> counts;
    std::vector<Welford> sum_rate; // per rate set
    Welford erg[3];                // common, private, sum

    void merge(const Cell& o)
    {
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] += o.counts[i];
        for (std::size_t i = 0; i < sum_rate.size(); ++i)
            sum_rate[i].merge(o.sum_rate[i]);
        for (int i = 0; i < 3; ++i)
            erg[i].merge(o.erg[i]);
    }
};

using Acc = std::vector<Cell>;

Acc make_acc(const Layout& L, std::size_t n_schemes)
{
    Cell c;
    c.counts.assign(L.count_size(), 0);
    c.sum_rate.assign(L.R, {});
    return Acc(n_schemes * L.n_points, c);
}

double log2p1(double g) { return std::log2(1.0 + g); }

void accumulate(Cell& cell, const Layout& L, Scheme s, const SinrOutcome& o, const McRequest& req)
{
    const int U = L.U;
    const int layers = has_two_layers(s) ? 2 : 1;
    if (is_rsma(s)) {
        if (req.outage) {
            for (int rs = 0; rs < L.R; ++rs) {
                const RateSet& r = req.rate_sets[rs];
                const double tc = tau_from_rate(r.common);
                double sr = 0.0;
                for (int l = 0; l < layers; ++l) {
                    const auto& c = l == 0 ? o.common : o.common_h;
                    const auto& p = l == 0 ? o.priv : o.priv_h;
                    for (int u = 0; u < U; ++u) {
                        bool oc = c[u] < tc;
                        bool op = p[u] < tau_from_rate(r.priv[u]);
                        cell.counts[L.count_index(rs, l, u, kCommon)] += oc;
                        cell.counts[L.count_index(rs, l, u, kPrivate)] += op;
                        cell.counts[L.count_index(rs, l, u, kTotal)] += oc || op;
                        sr += (oc ? 0.0 : r.common) + (op ? 0.0 : r.priv[u]);
                    }
                }
                cell.sum_rate[rs].add(sr);
            }
        }
        if (req.ergodic) {
            double ec = 0.0, ep = 0.0;
            for (int l = 0; l < layers; ++l) {
                const auto& c = l == 0 ? o.common : o.common_h;
                const auto& p = l == 0 ? o.priv : o.priv_h;
                ec += U * log2p1(*std::min_element(c.begin(), c.end()));
                for (double g : p)
                    ep += log2p1(g);
            }
            cell.erg[0].add(ec);
            cell.erg[1].add(ep);
            cell.erg[2].add(ec + ep);
        }
        return;
    }
    // Single-stream baselines; OMA time-shares the slot among U users.
    const double share = s == Scheme::SP_OMA ? 1.0 / U : 1.0;
    if (req.outage) {
        for (int rs = 0; rs < L.R; ++rs) {
            const RateSet& r = req.rate_sets[rs];
            double sr = 0.0;
            for (int l = 0; l < layers; ++l) {
                const auto& p = l == 0 ? o.priv : o.priv_h;
                for (int u = 0; u < U; ++u) {
                    const double target = r.common + r.priv[u];
                    bool out = share * log2p1(p[u]) < target;
                    cell.counts[L.count_index(rs, l, u, kTotal)] += out;
                    sr += out ? 0.0 : target;
                }
            }
            cell.sum_rate[rs].add(sr);
        }
    }
    if (req.ergodic) {
        double ep = 0.0;
        for (int l = 0; l < layers; ++l)
            for (double g : (l == 0 ? o.priv : o.priv_h))
                ep += share * log2p1(g);
        cell.erg[1].add(ep);
        cell.erg[2].add(ep);
    }
}

void run_trial(std::int64_t t, const PreparedScenario& ps, const McRequest& req,
               const std::vector<double>& eps_levels, const std::vector<int>& eps_index,
               const Layout& L, std::uint64_t seed, Acc& acc)
{
    const int U = L.U;
    const CovarianceModel& cov = ps.covariances.at(ps.outer.group);
    Stream chan(seed, static_cast<std::uint64_t>(t));
    std::vector<EffectiveChannel> eff;
    eff.reserve(U);
    for (int u = 0; u < U; ++u) {
        UserLinkParams link;
        link.zeta = ps.zeta[u];
        eff.push_back(effective_channel(ps.A, sample_channel(cov, link, chan)));
    }
    std::vector<InnerPrecoders> pre;
    pre.reserve(eps_levels.size());
    for (double eps : eps_levels) {
        Stream design_rng(design_key(seed, eps), static_cast<std::uint64_t>(t));
        if (eps == 0.0) {
            pre.push_back(build_inner_precoders(eff, design_rng));
            continue;
        }
        std::vector<EffectiveChannel> est = eff;
        for (auto& e : est) {
            e.vv = apply_csi_error(e.vv, eps, design_rng);
            e.hh = apply_csi_error(e.hh, eps, design_rng);
        }
        pre.push_back(build_inner_precoders(est, design_rng));
    }
    for (std::size_t k = 0; k < req.points.size(); ++k) {
        const SweepPoint& pt = req.points[k];
        const double noise = std::pow(10.0, -pt.snr_db / 10.0);
        const ImpairmentParams imp{pt.chi, pt.xi, pt.csi_error};
        const InnerPrecoders& p = pre[eps_index[k]];
        for (std::size_t s = 0; s < req.schemes.size(); ++s) {
            SinrOutcome o = sinr(req.schemes[s], eff, p, req.power, imp, noise);
            accumulate(acc[L.cell(s, k)], L, req.schemes[s], o, req);
        }
    }
}

} // namespace

std::string scheme_label(Scheme s, int layer, bool per_layer, int rs, int n_sets)
{
    std::string out(scheme_name(s));
    if (per_layer && has_two_layers(s))
        out += layer == 0 ? "-V" : "-H";
    if (n_sets > 1)
        out += "#set" + std::to_string(rs + 1);
    return out;
}

namespace {

void validate(const PreparedScenario& ps, const McRequest& req, const TrialPlan& plan)
{
    const int U = static_cast<int>(ps.zeta.size());
    if (plan.n_trials < 1)
        throw std::invalid_argument("mc: n_trials must be >= 1");
    if (static_cast<int>(req.power.beta.size()) != U)
        throw std::invalid_argument("mc: one private power per user required");
    if (req.outage && req.rate_sets.empty())
        throw std::invalid_argument("mc: outage requested without rate sets");
    for (auto& r : req.rate_sets)
        if (static_cast<int>(r.priv.size()) != U)
            throw std::invalid_argument("mc: one private rate per user required");
    for (auto& p : req.points) {
        if (p.chi < 0 || p.chi > 1 || p.xi < 0 || p.csi_error < 0 || p.csi_error > 1)
            throw std::invalid_argument("mc: chi, csi_error in [0,1] and xi >= 0 required");
    }
}

} // namespace

std::vector<GroupGeometry> default_groups(int G, const std::vector<double>& user_distances_m)
{
    std::vector<GroupGeometry> out(G);
    for (int g = 0; g < G; ++g) {
        out[g].azimuth_deg = 30.0 + 160.0 * g;
        out[g].user_distances_m = user_distances_m;
    }
    return out;
}

PreparedScenario prepare(const Scenario& sc)
{
    if (sc.M % 2 != 0 || sc.M_bar % 2 != 0)
        throw infeasible_error("M and M_bar must be even");
    if (static_cast<int>(sc.groups.size()) != sc.G)
        throw infeasible_error("one geometry per group required");
    if (sc.group < 0 || sc.group >= sc.G)
        throw infeasible_error("group index out of range");
    const auto& users = sc.groups[sc.group].user_distances_m;
    if (static_cast<int>(users.size()) != sc.U)
        throw infeasible_error("one user distance per user required");
    if (sc.M_bar / 2 <= sc.U - 1)
        throw infeasible_error("M_bar/2 > U - 1 violated");

    PreparedScenario ps;
    for (const auto& geo : sc.groups) {
        auto cov = build_one_ring_covariance(geo, sc.M / 2, sc.spacing_wavelengths,
                                             sc.rank_rel_threshold);
        ps.covariances.push_back(truncate_rank(cov, sc.M_bar, sc.G));
    }
    ps.outer = build_outer_precoder(ps.covariances, sc.group, sc.M_bar);
    const auto& cov = ps.covariances[sc.group];
    ps.A = ps.outer.F.adjoint() * cov.U * cov.lambda.cwiseSqrt().asDiagonal();
    for (double d : users)
        ps.zeta.push_back(make_link(d, sc.delta, sc.eta).zeta);
    ps.phi = phi_factor(ps.outer, cov);
    return ps;
}

std::vector<McRow> run_mc(const PreparedScenario& ps, const McRequest& req, const TrialPlan& plan)
{
    validate(ps, req, plan);
    Layout L;
    L.U = static_cast<int>(ps.zeta.size());
    L.R = req.outage ? static_cast<int>(req.rate_sets.size()) : 0;
    L.n_points = req.points.size();

    std::vector<double> eps_levels;
    std::vector<int> eps_index;
    for (auto& p : req.points) {
        auto it = std::find(eps_levels.begin(), eps_levels.end(), p.csi_error);
        if (it == eps_levels.end()) {
            eps_levels.push_back(p.csi_error);
            it = eps_levels.end() - 1;
        }
        eps_index.push_back(static_cast<int>(it - eps_levels.begin()));
    }

    const std::size_t n_schemes = req.schemes.size();
    const std::int64_t n_blocks = (plan.n_trials + kBlock - 1) / kBlock;
    const int workers = std::max(1, plan.workers);
    const std::int64_t wave = std::max<std::int64_t>(1, 4 * workers);

    Acc total = make_acc(L, n_schemes);
    for (std::int64_t first = 0; first < n_blocks; first += wave) {
        const std::int64_t last = std::min(n_blocks, first + wave);
        std::vector<Acc> blocks(last - first);
        std::atomic<std::int64_t> next{first};
        std::exception_ptr err;
        std::mutex err_mu;
        auto work = [&] {
            try {
                for (std::int64_t b; (b = next.fetch_add(1)) < last;) {
                    Acc acc = make_acc(L, n_schemes);
                    const std::int64_t t_end = std::min(plan.n_trials, (b + 1) * kBlock);
                    for (std::int64_t t = b * kBlock; t < t_end; ++t)
                        run_trial(t, ps, req, eps_levels, eps_index, L, plan.seed, acc);
                    blocks[b - first] = std::move(acc);
                }
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err)
                    err = std::current_exception();
                next = last;
            }
        };
        const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, last - first));
        if (n_threads == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int i = 0; i < n_threads; ++i)
                pool.emplace_back(work);
            for (auto& th : pool)
                th.join();
        }
        if (err)
            std::rethrow_exception(err);
        for (auto& b : blocks)
            for (std::size_t i = 0; i < total.size(); ++i)
                total[i].merge(b[i]);
    }

    std::vector<McRow> rows;
    const std::int64_t n = plan.n_trials;
    auto welford_est = [&](const char* metric, const Welford& w) {
        return MetricEstimate{metric, w.mean, w.se(), static_cast<std::int64_t>(w.n)};
    };
    for (std::size_t s = 0; s < n_schemes; ++s) {
        const Scheme sc = req.schemes[s];
        const int layers = has_two_layers(sc) ? 2 : 1;
        for (std::size_t k = 0; k < L.n_points; ++k) {
            const Cell& c = total[L.cell(s, k)];
            const SweepPoint& pt = req.points[k];
            for (int rs = 0; rs < L.R; ++rs) {
                for (int l = 0; l < layers; ++l) {
                    const std::string lab = scheme_label(sc, l, true, rs, L.R);
                    for (int u = 0; u < L.U; ++u) {
                        const std::string user = std::to_string(u + 1);
                        if (is_rsma(sc)) {
                            rows.push_back({lab, user, pt,
                                            proportion("outage_common",
                                                       c.counts[L.count_index(rs, l, u, kCommon)], n)});
                            rows.push_back({lab, user, pt,
                                            proportion("outage_private",
                                                       c.counts[L.count_index(rs, l, u, kPrivate)], n)});
                        }
                        rows.push_back({lab, user, pt,
                                        proportion("outage_total",
                                                   c.counts[L.count_index(rs, l, u, kTotal)], n)});
                    }
                }
                rows.push_back({scheme_label(sc, 0, false, rs, L.R), "sum", pt,
                                welford_est("outage_sum_rate", c.sum_rate[rs])});
            }
            if (req.ergodic) {
                const std::string lab(scheme_name(sc));
                if (is_rsma(sc))
                    rows.push_back({lab, "min", pt, welford_est("ergodic_common", c.erg[0])});
                rows.push_back({lab, "sum", pt, welford_est("ergodic_private", c.erg[1])});
                rows.push_back({lab, "sum", pt, welford_est("ergodic_sum", c.erg[2])});
            }
        }
    }
    return rows;
}

std::vector<McRow> estimate_outage(const PreparedScenario& ps, Scheme s, const SweepPoint& pt,
                                   const RateSet& rates, const PowerAllocation& pw,
                                   const TrialPlan& plan)
{
    McRequest req{{s}, {pt}, {rates}, pw, true, false};
    return run_mc(ps, req, plan);
}

std::vector<McRow> estimate_ergodic(const PreparedScenario& ps, Scheme s, const SweepPoint& pt,
                                    const PowerAllocation& pw, const TrialPlan& plan)
{
    McRequest req{{s}, {pt}, {}, pw, false, true};
    return run_mc(ps, req, plan);
}

MetricEstimate estimate_outage_sum_rate(const PreparedScenario& ps, Scheme s,
                                        const SweepPoint& pt, const RateSet& rates,
                                        const PowerAllocation& pw, const TrialPlan& plan)
{
    for (auto& r : estimate_outage(ps, s, pt, rates, pw, plan))
        if (r.est.metric == "outage_sum_rate")
            return r.est;
    throw std::logic_error("estimate_outage_sum_rate: no sum-rate row");
}

} // namespace dpmimo
