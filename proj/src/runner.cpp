#include "dpmimo/runner.hpp"
#include "dpmimo/analytic.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace dpmimo {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {
    "M",          "G",           "U",           "M_bar",          "spacing_wavelengths",
    "rank_rel_threshold",        "delta",       "eta",            "azimuths_deg",
    "group_distance_m",          "group_radius_m",                "user_distances_m",
    "group",      "alpha",       "beta",        "noma_powers",    "snr_db",
    "chi",        "xi",          "csi_error",   "impairments",    "rate_sets",
    "schemes",    "metrics",     "sources",     "trials_outage",  "trials_ergodic",
    "seed",
};

json snr_grid(double lo, double hi, double step)
{
    json out = json::array();
    for (double s = lo; s <= hi + 1e-9; s += step)
        out.push_back(s);
    return out;
}

json rate_set(double rc, std::vector<double> rp)
{
    return {{"common", rc}, {"private", rp}};
}

const json& all_scheme_names()
{
    static const json v = [] {
        json a = json::array();
        for (Scheme s : all_schemes())
            a.push_back(std::string(scheme_name(s)));
        return a;
    }();
    return v;
}

const std::map<std::string, json>& presets()
{
    static const std::map<std::string, json> m = [] {
        const json set_a = rate_set(0.5, {0.1, 0.5, 1.2});
        const json set_b = rate_set(0.5, {0.1, 1.0, 2.0});
        const json outage = {"outage"};
        const json ergodic = {"ergodic"};
        const json rsma = {"SP-RSMA", "PMUX", "PDIV", "SPMUX"};
        json xi_grid = json::array();
        for (int k = 0; k <= 20; ++k)
            xi_grid.push_back(k / 40.0);
        std::map<std::string, json> p;
        p["outage-pmux-ideal"] = {{"schemes", {"PMUX"}}, {"chi", {0.0}}, {"xi", {0.0}},
                                  {"rate_sets", {set_a, set_b}}, {"metrics", outage}};
        p["outage-pmux-chi"] = {{"schemes", {"PMUX"}}, {"chi", {0.0, 0.001, 0.01, 0.1}},
                                {"xi", {0.0}}, {"rate_sets", {set_b}}, {"metrics", outage}};
        p["outage-pdiv-ideal"] = {{"schemes", {"PDIV"}}, {"chi", {0.0}}, {"xi", {0.0}},
                                  {"rate_sets", {set_a, set_b}}, {"metrics", outage}};
        p["outage-pdiv-xi"] = {{"schemes", {"PDIV"}}, {"chi", {0.001}}, {"xi", {0.0, 0.01, 0.05}},
                               {"rate_sets", {set_b}}, {"metrics", outage}};
        p["outage-spmux-ideal"] = {{"schemes", {"SPMUX"}}, {"chi", {0.0}}, {"xi", {0.0}},
                                   {"rate_sets", {set_a, set_b}}, {"metrics", outage}};
        p["outage-spmux-xi"] = {{"schemes", {"SPMUX"}}, {"chi", {0.001}},
                                {"xi", {0.0, 0.01, 0.05}}, {"rate_sets", {set_b}},
                                {"metrics", outage}};
        p["outage-compare"] = {{"schemes", {"PMUX", "PDIV", "SPMUX"}}, {"chi", {0.001}},
                               {"xi", {0.0, 0.05}}, {"rate_sets", {set_b}}, {"metrics", outage}};
        p["outage-sumrate-vs-snr"] = {{"schemes", all_scheme_names()}, {"chi", {0.001}},
                                      {"xi", {0.0, 0.1}}, {"rate_sets", {set_b}},
                                      {"metrics", outage}};
        p["outage-sumrate-vs-xi"] = {{"schemes", all_scheme_names()}, {"snr_db", {24.0}},
                                     {"chi", {0.001}}, {"xi", xi_grid}, {"rate_sets", {set_b}},
                                     {"metrics", outage}};
        p["ergodic-pmux-chi"] = {{"schemes", {"PMUX"}}, {"chi", {0.0, 0.001, 0.01}},
                                 {"xi", {0.0}}, {"metrics", ergodic}};
        p["ergodic-pdiv-xi"] = {{"schemes", {"PDIV"}}, {"chi", {0.0}}, {"xi", {0.0, 0.01, 0.05}},
                                {"metrics", ergodic}};
        p["ergodic-schemes-xi"] = {{"schemes", rsma}, {"chi", {0.001}}, {"xi", {0.0, 0.01, 0.1}},
                                   {"metrics", ergodic}};
        p["ergodic-schemes-chi"] = {{"schemes", rsma}, {"chi", {0.001, 0.01, 0.1}},
                                    {"xi", {0.01}}, {"metrics", ergodic}};
        p["ergodic-all-ma"] = {{"schemes", all_scheme_names()}, {"chi", {0.001}},
                               {"xi", {0.0, 0.1}}, {"metrics", ergodic}};
        p["ergodic-sdma-csi"] = {
            {"schemes", {"PMUX", "PDIV", "SPMUX", "SP-SDMA", "DP-SDMA-div", "DP-SDMA-mux"}},
            {"impairments",
             {{{"chi", 0.001}, {"xi", 0.0}, {"csi_error", 0.0}},
              {{"chi", 0.001}, {"xi", 0.01}, {"csi_error", 0.3}}}},
            {"metrics", ergodic}};
        return p;
    }();
    return m;
}

[[noreturn]] void field_error(const std::string& key, const std::string& what)
{
    throw config_error("config field '" + key + "': " + what);
}

double get_num(const json& j, const std::string& key)
{
    const json& v = j.at(key);
    if (!v.is_number())
        field_error(key, "expected a number, got " + v.dump());
    return v.get<double>();
}

std::int64_t get_int(const json& j, const std::string& key)
{
    const json& v = j.at(key);
    if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>()))
        field_error(key, "expected an integer, got " + v.dump());
    return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
}

// A number or a list of numbers.
std::vector<double> get_list(const json& j, const std::string& key)
{
    const json& v = j.at(key);
    if (v.is_number())
        return {v.get<double>()};
    if (!v.is_array())
        field_error(key, "expected a number or a list of numbers, got " + v.dump());
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            field_error(key, "non-numeric entry " + e.dump());
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::string> get_strings(const json& j, const std::string& key)
{
    const json& v = j.at(key);
    if (!v.is_array())
        field_error(key, "expected a list of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string())
            field_error(key, "non-string entry " + e.dump());
        out.push_back(e.get<std::string>());
    }
    return out;
}

void set_path(json& cfg, const std::string& dotted, json value)
{
    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        auto dot = dotted.find('.', start);
        std::string part = dotted.substr(start, dot - start);
        if (part.empty())
            throw config_error("override key '" + dotted + "' is malformed");
        if (node->is_array()) {
            std::size_t idx = 0;
            auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
            if (ec != std::errc() || p != part.data() + part.size() || idx >= node->size())
                throw config_error("override key '" + dotted + "': bad index '" + part + "'");
            node = &(*node)[idx];
        } else {
            node = &(*node)[part];
        }
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    *node = std::move(value);
}

std::vector<SweepPoint> sweep_points(const SystemConfig& cfg)
{
    std::vector<SweepPoint> pts;
    for (const auto& imp : cfg.impairments)
        for (double snr : cfg.snr_db)
            pts.push_back({snr, imp.chi, imp.xi, imp.csi_error});
    return pts;
}

ResultRow make_row(const SystemConfig& cfg, std::string scheme, std::string user,
                   const SweepPoint& pt, std::string metric, std::string source,
                   const MetricEstimate& est)
{
    if (!std::isfinite(est.value) || !std::isfinite(est.std_error))
        throw consistency_error("non-finite " + metric + " for " + scheme);
    return {std::move(scheme), cfg.scenario.group + 1, std::move(user), pt.snr_db, pt.chi, pt.xi,
            pt.csi_error,      std::move(metric),     std::move(source), est.value,
            est.std_error,     est.trials,            cfg.seed};
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

json default_config_json()
{
    return {
        {"M", 100},
        {"G", 4},
        {"U", 3},
        {"M_bar", 6},
        {"spacing_wavelengths", 0.5},
        {"rank_rel_threshold", 0.01},
        {"delta", 40000.0},
        {"eta", 2.5},
        {"azimuths_deg", nullptr},
        {"group_distance_m", 170.0},
        {"group_radius_m", 30.0},
        {"user_distances_m", {200.0, 170.0, 140.0}},
        {"group", 1},
        {"alpha", 0.7},
        {"beta", nullptr},
        {"noma_powers", nullptr},
        {"snr_db", snr_grid(0, 32, 2)},
        {"chi", {0.0}},
        {"xi", {0.0}},
        {"csi_error", {0.0}},
        {"impairments", nullptr},
        {"rate_sets", {rate_set(0.5, {0.1, 1.0, 2.0})}},
        {"schemes", {"PMUX", "PDIV", "SPMUX"}},
        {"metrics", {"outage"}},
        {"sources", {"analytic", "mc"}},
        {"trials_outage", 100000},
        {"trials_ergodic", 20000},
        {"seed", 1},
    };
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> v = [] {
        std::vector<std::string> out;
        for (auto& [k, _] : presets())
            out.push_back(k);
        return out;
    }();
    return v;
}

json preset_patch(const std::string& name)
{
    auto it = presets().find(name);
    if (it == presets().end())
        throw config_error("unknown preset '" + name + "'");
    return it->second;
}

void apply_override(json& cfg, const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;
    set_path(cfg, key, std::move(value));
}

SystemConfig load_config(const json& patch)
{
    if (!patch.is_object())
        throw config_error("config must be a JSON object");
    for (auto& [k, _] : patch.items())
        if (!kKeys.count(k))
            throw config_error("unknown config field '" + k + "'");
    json j = default_config_json();
    j.merge_patch(patch);
    for (const auto& k : kKeys)
        if (!j.contains(k))
            j[k] = default_config_json()[k];

    SystemConfig c;
    Scenario& sc = c.scenario;
    sc.M = static_cast<int>(get_int(j, "M"));
    sc.G = static_cast<int>(get_int(j, "G"));
    sc.U = static_cast<int>(get_int(j, "U"));
    sc.M_bar = static_cast<int>(get_int(j, "M_bar"));
    sc.spacing_wavelengths = get_num(j, "spacing_wavelengths");
    sc.rank_rel_threshold = get_num(j, "rank_rel_threshold");
    sc.delta = get_num(j, "delta");
    sc.eta = get_num(j, "eta");
    sc.group = static_cast<int>(get_int(j, "group")) - 1;
    if (sc.M < 4 || sc.M % 2)
        field_error("M", "must be an even integer >= 4");
    if (sc.M_bar < 2 || sc.M_bar % 2)
        field_error("M_bar", "must be an even integer >= 2");
    if (sc.G < 1)
        field_error("G", "must be >= 1");
    if (sc.U < 1)
        field_error("U", "must be >= 1");
    if (sc.group < 0 || sc.group >= sc.G)
        field_error("group", "must lie in 1..G");
    if (!(sc.spacing_wavelengths > 0))
        field_error("spacing_wavelengths", "must be positive");
    if (!(sc.rank_rel_threshold > 0 && sc.rank_rel_threshold < 1))
        field_error("rank_rel_threshold", "must lie in (0,1)");
    if (!(sc.delta > 0))
        field_error("delta", "must be positive");
    if (!(sc.eta > 0))
        field_error("eta", "must be positive");
    if (sc.M_bar / 2 <= sc.U - 1)
        throw config_error("infeasible: M_bar/2 > U - 1 violated (M_bar/2 = " +
                           std::to_string(sc.M_bar / 2) + ", U - 1 = " +
                           std::to_string(sc.U - 1) + ")");
    if (sc.M_bar > sc.M)
        throw config_error("infeasible: M_bar <= M violated");

    std::vector<double> users = get_list(j, "user_distances_m");
    if (static_cast<int>(users.size()) != sc.U)
        field_error("user_distances_m", "needs exactly U entries");
    for (double d : users)
        if (!(d > 0))
            field_error("user_distances_m", "distances must be positive");
    sc.groups = default_groups(sc.G, users);
    if (!j["azimuths_deg"].is_null()) {
        auto az = get_list(j, "azimuths_deg");
        if (static_cast<int>(az.size()) != sc.G)
            field_error("azimuths_deg", "needs exactly G entries");
        for (int g = 0; g < sc.G; ++g)
            sc.groups[g].azimuth_deg = az[g];
    }
    const double gd = get_num(j, "group_distance_m"), gr = get_num(j, "group_radius_m");
    if (!(gd > gr && gr > 0))
        throw config_error("geometry: group_distance_m > group_radius_m > 0 violated");
    json az = json::array();
    for (auto& g : sc.groups) {
        g.distance_m = gd;
        g.radius_m = gr;
        az.push_back(g.azimuth_deg);
    }
    j["azimuths_deg"] = az;

    PowerAllocation& pw = c.power;
    pw.alpha = get_num(j, "alpha");
    if (!(pw.alpha >= 0 && pw.alpha < 1))
        field_error("alpha", "must lie in [0,1)");
    pw.beta = j["beta"].is_null() ? std::vector<double>(sc.U, (1.0 - pw.alpha) / sc.U)
                                  : get_list(j, "beta");
    if (pw.beta.size() == 1 && sc.U > 1)
        pw.beta.assign(sc.U, pw.beta[0]);
    if (static_cast<int>(pw.beta.size()) != sc.U)
        field_error("beta", "needs one entry per user");
    double total = pw.alpha;
    for (double b : pw.beta) {
        if (!(b > 0))
            field_error("beta", "entries must be positive");
        total += b;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw config_error("power: alpha + sum(beta) = 1 violated (sum is " +
                           format_double(total) + ")");
    j["beta"] = pw.beta;
    if (j["noma_powers"].is_null()) {
        if (sc.U == 3)
            pw.noma = {5.0 / 8, 2.0 / 8, 1.0 / 8};
        else
            pw.noma.assign(sc.U, 1.0 / sc.U);
    } else {
        pw.noma = get_list(j, "noma_powers");
    }
    if (static_cast<int>(pw.noma.size()) != sc.U)
        field_error("noma_powers", "needs one entry per user");
    j["noma_powers"] = pw.noma;

    c.snr_db = get_list(j, "snr_db");
    if (c.snr_db.empty())
        field_error("snr_db", "must not be empty");

    auto check_imp = [](const Impairment& im) {
        if (!(im.chi >= 0 && im.chi <= 1))
            field_error("chi", "must lie in [0,1]");
        if (!(im.xi >= 0 && im.xi <= 1))
            field_error("xi", "must lie in [0,1]");
        if (!(im.csi_error >= 0 && im.csi_error <= 1))
            field_error("csi_error", "must lie in [0,1]");
    };
    if (!j["impairments"].is_null()) {
        if (!j["impairments"].is_array() || j["impairments"].empty())
            field_error("impairments", "expected a non-empty list of objects");
        for (const auto& e : j["impairments"]) {
            if (!e.is_object())
                field_error("impairments", "entries must be objects");
            Impairment im;
            im.chi = e.contains("chi") ? get_num(e, "chi") : 0.0;
            im.xi = e.contains("xi") ? get_num(e, "xi") : 0.0;
            im.csi_error = e.contains("csi_error") ? get_num(e, "csi_error") : 0.0;
            check_imp(im);
            c.impairments.push_back(im);
        }
    } else {
        for (double chi : get_list(j, "chi"))
            for (double xi : get_list(j, "xi"))
                for (double eps : get_list(j, "csi_error")) {
                    Impairment im{chi, xi, eps};
                    check_imp(im);
                    c.impairments.push_back(im);
                }
        if (c.impairments.empty())
            field_error("chi", "chi, xi and csi_error lists must not be empty");
    }

    if (!j["rate_sets"].is_array())
        field_error("rate_sets", "expected a list");
    for (const auto& e : j["rate_sets"]) {
        if (!e.is_object() || !e.contains("common") || !e.contains("private"))
            field_error("rate_sets", "entries need 'common' and 'private'");
        RateSet r;
        r.common = get_num(e, "common");
        r.priv = get_list(e, "private");
        if (static_cast<int>(r.priv.size()) != sc.U)
            field_error("rate_sets", "'private' needs one rate per user");
        if (r.common < 0)
            field_error("rate_sets", "rates must be >= 0");
        for (double x : r.priv)
            if (x < 0)
                field_error("rate_sets", "rates must be >= 0");
        c.rate_sets.push_back(r);
    }

    for (const auto& name : get_strings(j, "schemes")) {
        auto s = parse_scheme(name);
        if (!s)
            field_error("schemes", "unknown scheme '" + name + "'");
        c.schemes.push_back(*s);
    }
    if (c.schemes.empty())
        field_error("schemes", "must not be empty");

    c.outage = c.ergodic = false;
    for (const auto& m : get_strings(j, "metrics")) {
        if (m == "outage")
            c.outage = true;
        else if (m == "ergodic")
            c.ergodic = true;
        else
            field_error("metrics", "unknown metric '" + m + "' (outage | ergodic)");
    }
    c.analytic = c.mc = false;
    for (const auto& m : get_strings(j, "sources")) {
        if (m == "analytic")
            c.analytic = true;
        else if (m == "mc")
            c.mc = true;
        else
            field_error("sources", "unknown source '" + m + "' (analytic | mc)");
    }
    if (c.outage && c.rate_sets.empty())
        field_error("rate_sets", "outage metrics need at least one rate set");

    c.trials_outage = get_int(j, "trials_outage");
    c.trials_ergodic = get_int(j, "trials_ergodic");
    if (c.trials_outage < 1 || c.trials_ergodic < 1)
        throw config_error("config fields 'trials_outage'/'trials_ergodic' must be >= 1");
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
        field_error("seed", "expected a nonnegative integer");
    if (j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() < 0)
        field_error("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();

    try {
        (void)prepare(sc);
    } catch (const infeasible_error& e) {
        throw config_error(std::string("infeasible: ") + e.what());
    }
    c.resolved = j;
    return c;
}

SystemConfig load_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text.empty() ? std::string("{}") : text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("parse error: ") + e.what());
    }
    return load_config(j);
}

SystemConfig load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

std::vector<ResultRow> analytic_rows(const SystemConfig& cfg, const PreparedScenario& ps)
{
    std::vector<ResultRow> rows;
    const int U = cfg.scenario.U;
    const int n_sets = static_cast<int>(cfg.rate_sets.size());
    auto est = [](const char* metric, double v) { return MetricEstimate{metric, v, 0.0, 0}; };
    for (Scheme s : cfg.schemes) {
        if (s != Scheme::PMUX && s != Scheme::PDIV && s != Scheme::SPMUX)
            continue;
        const int layers = has_two_layers(s) ? 2 : 1;
        for (const SweepPoint& pt : sweep_points(cfg)) {
            if (pt.csi_error != 0.0)
                continue;
            std::vector<AnalyticParams> users(U);
            for (int u = 0; u < U; ++u) {
                AnalyticParams& p = users[u];
                p.phi = ps.phi;
                p.zeta = ps.zeta[u];
                p.alpha = cfg.power.alpha;
                p.beta = cfg.power.beta[u];
                p.chi = pt.chi;
                p.xi = pt.xi;
                p.U = U;
                p.rho = std::pow(10.0, pt.snr_db / 10.0);
            }
            if (cfg.outage) {
                for (int rs = 0; rs < n_sets; ++rs) {
                    const RateSet& r = cfg.rate_sets[rs];
                    std::vector<std::pair<double, double>> outs;
                    for (int u = 0; u < U; ++u) {
                        AnalyticParams p = users[u];
                        p.tau_c = tau_from_rate(r.common);
                        p.tau_p = tau_from_rate(r.priv[u]);
                        double pc = 0, pp = 0;
                        if (s == Scheme::PMUX) {
                            pc = outage_common_pmux(p);
                            pp = outage_private_pmux(p);
                        } else if (s == Scheme::PDIV) {
                            pc = outage_common_pdiv(p);
                            pp = outage_private_pdiv(p);
                        } else {
                            pc = outage_common_spmux(p);
                            pp = outage_private_spmux(p);
                        }
                        outs.emplace_back(pc, pp);
                    }
                    for (int l = 0; l < layers; ++l) {
                        const std::string lab = scheme_label(s, l, true, rs, n_sets);
                        for (int u = 0; u < U; ++u) {
                            const std::string user = std::to_string(u + 1);
                            rows.push_back(make_row(cfg, lab, user, pt, "outage_common",
                                                    "analytic", est("", outs[u].first)));
                            rows.push_back(make_row(cfg, lab, user, pt, "outage_private",
                                                    "analytic", est("", outs[u].second)));
                            rows.push_back(make_row(
                                cfg, lab, user, pt, "outage_total", "analytic",
                                est("", outage_total(outs[u].first, outs[u].second))));
                        }
                    }
                    const double sr = layers * outage_sum_rate(outs, r.common, r.priv);
                    rows.push_back(make_row(cfg, scheme_label(s, 0, false, rs, n_sets), "sum", pt,
                                            "outage_sum_rate", "analytic", est("", sr)));
                }
            }
            if (cfg.ergodic && s != Scheme::SPMUX) {
                const std::string lab(scheme_name(s));
                double cc = s == Scheme::PMUX ? ergodic_common_pmux(users) : ergodic_common_pdiv(users);
                double cp =
                    s == Scheme::PMUX ? ergodic_private_pmux(users) : ergodic_private_pdiv(users);
                rows.push_back(make_row(cfg, lab, "min", pt, "ergodic_common", "analytic", est("", cc)));
                rows.push_back(make_row(cfg, lab, "sum", pt, "ergodic_private", "analytic", est("", cp)));
                rows.push_back(make_row(cfg, lab, "sum", pt, "ergodic_sum", "analytic", est("", cc + cp)));
            }
        }
    }
    return rows;
}

std::vector<ResultRow> run_experiment(const SystemConfig& cfg, int workers)
{
    PreparedScenario ps;
    try {
        ps = prepare(cfg.scenario);
    } catch (const infeasible_error& e) {
        throw config_error(std::string("infeasible: ") + e.what());
    }
    std::vector<ResultRow> rows;
    if (cfg.analytic)
        rows = analytic_rows(cfg, ps);
    if (!cfg.mc)
        return rows;
    const auto pts = sweep_points(cfg);
    auto add = [&](bool outage, std::int64_t trials) {
        McRequest req{cfg.schemes, pts, outage ? cfg.rate_sets : std::vector<RateSet>{},
                      cfg.power, outage, !outage};
        for (auto& r : run_mc(ps, req, TrialPlan{cfg.seed, trials, workers}))
            rows.push_back(make_row(cfg, r.scheme, r.user, r.point, r.est.metric, "mc", r.est));
    };
    if (cfg.outage)
        add(true, cfg.trials_outage);
    if (cfg.ergodic)
        add(false, cfg.trials_ergodic);
    return rows;
}

void emit_csv(std::ostream& os, const SystemConfig& cfg, const std::vector<ResultRow>& rows)
{
    os << "# config=" << cfg.resolved.dump() << '\n';
    os << "scheme,group,user,snr_db,chi,xi,csi_error,metric,source,value,std_error,trials,seed\n";
    for (const auto& r : rows) {
        os << r.scheme << ',' << r.group << ',' << r.user << ',' << format_double(r.snr_db) << ','
           << format_double(r.chi) << ',' << format_double(r.xi) << ','
           << format_double(r.csi_error) << ',' << r.metric << ',' << r.source << ','
           << format_double(r.value) << ',' << format_double(r.std_error) << ',' << r.trials
           << ',' << r.seed << '\n';
    }
}

void emit_json(std::ostream& os, const SystemConfig& cfg, const std::vector<ResultRow>& rows)
{
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"scheme", r.scheme},
                       {"group", r.group},
                       {"user", r.user},
                       {"snr_db", r.snr_db},
                       {"chi", r.chi},
                       {"xi", r.xi},
                       {"csi_error", r.csi_error},
                       {"metric", r.metric},
                       {"source", r.source},
                       {"value", r.value},
                       {"std_error", r.std_error},
                       {"trials", r.trials},
                       {"seed", r.seed}});
    }
    os << json{{"config", cfg.resolved}, {"rows", arr}}.dump(1) << '\n';
}

std::vector<ResultRow> parse_json_rows(const json& doc)
{
    std::vector<ResultRow> out;
    for (const auto& e : doc.at("rows")) {
        ResultRow r;
        r.scheme = e.at("scheme").get<std::string>();
        r.group = e.at("group").get<int>();
        r.user = e.at("user").get<std::string>();
        r.snr_db = e.at("snr_db").get<double>();
        r.chi = e.at("chi").get<double>();
        r.xi = e.at("xi").get<double>();
        r.csi_error = e.at("csi_error").get<double>();
        r.metric = e.at("metric").get<std::string>();
        r.source = e.at("source").get<std::string>();
        r.value = e.at("value").get<double>();
        r.std_error = e.at("std_error").get<double>();
        r.trials = e.at("trials").get<std::int64_t>();
        r.seed = e.at("seed").get<std::uint64_t>();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace dpmimo
