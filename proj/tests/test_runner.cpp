#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpmimo/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace dpmimo;
using doctest::Approx;
using nlohmann::json;

namespace {

std::string csv_of(const SystemConfig& cfg, int workers)
{
    std::ostringstream os;
    emit_csv(os, cfg, run_experiment(cfg, workers));
    return os.str();
}

SystemConfig small(const std::string& preset, std::int64_t trials = 300)
{
    json p = preset_patch(preset);
    p["trials_outage"] = trials;
    p["trials_ergodic"] = trials;
    p["snr_db"] = {0.0, 16.0};
    return load_config(p);
}

} // namespace

TEST_CASE("empty config is the default scenario")
{
    auto c = load_config_text("{}");
    CHECK(c.scenario.M == 100);
    CHECK(c.scenario.G == 4);
    CHECK(c.scenario.U == 3);
    CHECK(c.scenario.M_bar == 6);
    CHECK(c.scenario.delta == 4e4);
    CHECK(c.scenario.eta == 2.5);
    CHECK(c.power.alpha == 0.7);
    REQUIRE(c.power.beta.size() == 3);
    CHECK(c.power.beta[1] == Approx(0.1));
    CHECK(c.scenario.groups[c.scenario.group].user_distances_m == std::vector<double>{200, 170, 140});
    CHECK(c.snr_db.size() == 17);
    CHECK(c.snr_db.back() == 32.0);
    CHECK(c.trials_outage == 100000);
    CHECK(c.trials_ergodic == 20000);
    CHECK(c.resolved.at("M") == 100);
}

TEST_CASE("configuration errors")
{
    try {
        load_config_text(R"({"U": 8, "user_distances_m": [200,190,180,170,160,150,140,130]})");
        FAIL("expected an infeasibility error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("M_bar/2 > U - 1") != std::string::npos);
    }
    try {
        load_config_text(R"({"alpha": "lots"})");
        FAIL("expected a field error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_text(R"({"alhpa": 0.7})"), config_error);
    CHECK_THROWS_AS(load_config_text("{\"M\": 100,"), config_error);
    CHECK_THROWS_AS(load_config_text(R"({"schemes": ["QMUX"]})"), config_error);
    CHECK_THROWS_AS(load_config_text(R"({"alpha": 0.9, "beta": [0.1, 0.1, 0.1]})"), config_error);
    CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), config_error);
    CHECK_THROWS_AS(preset_patch("no-such-preset"), config_error);
}

TEST_CASE("overrides")
{
    json c = default_config_json();
    apply_override(c, "alpha=0.6");
    apply_override(c, "snr_db=[4,8]");
    apply_override(c, "rate_sets.0.common=1.5");
    CHECK(c["alpha"] == 0.6);
    CHECK(c["snr_db"].size() == 2);
    CHECK(c["rate_sets"][0]["common"] == 1.5);
    CHECK_THROWS_AS(apply_override(c, "alpha"), config_error);
}

TEST_CASE("every preset loads and its analytic rows cover the sweep")
{
    CHECK(preset_names().size() == 15);
    for (auto& name : preset_names()) {
        auto cfg = load_config(preset_patch(name));
        CHECK_MESSAGE(!cfg.schemes.empty(), name);
    }
    auto cfg = small("outage-pmux-ideal");
    cfg.mc = false;
    auto rows = run_experiment(cfg, 1);
    // 2 rate sets x 2 SNR x (3 users x 3 metrics + sum)
    CHECK(rows.size() == 2 * 2 * 10);
    for (auto& r : rows) {
        CHECK(r.source == "analytic");
        CHECK(r.std_error == 0.0);
        CHECK(r.trials == 0);
    }
}

TEST_CASE("CSV format")
{
    auto cfg = small("outage-pdiv-xi");
    auto text = csv_of(cfg, 1);
    std::istringstream is(text);
    std::string echo, header, line;
    std::getline(is, echo);
    std::getline(is, header);
    CHECK(echo.rfind("# config=", 0) == 0);
    CHECK(json::parse(echo.substr(9)) == cfg.resolved);
    CHECK(header == "scheme,group,user,snr_db,chi,xi,csi_error,metric,source,value,std_error,trials,seed");
    int n = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 12);
        CHECK(line.find('\r') == std::string::npos);
        ++n;
    }
    CHECK(n > 0);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(16.0) == "16");
}

TEST_CASE("resolved config re-runs bit-identically")
{
    auto cfg = small("ergodic-all-ma", 250);
    auto a = csv_of(cfg, 1);
    auto again = load_config(cfg.resolved);
    CHECK(csv_of(again, 2) == a);
    CHECK(csv_of(cfg, 3) == a);
}

TEST_CASE("JSON round trip")
{
    auto cfg = small("outage-spmux-xi");
    auto rows = run_experiment(cfg, 1);
    std::ostringstream os;
    emit_json(os, cfg, rows);
    auto doc = json::parse(os.str());
    CHECK(doc.at("config") == cfg.resolved);
    auto back = parse_json_rows(doc);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].scheme == rows[i].scheme);
        CHECK(back[i].user == rows[i].user);
        CHECK(back[i].metric == rows[i].metric);
        CHECK(back[i].source == rows[i].source);
        CHECK(back[i].value == rows[i].value);
        CHECK(back[i].std_error == rows[i].std_error);
        CHECK(back[i].trials == rows[i].trials);
        CHECK(back[i].seed == rows[i].seed);
        CHECK(back[i].xi == rows[i].xi);
    }
}

TEST_CASE("config file loading")
{
    const std::string path = "runner_test_config.json";
    {
        std::ofstream f(path);
        f << R"({"snr_db": [10], "schemes": ["PDIV", "SP-NOMA"], "seed": 42})";
    }
    auto c = load_config_file(path);
    std::remove(path.c_str());
    CHECK(c.seed == 42);
    CHECK(c.schemes.size() == 2);
    CHECK(c.snr_db == std::vector<double>{10.0});
}
