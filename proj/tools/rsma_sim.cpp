#include "dpmimo/analytic.hpp"
#include "dpmimo/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace dpmimo;

namespace {

int default_workers()
{
    if (const char* env = std::getenv("RSMA_SIM_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1)
            return w;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

nlohmann::json build_patch(const std::string& preset, const std::string& config_path,
                           const std::vector<std::string>& overrides)
{
    nlohmann::json patch = nlohmann::json::object();
    if (!preset.empty())
        patch = preset_patch(preset);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw config_error("cannot open config file '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        nlohmann::json file;
        try {
            const std::string text = ss.str();
            file = nlohmann::json::parse(text.empty() ? std::string("{}") : text);
        } catch (const nlohmann::json::parse_error& e) {
            throw config_error(std::string("parse error in '") + config_path + "': " + e.what());
        }
        if (!file.is_object())
            throw config_error("config must be a JSON object");
        patch.merge_patch(file);
    }
    for (const auto& o : overrides)
        apply_override(patch, o);
    return patch;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-polarized massive MIMO RSMA link-level simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_path, format = "csv";
    std::vector<std::string> overrides;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    int workers = default_workers();

    auto* run = app.add_subcommand("run", "Run a preset or config and emit result rows");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--preset", preset, "Preset name");
    run->add_option("--override", overrides, "key=value (value parsed as JSON)");
    auto* trials_opt = run->add_option("--trials", trials, "Trials for every MC metric");
    auto* seed_opt = run->add_option("--seed", seed, "Base seed");
    run->add_option("--workers", workers, "Worker threads (default $RSMA_SIM_WORKERS)")
        ->check(CLI::PositiveNumber);
    run->add_option("--out", out_path, "Output file (default stdout)");
    run->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    auto* validate = app.add_subcommand("validate", "Check a config and print it resolved");
    validate->add_option("--config", config_path, "JSON config file");
    validate->add_option("--preset", preset, "Preset name");
    validate->add_option("--override", overrides, "key=value (value parsed as JSON)");

    auto* list = app.add_subcommand("list-presets", "List figure presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& n : preset_names())
                std::cout << n << '\n';
            return 0;
        }
        auto patch = build_patch(preset, config_path, overrides);
        if (run->parsed()) {
            if (trials_opt->count()) {
                patch["trials_outage"] = trials;
                patch["trials_ergodic"] = trials;
            }
            if (seed_opt->count())
                patch["seed"] = seed;
        }
        SystemConfig cfg = load_config(patch);
        if (validate->parsed()) {
            std::cout << cfg.resolved.dump(2) << '\n';
            return 0;
        }
        auto rows = run_experiment(cfg, workers);
        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path, std::ios::binary);
            if (!file)
                throw std::runtime_error("cannot write '" + out_path + "'");
        }
        std::ostream& os = out_path.empty() ? std::cout : file;
        if (format == "json")
            emit_json(os, cfg, rows);
        else
            emit_csv(os, cfg, rows);
        if (!os)
            throw std::runtime_error("write failed");
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const consistency_error& e) {
        std::cerr << "numerical consistency error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
