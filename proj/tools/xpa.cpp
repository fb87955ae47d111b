#include "xpa/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr const char* kEnvPrefix = "XPA_";

int run(const std::string& command, const std::string& config_path, const std::string& output)
{
    auto cfg = xpa::Config::load(config_path);
    cfg.apply_env(kEnvPrefix, xpa::report::PipelineOptions::known_keys());
    if (!output.empty()) {
        cfg.set("output_dir", std::filesystem::absolute(output).string());
    }
    xpa::report::Pipeline p(xpa::report::PipelineOptions::from_config(cfg));
    if (command == "ingest")
        p.ingest();
    else if (command == "leaning")
        p.leaning();
    else if (command == "metrics")
        p.metrics();
    else if (command == "cascades")
        p.cascades();
    else if (command == "network")
        p.network();
    else if (command == "fit-hip")
        p.fit_hip();
    else if (command == "compare")
        p.compare();
    else
        p.run_all();
    for (const auto& w : p.warnings())
        std::cerr << "warning: " << w << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cross-platform attention measurement pipeline"};
    app.require_subcommand(1);
    std::string config, output;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ingest", "Load the corpus, filter videos, match topics (videos.csv)"},
        {"leaning", "Estimate user and video leanings per topic"},
        {"metrics", "Per-video attention and engagement metrics"},
        {"cascades", "Reconstruct cascades and their start times"},
        {"network", "Early-adopter follower network metrics"},
        {"fit-hip", "Fit the HIP model per video and compute viral potential"},
        {"compare", "Left/right comparisons with MWU and bootstrap tests"},
        {"report", "Run every stage and write the full report"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config, "Key-value config file")->required();
        sub->add_option("-o,--output", output, "Override output_dir");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config, output);
    } catch (const xpa::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
