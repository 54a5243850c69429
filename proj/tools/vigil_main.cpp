#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "vigil/errors.hpp"
#include "vigil/pipeline.hpp"
#include "vigil/spectral.hpp"

int main(int argc, char** argv) {
    CLI::App app{"EEG drowsiness scoring over EDF recordings"};
    app.require_subcommand(1);

    vigil::pipeline::PipelineConfig config;
    std::string input;
    std::string channel_map;
    std::string rules;
    std::string mode = "all";
    std::string out_dir = ".";

    CLI::App* analyze = app.add_subcommand("analyze", "Score an EDF recording epoch by epoch");
    analyze->add_option("input", input, "EDF recording to analyze")->required();
    analyze->add_option("--channel-map", channel_map,
                        "Role-to-label config file (`ROLE = EDF_LABEL` lines, `#` comments)");
    analyze->add_option("--rules", rules,
                        "Rule override file (`A=S & V=S & D=S -> DS=S` lines, `#` comments)");
    analyze->add_option("--epoch-seconds", config.epoch_seconds, "Epoch length in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    analyze->add_option("--epoch-mode", mode, "Which epoch windows to analyze")
        ->check(CLI::IsMember({"start", "middle", "end", "all"}))
        ->capture_default_str();
    analyze->add_option("--format", config.format, "Report file format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    analyze->add_flag("--plots", config.plots,
                      "Write per-epoch raw/band series under <out>/plots");
    analyze->add_option("--out", out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // bad invocation is an input error
    }

    config.input = input;
    if (!channel_map.empty()) config.channel_map_path = channel_map;
    if (!rules.empty()) config.rules_path = rules;
    config.mode = vigil::spectral::parse_epoch_mode(mode);
    config.out_dir = out_dir;

    try {
        vigil::pipeline::PipelineResult result = vigil::pipeline::run_pipeline(config);
        std::printf("%s\n", result.report_path.string().c_str());
        return 0;
    } catch (const vigil::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const vigil::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
