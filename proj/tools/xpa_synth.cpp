#include "xpa/synth.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Write a synthetic corpus with planted left/right differences"};
    xpa::synth::FixtureOptions o;
    std::string dir;
    app.add_option("out", dir, "Output directory")->required();
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--left", o.left_videos, "Left-leaning videos");
    app.add_option("--right", o.right_videos, "Right-leaning videos");
    app.add_option("--center", o.center_videos, "Center videos");
    app.add_option("--keywords", o.keywords_path, "Keyword file path written to config.txt");
    app.add_option("--seeds-left", o.seeds_left_path, "Left seed hashtag path written to config.txt");
    app.add_option("--seeds-right", o.seeds_right_path, "Right seed hashtag path written to config.txt");
    app.add_option("--video-leaning", o.video_leaning, "scores or labels");
    CLI11_PARSE(app, argc, argv);
    try {
        const auto s = xpa::synth::write_fixture(dir, o);
        std::cout << s.videos << " videos, " << s.tweets << " tweets, " << s.users << " users\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
