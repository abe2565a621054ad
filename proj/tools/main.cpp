#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "letterkit/assist.hpp"
#include "letterkit/project.hpp"

namespace {

int run_stage(const std::string& manifest_path, const std::string& stage) {
    try {
        const auto manifest = letterkit::project::load_manifest(manifest_path);
        return letterkit::project::run_pipeline(manifest, stage, std::cerr);
    } catch (const letterkit::project::ProjectError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}

int check_assistance(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot read " << path << '\n';
        return 2;
    }
    std::string source((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
    try {
        const auto rules = letterkit::assist::parse_assistance_doc(source);
        std::cout << rules.size() << " rules\n";
        return 0;
    } catch (const letterkit::assist::AssistError& e) {
        std::cerr << path << ":" << e.line() << ":" << e.column() << ": " << e.what()
                  << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolchain for scholarly editions of correspondences"};
    app.require_subcommand(1);

    std::string manifest_path = "letterkit.json";
    std::string stage_arg;
    for (const char* stage : letterkit::project::kStageNames) {
        auto* sub = app.add_subcommand(stage, std::string("run the ") + stage +
                                                  " stage");
        sub->add_option("-m,--manifest", manifest_path, "project manifest file");
        sub->callback([stage, &stage_arg] { stage_arg = stage; });
    }

    std::string assist_path;
    auto* assist = app.add_subcommand("assist-check",
                                      "validate an assistance document");
    assist->add_option("file", assist_path, "assistance document")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (assist->parsed()) return check_assistance(assist_path);
    return run_stage(manifest_path, stage_arg);
}
