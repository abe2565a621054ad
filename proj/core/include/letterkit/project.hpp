#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "letterkit/ner.hpp"

namespace letterkit::project {

enum class ProjectErrorCode { Usage, Config };

class ProjectError : public std::runtime_error {
public:
    ProjectError(ProjectErrorCode code, std::string detail);
    ProjectErrorCode code() const { return code_; }

private:
    ProjectErrorCode code_;
};

struct OutputPaths {
    std::filesystem::path site;
    std::filesystem::path volume;
    std::filesystem::path report;  // directory, one page per source document
    std::filesystem::path triples;
    std::filesystem::path geo_csv;
    std::filesystem::path findings;
    std::filesystem::path identifications;
    std::filesystem::path log;
};

struct ProjectManifest {
    std::filesystem::path root;  // manifest directory; inputs resolve against it
    std::vector<std::filesystem::path> letters;
    std::vector<std::filesystem::path> annotations;
    std::vector<std::filesystem::path> declarations;
    std::filesystem::path assistance;  // empty = none
    // Tab-separated: letter id, phrase, note text.
    std::vector<std::filesystem::path> external_annotations;
    std::vector<std::filesystem::path> triples_files;
    std::vector<std::filesystem::path> geonames_files;
    std::filesystem::path snapshot_path;
    std::string locale = "de";
    std::optional<int> born_before;
    std::optional<std::pair<int, int>> creation_era;
    ner::NerConfig ner_config;
    OutputPaths out;
};

extern const char* const kStageNames[9];  // parse ... export, all

// Output root precedence: LETTERKIT_OUT env var, else <manifest dir>/out.
ProjectManifest load_manifest(const std::filesystem::path& manifest_path);

// Exit status: 0 success, 1 findings with Errors, 2 usage/config error.
int run_pipeline(const ProjectManifest& manifest, const std::string& stage,
                 std::ostream& diag);

}  // namespace letterkit::project
