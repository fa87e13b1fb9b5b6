#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "selfaffine/classifier.hpp"
#include "selfaffine/uniqueness.hpp"

namespace selfaffine {

using Json = nlohmann::json;

std::string tool_name();
std::string tool_version();

// Honors SELFAFFINE_THREADS (positive integer cap on OpenMP threads).
// Returns the applied cap, or 0 when the variable is absent/unparseable.
int apply_thread_env();

// Write-to-temp-then-rename in the destination directory; partial files are
// never visible under the final name.
void write_file_atomic(const std::string& path, const std::string& data);

Json describe(const SpectralSpec& spec);
Json describe(const UniquenessClass& c);
Json describe(const InteriorVerdict& v);
Json describe(Connectivity c);
Json describe(const Enclosure& e);
Json describe(const Certification& c);
Json describe(const InteriorCertificate& c);
Json describe(const DecompositionReport& r);

// Schema-versioned run record: verbatim input echo plus everything needed to
// reproduce the verdicts (mode, flags live inside `verdicts` per command).
struct RunReport {
    std::string command;
    std::string input_echo;
    std::string mode;  // "exact" or "float"
    Json verdicts = Json::object();
    Json constants = Json::object();
    std::vector<std::string> artifacts;
    double timing_ms = 0;

    Json to_json() const;
};

}  // namespace selfaffine
