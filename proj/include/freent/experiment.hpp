#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace freent {

inline constexpr const char* tool_version_string = "0.1.0";

// One named pipeline plus its merged parameter object.  Parameters always
// carry "seed"; defaults are materialized before hashing so that the hash
// pins the full effective configuration.
struct ExperimentConfig {
    std::string command;
    nlohmann::json params;
};

// Builds the merged view: command defaults, then the given flag values, then
// the JSON config file (file wins on conflict).  Validates the result.
ExperimentConfig make_config(const std::string& command,
                             const nlohmann::json& flag_params,
                             const std::string& config_file_path = "");

// Schema plus semantic bounds; throws ValidationError.
void validate_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical dump of (command, params), as 16 hex digits.
std::string hash_config(const ExperimentConfig& cfg);

// FREENT_OUTDIR when set, else "out".
std::string default_outdir();

struct ResultManifest {
    std::string command;
    std::string config_hash;
    std::string tool_version;
    std::string kernels;  // active kernel backend
    std::uint64_t seed = 0;
    nlohmann::json config;   // merged view
    nlohmann::json outputs;  // per-operation results
    std::vector<std::string> data_files;  // relative to the run directory
    std::vector<std::string> warnings;
    double wall_clock_seconds = 0.0;
    std::string run_dir;  // <outdir>/<command>-<hash>, set after writing

    nlohmann::json to_json() const;
};

// Executes the pipeline and writes <outdir>/<command>-<hash>/manifest.json
// plus data/*.csv.  The directory name embeds the config hash, so distinct
// configurations never collide; rerunning one rewrites identical data.
ResultManifest run_experiment(const ExperimentConfig& cfg,
                              const std::string& outdir);

// Validation against a schema subset: type, properties, required, enum,
// minimum, maximum, items, additionalProperties.  Throws ValidationError
// naming the offending path under `where`.
void validate_against_schema(const nlohmann::json& value,
                             const nlohmann::json& schema,
                             const std::string& where);

// Parsed schema documents shipped in docs/ and embedded at build time.
const nlohmann::json& config_schema();
const nlohmann::json& manifest_schema();

} // namespace freent
