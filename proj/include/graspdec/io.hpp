#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graspdec/csp.hpp"
#include "graspdec/eval.hpp"
#include "graspdec/filter.hpp"
#include "graspdec/sim.hpp"
#include "graspdec/topomap.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

using json = nlohmann::json;

inline constexpr std::string_view kToolName = "graspdec";
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Session files: recording CSV + meta JSON + events JSONL + ground truth JSON

void write_recording_csv(const std::filesystem::path& path, const Recording& recording);
void write_meta_json(const std::filesystem::path& path, const Recording& recording);
Recording read_recording(const std::filesystem::path& csv_path,
                         const std::filesystem::path& meta_path);

void write_events_jsonl(const std::filesystem::path& path, const EventLog& events);
EventLog read_events_jsonl(const std::filesystem::path& path);

void write_ground_truth_json(const std::filesystem::path& path, const GroundTruth& truth);

// ---------------------------------------------------------------------------
// Model / filter / feature / accuracy documents

json filter_to_json(const IirFilter& filter);

json csp_model_to_json(const CspModel& model);
CspModel csp_model_from_json(const json& j);

std::string features_to_csv(const std::vector<FeatureVector>& features);

struct SubjectRunResult {
    std::string subject_id;
    std::uint64_t seed = 0;
    double c_parameter = 1.0;
    std::string scheme;
    std::vector<std::tuple<BandName, Phase, double>> entries;  // accuracy percent
};

json subject_result_to_json(const SubjectRunResult& result);
SubjectRunResult subject_result_from_json(const json& j);
SubjectAccuracy to_subject_accuracy(const SubjectRunResult& result);

std::string scalp_grid_to_csv(const ScalpGrid& grid);
json scalp_grid_to_json(const ScalpGrid& grid);

// ---------------------------------------------------------------------------
// Manifest

struct FileDigest {
    std::string name;  // file name relative to the run directory
    std::string sha256;
};

// Every CLI command writes one of these next to its outputs; together with the
// binary it pins everything needed to reproduce the run byte for byte.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    json config;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Small file helpers (throw IoError on failure)

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace graspdec
