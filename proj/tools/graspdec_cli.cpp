// graspdec: simulate plan-to-grasp EEG sessions, decode grip type with
// filter-bank CSP + linear SVM, and export Table-style reports and scalp maps.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "graspdec/errors.hpp"
#include "graspdec/io.hpp"
#include "graspdec/pipeline.hpp"
#include "graspdec/sim.hpp"
#include "graspdec/topomap.hpp"

namespace fs = std::filesystem;
using namespace graspdec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    if (fs::is_directory(dir, ec)) return;
    // single-level create: a missing parent is an I/O error, not a convenience
    if (!fs::create_directory(dir, ec) || ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " +
                      (ec ? ec.message() : "unknown error"));
    }
}

json double_array(const std::array<std::array<double, 2>, 2>& m) {
    return json{{"power", {{"observation", m[0][0]}, {"movement", m[0][1]}}},
                {"precision", {{"observation", m[1][0]}, {"movement", m[1][1]}}}};
}

json protocol_to_json(const ProtocolConfig& p) {
    json schedule;
    if (p.schedule.kind == ObjectSchedule::Kind::BalancedRandom) {
        schedule = "balanced_random";
    } else {
        schedule = json::array();
        for (ObjectLabel o : p.schedule.fixed) schedule.push_back(object_label_name(o));
    }
    return {{"n_blocks", p.n_blocks},
            {"trials_per_block", p.trials_per_block},
            {"observation_s", p.observation_s},
            {"movement_s", p.movement_s},
            {"rotation_s", p.rotation_s},
            {"rest_between_blocks_s", p.rest_between_blocks_s},
            {"inter_trial_s", p.inter_trial_s},
            {"schedule", schedule},
            {"sample_rate_hz", p.sample_rate_hz}};
}

json ground_truth_config_to_json(const GroundTruthConfig& g) {
    json sources = json::array();
    for (const auto& src : g.sources) {
        json col = json::array();
        for (Eigen::Index i = 0; i < src.mixing_column.size(); ++i) col.push_back(src.mixing_column[i]);
        sources.push_back({{"name", src.name},
                           {"low_hz", src.low_hz},
                           {"high_hz", src.high_hz},
                           {"mixing_column", col},
                           {"amplitude_uv", src.amplitude_uv},
                           {"power_multipliers", double_array(src.power_multipliers)}});
    }
    return {{"sources", sources}, {"noise_sigma_uv", g.noise_sigma_uv}};
}

ProtocolConfig protocol_from_json(const json& j) {
    ProtocolConfig p;
    p.n_blocks = j.value("n_blocks", p.n_blocks);
    p.trials_per_block = j.value("trials_per_block", p.trials_per_block);
    p.observation_s = j.value("observation_s", p.observation_s);
    p.movement_s = j.value("movement_s", p.movement_s);
    p.rotation_s = j.value("rotation_s", p.rotation_s);
    p.rest_between_blocks_s = j.value("rest_between_blocks_s", p.rest_between_blocks_s);
    p.inter_trial_s = j.value("inter_trial_s", p.inter_trial_s);
    p.sample_rate_hz = j.value("sample_rate_hz", p.sample_rate_hz);
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        if (s.is_string()) {
            if (s.get<std::string>() != "balanced_random") {
                throw InputError("unknown schedule '" + s.get<std::string>() + "'");
            }
            p.schedule.kind = ObjectSchedule::Kind::BalancedRandom;
        } else if (s.is_array()) {
            p.schedule.kind = ObjectSchedule::Kind::Fixed;
            for (const auto& entry : s) {
                auto object = parse_object_label_name(entry.get<std::string>());
                if (!object) throw InputError("unknown object label in fixed schedule");
                p.schedule.fixed.push_back(*object);
            }
        } else {
            throw InputError("schedule must be \"balanced_random\" or a list of object labels");
        }
    }
    return p;
}

GroundTruthConfig ground_truth_from_json(const json& j) {
    if (j.contains("preset")) {
        std::string preset = j.at("preset").get<std::string>();
        GroundTruthConfig g;
        if (preset == "alpha_contrast") {
            g = GroundTruthConfig::planted_alpha_contrast(j.value("power_ratio", 4.0));
        } else if (preset == "zero_contrast") {
            g = GroundTruthConfig::zero_contrast();
        } else {
            throw InputError("unknown ground-truth preset '" + preset + "'");
        }
        g.noise_sigma_uv = j.value("noise_sigma_uv", g.noise_sigma_uv);
        return g;
    }
    GroundTruthConfig g;
    g.noise_sigma_uv = j.value("noise_sigma_uv", g.noise_sigma_uv);
    g.sources.clear();
    for (const auto& s : j.at("sources")) {
        SourceSpec spec;
        spec.name = s.value("name", std::string{"source"});
        spec.low_hz = s.at("low_hz").get<double>();
        spec.high_hz = s.at("high_hz").get<double>();
        auto col = s.at("mixing_column").get<std::vector<double>>();
        spec.mixing_column = Eigen::Map<const Vector>(col.data(), static_cast<Eigen::Index>(col.size()));
        spec.amplitude_uv = s.value("amplitude_uv", spec.amplitude_uv);
        if (s.contains("power_multipliers")) {
            const auto& m = s.at("power_multipliers");
            spec.power_multipliers[0][0] = m.at("power").value("observation", 1.0);
            spec.power_multipliers[0][1] = m.at("power").value("movement", 1.0);
            spec.power_multipliers[1][0] = m.at("precision").value("observation", 1.0);
            spec.power_multipliers[1][1] = m.at("precision").value("movement", 1.0);
        }
        g.sources.push_back(std::move(spec));
    }
    return g;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
                 bool seed_given, const std::string& protocol_preset,
                 const std::string& ground_truth_preset, const std::string& subject_flag) {
    ProtocolConfig protocol = protocol_preset == "per-object-50" ? ProtocolConfig::per_object_50()
                                                                 : ProtocolConfig::paper_default();
    GroundTruthConfig truth = ground_truth_preset == "zero-contrast"
                                  ? GroundTruthConfig::zero_contrast()
                                  : GroundTruthConfig::planted_alpha_contrast();
    std::string subject_id = "sim01";

    json config_doc;
    if (!config_path.empty()) {
        config_doc = read_json_file(config_path);
        if (config_doc.contains("protocol")) protocol = protocol_from_json(config_doc.at("protocol"));
        if (config_doc.contains("ground_truth")) truth = ground_truth_from_json(config_doc.at("ground_truth"));
        subject_id = config_doc.value("subject_id", subject_id);
        protocol.seed = config_doc.value("seed", protocol.seed);
    }
    if (seed_given) protocol.seed = seed;
    if (!subject_flag.empty()) subject_id = subject_flag;

    ensure_out_dir(out_dir);
    SessionArtifacts session = simulate_session(protocol, truth, subject_id);

    fs::path dir(out_dir);
    write_recording_csv(dir / "recording.csv", session.recording);
    write_meta_json(dir / "meta.json", session.recording);
    write_events_jsonl(dir / "events.jsonl", session.events);
    write_ground_truth_json(dir / "ground_truth.json", session.ground_truth);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = protocol.seed;
    manifest.config = {{"subject_id", subject_id},
                       {"protocol", protocol_to_json(protocol)},
                       {"ground_truth", ground_truth_config_to_json(truth)}};
    for (const char* name : {"recording.csv", "meta.json", "events.jsonl", "ground_truth.json"}) {
        manifest.outputs.push_back({name, sha256_file(dir / name)});
    }
    write_manifest(dir / "manifest.json", manifest);

    std::cout << "simulated " << protocol.total_trials() << " trials ("
              << session.recording.n_samples() << " samples at " << protocol.sample_rate_hz
              << " Hz) into " << out_dir << "\n";
    return kExitOk;
}

int cmd_pipeline(const std::string& session_dir, const std::string& out_dir,
                 const std::vector<std::string>& band_flags, const std::string& phase_flag,
                 double c_parameter, const std::string& scheme_flag, double test_fraction,
                 int folds, std::uint64_t seed) {
    fs::path session(session_dir);
    Recording recording = read_recording(session / "recording.csv", session / "meta.json");
    EventLog events = read_events_jsonl(session / "events.jsonl");

    PipelineOptions options;
    if (!band_flags.empty()) {
        options.bands.clear();
        for (const auto& flag : band_flags) {
            auto band = parse_band_label(flag);
            if (!band) throw InputError("unknown band '" + flag + "'");
            options.bands.push_back(*band);
        }
    }
    if (phase_flag == "observation") {
        options.phases = {Phase::Observation};
    } else if (phase_flag == "movement") {
        options.phases = {Phase::Movement};
    } else if (phase_flag != "both") {
        throw InputError("--phase must be observation, movement or both");
    }
    options.eval.c_parameter = c_parameter;
    options.eval.seed = seed;
    if (scheme_flag == "holdout") {
        options.eval.scheme = HoldOut{test_fraction, true};
    } else if (scheme_flag == "kfold") {
        options.eval.scheme = KFold{folds, true};
    } else {
        throw InputError("--eval-scheme must be holdout or kfold");
    }

    ensure_out_dir(out_dir);
    PipelineResult result = run_pipeline(recording, events, options);

    fs::path dir(out_dir);
    std::vector<std::string> outputs;

    std::vector<FeatureVector> all_features;
    SubjectRunResult run;
    run.subject_id = recording.subject_id;
    run.seed = seed;
    run.c_parameter = c_parameter;
    run.scheme = scheme_label(options.eval);
    json filters = json::array();
    filters.push_back(filter_to_json(design_notch(options.notch_hz, recording.sample_rate_hz,
                                                  options.notch_q)));
    filters.push_back(filter_to_json(design_butterworth(FilterKind::Bandpass, options.broadband_low_hz,
                                                        options.broadband_high_hz, 4,
                                                        recording.sample_rate_hz)));
    for (const auto& r : result.results) {
        run.entries.emplace_back(r.band.name, r.phase, r.accuracy_percent);
        all_features.insert(all_features.end(), r.features.begin(), r.features.end());
        std::string model_name = "csp_" + std::string(band_label(r.band.name)) + "_" +
                                 std::string(phase_label(r.phase)) + ".json";
        write_json_file(dir / model_name, csp_model_to_json(r.model));
        outputs.push_back(model_name);
    }
    for (BandName band : options.bands) {
        filters.push_back(
            filter_to_json(design_band_filter(standard_band(band), recording.sample_rate_hz)));
    }

    write_text_file(dir / "features.csv", features_to_csv(all_features));
    outputs.push_back("features.csv");
    write_json_file(dir / "accuracy.json", subject_result_to_json(run));
    outputs.push_back("accuracy.json");
    write_json_file(dir / "filters.json", filters);
    outputs.push_back("filters.json");

    if (!result.epoch_errors.empty()) {
        for (const auto& err : result.epoch_errors) {
            std::cerr << "warning: trial " << err.trial_id << ": " << err.message << "\n";
        }
    }

    RunManifest manifest;
    manifest.command = "pipeline";
    manifest.seed = seed;
    json band_names = json::array();
    for (BandName b : options.bands) band_names.push_back(band_label(b));
    json phase_names = json::array();
    for (Phase p : options.phases) phase_names.push_back(phase_label(p));
    manifest.config = {{"bands", band_names},
                       {"phases", phase_names},
                       {"c_parameter", c_parameter},
                       {"scheme", run.scheme},
                       {"notch_hz", options.notch_hz},
                       {"broadband", {options.broadband_low_hz, options.broadband_high_hz}}};
    for (const char* name : {"recording.csv", "meta.json", "events.jsonl"}) {
        manifest.inputs.push_back({name, sha256_file(session / name)});
    }
    std::sort(outputs.begin(), outputs.end());
    for (const auto& name : outputs) manifest.outputs.push_back({name, sha256_file(dir / name)});
    write_manifest(dir / "manifest.json", manifest);

    for (const auto& [band, phase, acc] : run.entries) {
        std::cout << band_label(band) << "/" << phase_label(phase) << ": " << acc << "%\n";
    }
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& accuracy_files, const std::string& format,
               const std::string& out_dir) {
    if (format != "csv" && format != "md") throw InputError("--format must be csv or md");
    std::vector<SubjectAccuracy> subjects;
    for (const auto& file : accuracy_files) {
        subjects.push_back(to_subject_accuracy(subject_result_from_json(read_json_file(file))));
    }
    AccuracyTable table = build_accuracy_table(subjects);
    std::string rendered = format == "csv" ? accuracy_table_to_csv(table)
                                           : accuracy_table_to_markdown(table);
    std::cout << rendered;

    if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        fs::path dir(out_dir);
        std::string name = format == "csv" ? "report.csv" : "report.md";
        write_text_file(dir / name, rendered);

        RunManifest manifest;
        manifest.command = "report";
        manifest.config = {{"format", format}};
        for (const auto& file : accuracy_files) {
            manifest.inputs.push_back({fs::path(file).filename().string(), sha256_file(file)});
        }
        manifest.outputs.push_back({name, sha256_file(dir / name)});
        write_manifest(dir / "manifest.json", manifest);
    }
    return kExitOk;
}

int cmd_topomap(const std::string& model_file, const std::string& out_dir, int resolution,
                bool use_filters) {
    CspModel model = csp_model_from_json(read_json_file(model_file));
    std::vector<ScalpGrid> grids = export_csp_maps(model, standard_montage(), resolution, use_filters);

    ensure_out_dir(out_dir);
    fs::path dir(out_dir);
    std::vector<std::string> outputs;
    json index = json::array();
    for (const auto& grid : grids) {
        std::string stem = "csp_map_" + std::to_string(grid.component);
        write_text_file(dir / (stem + ".csv"), scalp_grid_to_csv(grid));
        write_json_file(dir / (stem + ".json"), scalp_grid_to_json(grid));
        outputs.push_back(stem + ".csv");
        outputs.push_back(stem + ".json");
        index.push_back({{"component", grid.component},
                         {"eigenvalue", grid.eigenvalue},
                         {"selected", grid.selected},
                         {"csv", stem + ".csv"},
                         {"json", stem + ".json"}});
    }
    write_json_file(dir / "maps_index.json",
                    json{{"band", band_label(model.band.name)},
                         {"phase", phase_label(model.phase)},
                         {"resolution", resolution},
                         {"maps", index}});
    outputs.push_back("maps_index.json");

    RunManifest manifest;
    manifest.command = "topomap";
    manifest.config = {{"resolution", resolution}, {"filters", use_filters}};
    manifest.inputs.push_back({fs::path(model_file).filename().string(), sha256_file(model_file)});
    std::sort(outputs.begin(), outputs.end());
    for (const auto& name : outputs) manifest.outputs.push_back({name, sha256_file(dir / name)});
    write_manifest(dir / "manifest.json", manifest);

    std::cout << "wrote " << grids.size() << " scalp maps to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EEG plan-to-grasp decoding: simulation, FBCSP + SVM pipeline, reports"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic session with ground truth");
    std::string sim_config, sim_out, sim_subject;
    std::string sim_protocol_preset = "paper", sim_truth_preset = "alpha-contrast";
    std::uint64_t sim_seed = 0;
    sim->add_option("config", sim_config, "Session config JSON (optional)");
    sim->add_option("-o,--out", sim_out, "Output directory")->required();
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Master seed (overrides config)");
    sim->add_option("--protocol-preset", sim_protocol_preset, "paper | per-object-50")
        ->check(CLI::IsMember({"paper", "per-object-50"}));
    sim->add_option("--ground-truth-preset", sim_truth_preset, "alpha-contrast | zero-contrast")
        ->check(CLI::IsMember({"alpha-contrast", "zero-contrast"}));
    sim->add_option("--subject", sim_subject, "Subject id recorded in meta.json");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "Decode grip type from a session directory");
    std::string pipe_session, pipe_out, pipe_phase = "both", pipe_scheme = "holdout";
    std::vector<std::string> pipe_bands;
    double pipe_c = 1.0, pipe_test_fraction = 0.2;
    int pipe_folds = 5;
    std::uint64_t pipe_seed = 0;
    pipe->add_option("session", pipe_session, "Session directory (from simulate)")->required();
    pipe->add_option("-o,--out", pipe_out, "Output directory")->required();
    pipe->add_option("--bands", pipe_bands, "Subset of delta,theta,alpha,beta,gamma")
        ->delimiter(',');
    pipe->add_option("--phase", pipe_phase, "observation | movement | both");
    pipe->add_option("--c", pipe_c, "SVM soft-margin C");
    pipe->add_option("--eval-scheme", pipe_scheme, "holdout | kfold");
    pipe->add_option("--test-fraction", pipe_test_fraction, "Hold-out test fraction");
    pipe->add_option("--folds", pipe_folds, "k for k-fold");
    pipe->add_option("--seed", pipe_seed, "Evaluation split seed");

    // report
    auto* rep = app.add_subcommand("report", "Combine per-subject accuracies into one table");
    std::vector<std::string> rep_files;
    std::string rep_format = "csv", rep_out;
    rep->add_option("accuracies", rep_files, "accuracy.json files, one per subject")
        ->required()
        ->expected(-1);
    rep->add_option("--format", rep_format, "csv | md");
    rep->add_option("-o,--out", rep_out, "Output directory (also writes a manifest)");

    // topomap
    auto* topo = app.add_subcommand("topomap", "Export CSP scalp-map grids from a model file");
    std::string topo_model, topo_out;
    int topo_resolution = 64;
    bool topo_filters = false;
    topo->add_option("model", topo_model, "csp_*.json model file")->required();
    topo->add_option("-o,--out", topo_out, "Output directory")->required();
    topo->add_option("--resolution", topo_resolution, "Grid resolution (>= 8)");
    topo->add_flag("--filters", topo_filters, "Map filter rows instead of patterns");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) {
            return cmd_simulate(sim_config, sim_out, sim_seed, sim_seed_opt->count() > 0,
                                sim_protocol_preset, sim_truth_preset, sim_subject);
        }
        if (pipe->parsed()) {
            return cmd_pipeline(pipe_session, pipe_out, pipe_bands, pipe_phase, pipe_c, pipe_scheme,
                                pipe_test_fraction, pipe_folds, pipe_seed);
        }
        if (rep->parsed()) return cmd_report(rep_files, rep_format, rep_out);
        if (topo->parsed()) return cmd_topomap(topo_model, topo_out, topo_resolution, topo_filters);
        return kExitInput;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
