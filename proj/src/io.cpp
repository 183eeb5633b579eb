#include "graspdec/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "graspdec/errors.hpp"

namespace graspdec {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw InputError("malformed number '" + s + "' in " + context);
    }
    return v;
}

json matrix_to_json(const Eigen::Ref<const Matrix>& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("expected a non-empty matrix");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j.front().size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw InputError("ragged matrix rows");
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

json vector_to_json(const Eigen::Ref<const Vector>& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Basic file helpers

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw InputError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Session files

void write_recording_csv(const std::filesystem::path& path, const Recording& recording) {
    std::string out = "sample";
    for (const auto& label : recording.montage.labels) out += "," + label;
    out += "\n";
    for (Eigen::Index s = 0; s < recording.n_samples(); ++s) {
        out += std::to_string(s);
        for (Eigen::Index c = 0; c < recording.n_channels(); ++c) {
            out += "," + format_double(recording.samples(c, s));
        }
        out += "\n";
    }
    write_text_file(path, out);
}

void write_meta_json(const std::filesystem::path& path, const Recording& recording) {
    write_json_file(path, json{{"subject_id", recording.subject_id},
                               {"sample_rate_hz", recording.sample_rate_hz}});
}

Recording read_recording(const std::filesystem::path& csv_path,
                         const std::filesystem::path& meta_path) {
    json meta = read_json_file(meta_path);
    Recording rec;
    rec.subject_id = meta.at("subject_id").get<std::string>();
    rec.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    rec.montage = standard_montage();

    std::istringstream in(read_text_file(csv_path));
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty recording CSV '" + csv_path.string() + "'");
    auto header = split_csv_line(line);
    if (header.empty() || header.front() != "sample") {
        throw InputError("recording CSV must start with a 'sample' column");
    }
    const auto n_channels = static_cast<Eigen::Index>(header.size()) - 1;

    std::vector<std::vector<double>> columns(static_cast<std::size_t>(n_channels));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (static_cast<Eigen::Index>(fields.size()) != n_channels + 1) {
            throw InputError("row " + std::to_string(line_no) + " of '" + csv_path.string() +
                          "' has " + std::to_string(fields.size()) + " fields");
        }
        for (Eigen::Index c = 0; c < n_channels; ++c) {
            columns[static_cast<std::size_t>(c)].push_back(parse_double(
                fields[static_cast<std::size_t>(c + 1)], "recording CSV row " + std::to_string(line_no)));
        }
    }

    const auto n_samples = static_cast<Eigen::Index>(columns.empty() ? 0 : columns.front().size());
    rec.samples.resize(n_channels, n_samples);
    for (Eigen::Index c = 0; c < n_channels; ++c) {
        for (Eigen::Index s = 0; s < n_samples; ++s) {
            rec.samples(c, s) = columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)];
        }
    }
    // montage labels follow the CSV header so validation can flag mismatches
    rec.montage.labels.assign(header.begin() + 1, header.end());
    if (rec.montage.labels == standard_channel_labels()) {
        rec.montage = standard_montage();
    }
    return rec;
}

void write_events_jsonl(const std::filesystem::path& path, const EventLog& events) {
    std::string out;
    for (const auto& ev : events) {
        json j{{"sample_index", ev.sample_index},
               {"kind", event_kind_label(ev.kind)},
               {"trial_id", ev.trial_id},
               {"object", object_label_name(ev.object)}};
        out += j.dump() + "\n";
    }
    write_text_file(path, out);
}

EventLog read_events_jsonl(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    EventLog events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError("invalid JSON on line " + std::to_string(line_no) + " of '" +
                             path.string() + "': " + e.what());
        }
        EventMarker ev;
        ev.sample_index = j.at("sample_index").get<std::int64_t>();
        ev.trial_id = j.at("trial_id").get<int>();
        auto kind = parse_event_kind_label(j.at("kind").get<std::string>());
        auto object = parse_object_label_name(j.at("object").get<std::string>());
        if (!kind || !object) {
            throw InputError("unknown event kind or object on line " + std::to_string(line_no) +
                          " of '" + path.string() + "'");
        }
        ev.kind = *kind;
        ev.object = *object;
        events.push_back(ev);
    }
    return events;
}

void write_ground_truth_json(const std::filesystem::path& path, const GroundTruth& truth) {
    json sources = json::array();
    for (const auto& src : truth.sources) {
        sources.push_back(
            {{"name", src.name},
             {"low_hz", src.low_hz},
             {"high_hz", src.high_hz},
             {"mixing_column", vector_to_json(src.mixing_column)},
             {"amplitude_uv", src.amplitude_uv},
             {"power_multipliers",
              {{"power",
                {{"observation", src.power_multipliers[0][0]}, {"movement", src.power_multipliers[0][1]}}},
               {"precision",
                {{"observation", src.power_multipliers[1][0]},
                 {"movement", src.power_multipliers[1][1]}}}}}});
    }
    write_json_file(path, json{{"mixing_matrix", matrix_to_json(truth.mixing_matrix)},
                               {"sources", sources},
                               {"noise_sigma_uv", truth.noise_sigma_uv},
                               {"source_seeds", truth.source_seeds},
                               {"noise_seed", truth.noise_seed}});
}

// ---------------------------------------------------------------------------
// Model / filter / feature / accuracy documents

json filter_to_json(const IirFilter& filter) {
    json sections = json::array();
    for (const auto& s : filter.sections) {
        sections.push_back({{"b", {s.b0, s.b1, s.b2}}, {"a", {1.0, s.a1, s.a2}}});
    }
    const auto& meta = filter.design_meta;
    return {{"design_meta",
             {{"kind", filter_kind_label(meta.kind)},
              {"low_hz", meta.low_hz},
              {"high_hz", meta.high_hz},
              {"order", meta.order},
              {"sample_rate_hz", meta.sample_rate_hz},
              {"quality_factor", meta.quality_factor}}},
            {"sections", sections}};
}

json csp_model_to_json(const CspModel& model) {
    return {{"band",
             {{"name", band_label(model.band.name)},
              {"low_hz", model.band.low_hz},
              {"high_hz", model.band.high_hz}}},
            {"phase", phase_label(model.phase)},
            {"projection", matrix_to_json(model.projection)},
            {"eigenvalues", vector_to_json(model.eigenvalues)},
            {"selected_indices", model.selected_indices},
            {"patterns", matrix_to_json(model.patterns)}};
}

CspModel csp_model_from_json(const json& j) {
    CspModel model;
    auto band_name = parse_band_label(j.at("band").at("name").get<std::string>());
    auto phase = parse_phase_label(j.at("phase").get<std::string>());
    if (!band_name || !phase) throw InputError("CSP model document has an unknown band or phase");
    model.band = {*band_name, j.at("band").at("low_hz").get<double>(),
                  j.at("band").at("high_hz").get<double>()};
    model.phase = *phase;
    model.projection = matrix_from_json(j.at("projection"));
    model.eigenvalues = vector_from_json(j.at("eigenvalues"));
    model.selected_indices = j.at("selected_indices").get<std::vector<int>>();
    model.patterns = matrix_from_json(j.at("patterns"));
    if (model.projection.rows() != model.projection.cols() ||
        model.patterns.rows() != model.projection.rows() ||
        model.eigenvalues.size() != model.projection.rows()) {
        throw InputError("CSP model document has inconsistent shapes");
    }
    return model;
}

std::string features_to_csv(const std::vector<FeatureVector>& features) {
    std::string out = "trial_id,band,phase,class,f0,f1,f2,f3\n";
    for (const auto& fv : features) {
        out += std::to_string(fv.trial_id);
        out += ",";
        out += band_label(fv.band.name);
        out += ",";
        out += phase_label(fv.phase);
        out += ",";
        out += grasp_class_label(fv.grasp_class);
        for (int k = 0; k < 4; ++k) out += "," + format_double(fv.values[k]);
        out += "\n";
    }
    return out;
}

json subject_result_to_json(const SubjectRunResult& result) {
    json entries = json::array();
    for (const auto& [band, phase, accuracy] : result.entries) {
        entries.push_back({{"band", band_label(band)},
                           {"phase", phase_label(phase)},
                           {"accuracy_percent", accuracy}});
    }
    return {{"subject_id", result.subject_id},
            {"seed", result.seed},
            {"c_parameter", result.c_parameter},
            {"scheme", result.scheme},
            {"entries", entries}};
}

SubjectRunResult subject_result_from_json(const json& j) {
    SubjectRunResult result;
    result.subject_id = j.at("subject_id").get<std::string>();
    result.seed = j.value("seed", std::uint64_t{0});
    result.c_parameter = j.value("c_parameter", 1.0);
    result.scheme = j.value("scheme", std::string{});
    for (const auto& e : j.at("entries")) {
        auto band = parse_band_label(e.at("band").get<std::string>());
        auto phase = parse_phase_label(e.at("phase").get<std::string>());
        if (!band || !phase) throw InputError("accuracy document has an unknown band or phase");
        result.entries.emplace_back(*band, *phase, e.at("accuracy_percent").get<double>());
    }
    return result;
}

SubjectAccuracy to_subject_accuracy(const SubjectRunResult& result) {
    SubjectAccuracy acc;
    acc.subject_id = result.subject_id;
    for (const auto& [band, phase, accuracy] : result.entries) {
        acc.cells[{phase, band}] = accuracy;
    }
    return acc;
}

std::string scalp_grid_to_csv(const ScalpGrid& grid) {
    std::string out = "resolution,component,eigenvalue,selected\n";
    out += std::to_string(grid.resolution) + "," + std::to_string(grid.component) + "," +
           format_double(grid.eigenvalue) + "," + (grid.selected ? "1" : "0") + "\n";
    out += "grid\n";
    for (Eigen::Index r = 0; r < grid.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.values.cols(); ++c) {
            if (c > 0) out += ",";
            double v = grid.values(r, c);
            if (!std::isnan(v)) out += format_double(v);  // absent cells stay empty
        }
        out += "\n";
    }
    out += "electrodes\n";
    for (const auto& e : grid.electrode_overlay) {
        out += e.label + "," + format_double(e.x) + "," + format_double(e.y) + "," +
               format_double(e.value) + "\n";
    }
    return out;
}

json scalp_grid_to_json(const ScalpGrid& grid) {
    json values = json::array();
    for (Eigen::Index r = 0; r < grid.values.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < grid.values.cols(); ++c) {
            double v = grid.values(r, c);
            if (std::isnan(v)) {
                row.push_back(nullptr);
            } else {
                row.push_back(v);
            }
        }
        values.push_back(std::move(row));
    }
    json electrodes = json::array();
    for (const auto& e : grid.electrode_overlay) {
        electrodes.push_back({{"label", e.label}, {"x", e.x}, {"y", e.y}, {"value", e.value}});
    }
    return {{"resolution", grid.resolution},
            {"component", grid.component},
            {"eigenvalue", grid.eigenvalue},
            {"selected", grid.selected},
            {"values", values},
            {"electrodes", electrodes}};
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), self-contained so manifests need no crypto library.

namespace {

struct Sha256 {
    std::array<std::uint32_t, 8> h{0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                   0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::array<unsigned char, 64> block{};
    std::size_t block_len = 0;
    std::uint64_t total_bits = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process() {
        static constexpr std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i) {
            w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                   (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto a = h;
        for (int i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(a[4], 6) ^ rotr(a[4], 11) ^ rotr(a[4], 25);
            std::uint32_t ch = (a[4] & a[5]) ^ (~a[4] & a[6]);
            std::uint32_t temp1 = a[7] + s1 + ch + k[i] + w[i];
            std::uint32_t s0 = rotr(a[0], 2) ^ rotr(a[0], 13) ^ rotr(a[0], 22);
            std::uint32_t maj = (a[0] & a[1]) ^ (a[0] & a[2]) ^ (a[1] & a[2]);
            std::uint32_t temp2 = s0 + maj;
            a[7] = a[6];
            a[6] = a[5];
            a[5] = a[4];
            a[4] = a[3] + temp1;
            a[3] = a[2];
            a[2] = a[1];
            a[1] = a[0];
            a[0] = temp1 + temp2;
        }
        for (int i = 0; i < 8; ++i) h[static_cast<std::size_t>(i)] += a[static_cast<std::size_t>(i)];
    }

    void update(const unsigned char* data, std::size_t len) {
        total_bits += std::uint64_t(len) * 8;
        for (std::size_t i = 0; i < len; ++i) {
            block[block_len++] = data[i];
            if (block_len == 64) {
                process();
                block_len = 0;
            }
        }
    }

    std::string finish() {
        std::uint64_t bits = total_bits;
        unsigned char pad = 0x80;
        update(&pad, 1);
        unsigned char zero = 0;
        while (block_len != 56) update(&zero, 1);
        for (int i = 7; i >= 0; --i) {
            unsigned char b = static_cast<unsigned char>(bits >> (8 * i));
            update(&b, 1);
        }
        static const char* hex = "0123456789abcdef";
        std::string out;
        for (std::uint32_t v : h) {
            for (int shift = 28; shift >= 0; shift -= 4) out += hex[(v >> shift) & 0xf];
        }
        return out;
    }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 hash;
    hash.update(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
    return hash.finish();
}

std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(read_text_file(path));
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    auto digests = [](const std::vector<FileDigest>& files) {
        json arr = json::array();
        for (const auto& f : files) arr.push_back({{"name", f.name}, {"sha256", f.sha256}});
        return arr;
    };
    write_json_file(path, json{{"tool", kToolName},
                               {"version", kToolVersion},
                               {"command", manifest.command},
                               {"seed", manifest.seed},
                               {"config", manifest.config},
                               {"inputs", digests(manifest.inputs)},
                               {"outputs", digests(manifest.outputs)}});
}

}  // namespace graspdec
