#include "graspdec/types.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace graspdec {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Azimuthal-equidistant projection of a 10-20 electrode position.
// polar_deg is the angle from the vertex (Cz), azimuth_deg is measured from
// the nasion direction (+y) toward the right ear (+x). The head circumference
// (polar 90 degrees) maps to the unit circle.
ChannelPosition project_1020(double polar_deg, double azimuth_deg) {
    double r = polar_deg / 90.0;
    double az = azimuth_deg * kDegToRad;
    return {r * std::sin(az), r * std::cos(az)};
}

}  // namespace

int Montage::channel_index(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<int>(i);
    }
    return -1;
}

const std::vector<std::string>& standard_channel_labels() {
    static const std::vector<std::string> labels = {"Fz", "C3", "Cz", "C4",
                                                    "Pz", "PO7", "Oz", "PO8"};
    return labels;
}

Montage standard_montage() {
    // 10-20 angles: the midline rows Fz/Pz and the central pair C3/C4 sit 20%
    // of the hemispheric arc (36 degrees) from the vertex; Oz and the PO7/PO8
    // pair lie on the 10% ring (72 degrees), PO7/PO8 at +-144 degrees azimuth.
    Montage m;
    m.labels = standard_channel_labels();
    m.positions = {
        project_1020(36.0, 0.0),     // Fz
        project_1020(36.0, -90.0),   // C3
        {0.0, 0.0},                  // Cz
        project_1020(36.0, 90.0),    // C4
        project_1020(36.0, 180.0),   // Pz
        project_1020(72.0, -144.0),  // PO7
        project_1020(72.0, 180.0),   // Oz
        project_1020(72.0, 144.0),   // PO8
    };
    return m;
}

std::vector<BandDefinition> standard_bands() {
    return {
        {BandName::Delta, 0.0, 4.0},
        {BandName::Theta, 4.0, 8.0},
        {BandName::Alpha, 8.0, 13.0},
        {BandName::Beta, 13.0, 30.0},
        {BandName::Gamma, 30.0, 40.0},
    };
}

BandDefinition standard_band(BandName name) {
    for (const auto& b : standard_bands()) {
        if (b.name == name) return b;
    }
    return standard_bands().front();  // unreachable for valid enum values
}

std::string_view band_label(BandName name) {
    switch (name) {
        case BandName::Delta: return "delta";
        case BandName::Theta: return "theta";
        case BandName::Alpha: return "alpha";
        case BandName::Beta: return "beta";
        case BandName::Gamma: return "gamma";
    }
    return "?";
}

std::optional<BandName> parse_band_label(std::string_view label) {
    for (BandName n : {BandName::Delta, BandName::Theta, BandName::Alpha,
                       BandName::Beta, BandName::Gamma}) {
        if (label == band_label(n)) return n;
    }
    return std::nullopt;
}

std::string_view phase_label(Phase phase) {
    return phase == Phase::Observation ? "observation" : "movement";
}

std::optional<Phase> parse_phase_label(std::string_view label) {
    if (label == "observation") return Phase::Observation;
    if (label == "movement") return Phase::Movement;
    return std::nullopt;
}

std::string_view event_kind_label(EventKind kind) {
    switch (kind) {
        case EventKind::RotationStart: return "RotationStart";
        case EventKind::GlassesOpaque: return "GlassesOpaque";
        case EventKind::GlassesTransparent: return "GlassesTransparent";
        case EventKind::ObservationStart: return "ObservationStart";
        case EventKind::AudioCue: return "AudioCue";
        case EventKind::MovementEnd: return "MovementEnd";
        case EventKind::BlockStart: return "BlockStart";
        case EventKind::BlockEnd: return "BlockEnd";
        case EventKind::RestStart: return "RestStart";
        case EventKind::RestEnd: return "RestEnd";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind_label(std::string_view label) {
    for (EventKind k :
         {EventKind::RotationStart, EventKind::GlassesOpaque, EventKind::GlassesTransparent,
          EventKind::ObservationStart, EventKind::AudioCue, EventKind::MovementEnd,
          EventKind::BlockStart, EventKind::BlockEnd, EventKind::RestStart, EventKind::RestEnd}) {
        if (label == event_kind_label(k)) return k;
    }
    return std::nullopt;
}

std::string_view object_label_name(ObjectLabel object) {
    switch (object) {
        case ObjectLabel::PowerObject: return "PowerObject";
        case ObjectLabel::PrecisionObject: return "PrecisionObject";
        case ObjectLabel::NoObject: return "NoObject";
    }
    return "?";
}

std::optional<ObjectLabel> parse_object_label_name(std::string_view name) {
    for (ObjectLabel o : {ObjectLabel::PowerObject, ObjectLabel::PrecisionObject,
                          ObjectLabel::NoObject}) {
        if (name == object_label_name(o)) return o;
    }
    return std::nullopt;
}

ValidationReport validate_recording(const Recording& rec) {
    ValidationReport report;
    auto violation = [&report](std::string code, std::string message) {
        report.violations.push_back({std::move(code), std::move(message)});
    };

    if (rec.n_channels() != kNumChannels) {
        violation("channel_count", "expected " + std::to_string(kNumChannels) +
                                       " channels, got " + std::to_string(rec.n_channels()));
    }
    if (rec.montage.labels != standard_channel_labels()) {
        violation("montage_labels", "montage labels differ from the standard 8-channel layout");
    }
    if (rec.montage.labels.size() != rec.montage.positions.size()) {
        violation("montage_positions", "montage label/position count mismatch");
    }
    std::set<std::string> unique(rec.montage.labels.begin(), rec.montage.labels.end());
    if (unique.size() != rec.montage.labels.size()) {
        violation("montage_duplicate_labels", "montage contains duplicate channel labels");
    }
    if (static_cast<Eigen::Index>(rec.montage.labels.size()) != rec.n_channels()) {
        violation("montage_channel_count", "montage size does not match sample matrix rows");
    }
    for (const auto& p : rec.montage.positions) {
        if (p.x * p.x + p.y * p.y > 1.0 + 1e-12) {
            violation("montage_outside_head", "electrode position outside the unit head circle");
            break;
        }
    }
    if (!(rec.sample_rate_hz > 0.0)) {
        violation("sample_rate", "sample rate must be positive");
    }

    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
        for (Eigen::Index s = 0; s < rec.n_samples(); ++s) {
            if (!std::isfinite(rec.samples(c, s))) {
                std::string label = c < static_cast<Eigen::Index>(rec.montage.labels.size())
                                        ? rec.montage.labels[static_cast<std::size_t>(c)]
                                        : ("#" + std::to_string(c));
                violation("nonfinite_sample", "non-finite sample at channel " + label +
                                                  " (row " + std::to_string(c) + "), sample index " +
                                                  std::to_string(s));
                goto done_samples;  // one violation per recording is enough to pinpoint
            }
        }
    }
done_samples:

    if (rec.sample_rate_hz > 0.0 && rec.sample_rate_hz != kPaperSampleRateHz) {
        report.warnings.push_back(
            {"nonstandard_rate", "sample rate " + std::to_string(rec.sample_rate_hz) +
                                     " Hz differs from the 250 Hz acquisition rate"});
    }
    return report;
}

}  // namespace graspdec
