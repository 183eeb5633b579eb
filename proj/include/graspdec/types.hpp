#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graspdec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kNumChannels = 8;
inline constexpr double kPaperSampleRateHz = 250.0;

// ---------------------------------------------------------------------------
// Montage

struct ChannelPosition {
    double x = 0.0;  // +x toward the right ear
    double y = 0.0;  // +y toward the nasion
};

// 8-channel 10-20 montage. Positions are azimuthal-equidistant projections of
// the standard 10-20 angles onto the unit head disc; Cz projects to the origin.
struct Montage {
    std::vector<std::string> labels;
    std::vector<ChannelPosition> positions;

    int channel_index(std::string_view label) const;  // -1 if absent
};

Montage standard_montage();
const std::vector<std::string>& standard_channel_labels();

// ---------------------------------------------------------------------------
// Bands and phases

enum class BandName { Delta, Theta, Alpha, Beta, Gamma };

struct BandDefinition {
    BandName name;
    double low_hz;
    double high_hz;
};

// The five canonical analysis bands, delta through gamma.
std::vector<BandDefinition> standard_bands();
BandDefinition standard_band(BandName name);

std::string_view band_label(BandName name);  // "delta", "theta", ...
std::optional<BandName> parse_band_label(std::string_view label);

enum class Phase { Observation, Movement };

std::string_view phase_label(Phase phase);  // "observation" / "movement"
std::optional<Phase> parse_phase_label(std::string_view label);

// ---------------------------------------------------------------------------
// Events

enum class EventKind {
    RotationStart,
    GlassesOpaque,
    GlassesTransparent,
    ObservationStart,
    AudioCue,
    MovementEnd,
    BlockStart,
    BlockEnd,
    RestStart,
    RestEnd,
};

enum class ObjectLabel { PowerObject, PrecisionObject, NoObject };

std::string_view event_kind_label(EventKind kind);
std::optional<EventKind> parse_event_kind_label(std::string_view label);
std::string_view object_label_name(ObjectLabel object);
std::optional<ObjectLabel> parse_object_label_name(std::string_view name);

struct EventMarker {
    std::int64_t sample_index = 0;
    EventKind kind = EventKind::BlockStart;
    int trial_id = -1;  // -1 for block / rest events
    ObjectLabel object = ObjectLabel::NoObject;
};

using EventLog = std::vector<EventMarker>;

// ---------------------------------------------------------------------------
// Recording

struct Recording {
    std::string subject_id;
    double sample_rate_hz = kPaperSampleRateHz;
    Montage montage;
    Matrix samples;  // [n_channels x n_samples], microvolts

    Eigen::Index n_channels() const { return samples.rows(); }
    Eigen::Index n_samples() const { return samples.cols(); }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string code;
    std::string message;
};

// Violations break Recording invariants; warnings flag accepted-but-odd
// recordings (currently only a non-250 Hz sample rate).
struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;

    bool valid() const { return violations.empty(); }
    bool empty() const { return violations.empty() && warnings.empty(); }
};

ValidationReport validate_recording(const Recording& rec);

}  // namespace graspdec
