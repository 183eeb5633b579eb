#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "graspdec/types.hpp"

namespace graspdec {

enum class GraspClass { Power, Precision };

std::string_view grasp_class_label(GraspClass grasp);
GraspClass grasp_class_of(ObjectLabel object);  // PowerObject/PrecisionObject only

// One trial's fixed 2 s window for one phase, cut from a continuous (usually
// band-filtered) recording. Observation covers [cue - 2 s, cue), movement
// covers [cue, cue + 2 s); the cue sample belongs to the movement window.
struct Epoch {
    int trial_id = 0;
    Phase phase = Phase::Observation;
    GraspClass grasp_class = GraspClass::Power;
    std::optional<BandDefinition> band;
    Matrix data;  // [n_channels x window_samples], microvolts
};

struct TrialExtractionError {
    int trial_id;
    std::string message;
};

struct EpochExtraction {
    std::vector<Epoch> epochs;                 // ordered by trial_id
    std::vector<TrialExtractionError> errors;  // trials whose window fell out of bounds
};

int epoch_window_samples(double sample_rate_hz);  // round(2.0 * fs)

// Cuts one epoch per Power/Precision trial from a continuous signal matrix.
// NoObject trials are skipped; trials whose window does not fit inside the
// recording are reported per trial without failing the rest.
EpochExtraction extract_epochs(const Eigen::Ref<const Matrix>& signals, const EventLog& events,
                               Phase phase, double sample_rate_hz,
                               std::optional<BandDefinition> band = std::nullopt);

// Stable partition into (power, precision), preserving trial order.
std::pair<std::vector<Epoch>, std::vector<Epoch>> epochs_by_class(const std::vector<Epoch>& epochs);

}  // namespace graspdec
