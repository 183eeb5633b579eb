#include "graspdec/epoch.hpp"

#include <algorithm>
#include <cmath>

#include "graspdec/errors.hpp"

namespace graspdec {

std::string_view grasp_class_label(GraspClass grasp) {
    return grasp == GraspClass::Power ? "power" : "precision";
}

GraspClass grasp_class_of(ObjectLabel object) {
    switch (object) {
        case ObjectLabel::PowerObject: return GraspClass::Power;
        case ObjectLabel::PrecisionObject: return GraspClass::Precision;
        case ObjectLabel::NoObject: break;
    }
    throw InputError("NoObject trials carry no grasp class");
}

int epoch_window_samples(double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
    return static_cast<int>(std::llround(2.0 * sample_rate_hz));
}

EpochExtraction extract_epochs(const Eigen::Ref<const Matrix>& signals, const EventLog& events,
                               Phase phase, double sample_rate_hz,
                               std::optional<BandDefinition> band) {
    const int window = epoch_window_samples(sample_rate_hz);
    const Eigen::Index n_samples = signals.cols();

    struct Cue {
        int trial_id;
        std::int64_t sample;
        ObjectLabel object;
    };
    std::vector<Cue> cues;
    for (const auto& ev : events) {
        if (ev.kind == EventKind::AudioCue && ev.trial_id >= 0) {
            cues.push_back({ev.trial_id, ev.sample_index, ev.object});
        }
    }
    std::sort(cues.begin(), cues.end(), [](const Cue& a, const Cue& b) { return a.trial_id < b.trial_id; });

    EpochExtraction out;
    for (const auto& cue : cues) {
        if (cue.object == ObjectLabel::NoObject) continue;
        std::int64_t start = phase == Phase::Observation ? cue.sample - window : cue.sample;
        std::int64_t end = start + window;
        if (start < 0 || end > static_cast<std::int64_t>(n_samples)) {
            out.errors.push_back({cue.trial_id,
                                  "cue at sample " + std::to_string(cue.sample) + " leaves no room for a " +
                                      std::to_string(window) + "-sample " +
                                      std::string(phase_label(phase)) + " window"});
            continue;
        }
        Epoch ep;
        ep.trial_id = cue.trial_id;
        ep.phase = phase;
        ep.grasp_class = grasp_class_of(cue.object);
        ep.band = band;
        ep.data = signals.middleCols(static_cast<Eigen::Index>(start), window);
        out.epochs.push_back(std::move(ep));
    }
    return out;
}

std::pair<std::vector<Epoch>, std::vector<Epoch>> epochs_by_class(const std::vector<Epoch>& epochs) {
    std::pair<std::vector<Epoch>, std::vector<Epoch>> out;
    for (const auto& ep : epochs) {
        (ep.grasp_class == GraspClass::Power ? out.first : out.second).push_back(ep);
    }
    return out;
}

}  // namespace graspdec
