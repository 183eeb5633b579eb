#include "graspdec/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "graspdec/epoch.hpp"
#include "graspdec/errors.hpp"
#include "graspdec/filter.hpp"

namespace graspdec {

namespace {

std::int64_t to_samples(double seconds, double fs) {
    return std::llround(seconds * fs);
}

constexpr double kLeadInSeconds = 1.0;
constexpr double kTailSeconds = 1.0;

std::vector<ObjectLabel> make_schedule(const ProtocolConfig& config) {
    const int n = config.total_trials();
    if (config.schedule.kind == ObjectSchedule::Kind::Fixed) {
        if (static_cast<int>(config.schedule.fixed.size()) != n) {
            throw InputError("fixed schedule length " + std::to_string(config.schedule.fixed.size()) +
                             " does not match " + std::to_string(n) + " trials");
        }
        return config.schedule.fixed;
    }
    // Balanced within +-1: remainder trials go to the earlier object types.
    std::vector<ObjectLabel> labels;
    const ObjectLabel kinds[] = {ObjectLabel::PowerObject, ObjectLabel::PrecisionObject,
                                 ObjectLabel::NoObject};
    for (int k = 0; k < 3; ++k) {
        int count = n / 3 + (k < n % 3 ? 1 : 0);
        labels.insert(labels.end(), static_cast<std::size_t>(count), kinds[k]);
    }
    Rng rng = substream(config.seed, "schedule");
    rng.shuffle(labels);
    return labels;
}

void validate_protocol(const ProtocolConfig& config) {
    if (config.n_blocks < 1 || config.trials_per_block < 1) {
        throw InputError("protocol needs at least one block of one trial");
    }
    for (double d : {config.observation_s, config.movement_s, config.rotation_s,
                     config.rest_between_blocks_s, config.inter_trial_s}) {
        if (!(d > 0.0)) throw InputError("protocol durations must be positive");
    }
    if (!(config.sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
}

}  // namespace

ProtocolConfig ProtocolConfig::paper_default() { return ProtocolConfig{}; }

ProtocolConfig ProtocolConfig::per_object_50() {
    ProtocolConfig config;
    config.n_blocks = 15;
    config.trials_per_block = 10;
    return config;
}

EventLog run_protocol(const ProtocolConfig& config) {
    validate_protocol(config);
    const double fs = config.sample_rate_hz;
    const std::int64_t rot = to_samples(config.rotation_s, fs);
    const std::int64_t obs = to_samples(config.observation_s, fs);
    const std::int64_t mov = to_samples(config.movement_s, fs);
    const std::int64_t iti = to_samples(config.inter_trial_s, fs);
    const std::int64_t rest = to_samples(config.rest_between_blocks_s, fs);

    const auto schedule = make_schedule(config);

    EventLog events;
    std::int64_t cursor = to_samples(kLeadInSeconds, fs);
    int trial_id = 0;
    for (int block = 0; block < config.n_blocks; ++block) {
        events.push_back({cursor, EventKind::BlockStart, -1, ObjectLabel::NoObject});
        for (int t = 0; t < config.trials_per_block; ++t, ++trial_id) {
            ObjectLabel object = schedule[static_cast<std::size_t>(trial_id)];
            events.push_back({cursor, EventKind::RotationStart, trial_id, object});
            events.push_back({cursor, EventKind::GlassesOpaque, trial_id, object});
            events.push_back({cursor + rot, EventKind::GlassesTransparent, trial_id, object});
            events.push_back({cursor + rot, EventKind::ObservationStart, trial_id, object});
            events.push_back({cursor + rot + obs, EventKind::AudioCue, trial_id, object});
            events.push_back({cursor + rot + obs + mov, EventKind::MovementEnd, trial_id, object});
            cursor += rot + obs + mov + iti;
        }
        events.push_back({cursor, EventKind::BlockEnd, -1, ObjectLabel::NoObject});
        if (block + 1 < config.n_blocks) {
            events.push_back({cursor, EventKind::RestStart, -1, ObjectLabel::NoObject});
            cursor += rest;
            events.push_back({cursor, EventKind::RestEnd, -1, ObjectLabel::NoObject});
        }
    }
    return events;
}

Vector bandlimited_noise(Eigen::Index n_samples, double low_hz, double high_hz,
                         double sample_rate_hz, Rng& rng) {
    Vector white(n_samples);
    for (Eigen::Index i = 0; i < n_samples; ++i) white[i] = rng.normal();
    IirFilter f = design_band_filter({BandName::Alpha, low_hz, high_hz}, sample_rate_hz);
    Vector filtered = filtfilt(f, white);
    double rms = std::sqrt(filtered.squaredNorm() / static_cast<double>(n_samples));
    if (!(rms > 0.0)) throw NumericalError("band-limited noise collapsed to zero");
    return filtered / rms;
}

SessionArtifacts synthesize_eeg(const EventLog& events, const GroundTruthConfig& config,
                                double sample_rate_hz, std::uint64_t seed,
                                const std::string& subject_id) {
    if (events.empty()) throw InputError("cannot synthesize EEG from an empty event log");
    if (config.sources.empty()) throw InputError("ground truth needs at least one source");
    if (config.noise_sigma_uv < 0.0) throw InputError("noise sigma must be non-negative");
    for (const auto& src : config.sources) {
        if (src.mixing_column.size() != kNumChannels) {
            throw InputError("source '" + src.name + "' mixing column must have 8 entries");
        }
        if (!(src.amplitude_uv > 0.0)) throw InputError("source amplitude must be positive");
        for (const auto& row : src.power_multipliers) {
            for (double m : row) {
                if (!(m > 0.0)) throw InputError("power multipliers must be positive");
            }
        }
    }

    const double fs = sample_rate_hz;
    std::int64_t last_sample = 0;
    for (const auto& ev : events) last_sample = std::max(last_sample, ev.sample_index);
    const Eigen::Index n = static_cast<Eigen::Index>(last_sample + to_samples(kTailSeconds, fs));

    // Per-trial modulation windows from the event timeline.
    struct TrialWindows {
        GraspClass grasp;
        std::int64_t observation_start = -1, cue = -1, movement_end = -1;
    };
    std::map<int, TrialWindows> windows;
    for (const auto& ev : events) {
        if (ev.trial_id < 0 || ev.object == ObjectLabel::NoObject) continue;
        auto& w = windows[ev.trial_id];
        w.grasp = grasp_class_of(ev.object);
        if (ev.kind == EventKind::ObservationStart) w.observation_start = ev.sample_index;
        if (ev.kind == EventKind::AudioCue) w.cue = ev.sample_index;
        if (ev.kind == EventKind::MovementEnd) w.movement_end = ev.sample_index;
    }

    GroundTruth truth;
    truth.sources = config.sources;
    truth.noise_sigma_uv = config.noise_sigma_uv;
    truth.noise_seed = substream_seed(seed, "noise");
    truth.mixing_matrix.resize(kNumChannels, static_cast<Eigen::Index>(config.sources.size()));

    Matrix samples = Matrix::Zero(kNumChannels, n);
    for (std::size_t s = 0; s < config.sources.size(); ++s) {
        const auto& spec = config.sources[s];
        std::string stream = "source-" + std::to_string(s);
        truth.source_seeds.push_back(substream_seed(seed, stream));
        Rng rng(truth.source_seeds.back());

        Vector source = bandlimited_noise(n, spec.low_hz, spec.high_hz, fs, rng) * spec.amplitude_uv;
        for (const auto& [trial, w] : windows) {
            if (w.observation_start < 0 || w.cue < 0 || w.movement_end < 0) {
                throw InputError("trial " + std::to_string(trial) + " lacks a complete event sequence");
            }
            const std::size_t g = w.grasp == GraspClass::Power ? 0 : 1;
            double g_obs = std::sqrt(spec.power_multipliers[g][0]);
            double g_mov = std::sqrt(spec.power_multipliers[g][1]);
            auto clamp_idx = [n](std::int64_t v) {
                return std::clamp<std::int64_t>(v, 0, static_cast<std::int64_t>(n));
            };
            std::int64_t obs_lo = clamp_idx(w.observation_start), obs_hi = clamp_idx(w.cue);
            std::int64_t mov_hi = clamp_idx(w.movement_end);
            if (obs_hi > obs_lo) source.segment(obs_lo, obs_hi - obs_lo) *= g_obs;
            if (mov_hi > obs_hi) source.segment(obs_hi, mov_hi - obs_hi) *= g_mov;
        }

        truth.mixing_matrix.col(static_cast<Eigen::Index>(s)) = spec.mixing_column;
        samples.noalias() += spec.mixing_column * source.transpose();
    }

    if (config.noise_sigma_uv > 0.0) {
        Rng noise_rng(truth.noise_seed);
        for (Eigen::Index c = 0; c < samples.rows(); ++c) {
            for (Eigen::Index t = 0; t < samples.cols(); ++t) {
                samples(c, t) += config.noise_sigma_uv * noise_rng.normal();
            }
        }
    }

    Eigen::FullPivLU<Matrix> lu(truth.mixing_matrix);
    if (lu.rank() != truth.mixing_matrix.cols()) {
        throw InputError("mixing matrix must have full column rank");
    }

    SessionArtifacts artifacts;
    artifacts.recording = {subject_id, fs, standard_montage(), std::move(samples)};
    artifacts.events = events;
    artifacts.ground_truth = std::move(truth);
    return artifacts;
}

SessionArtifacts simulate_session(const ProtocolConfig& protocol, const GroundTruthConfig& config,
                                  const std::string& subject_id) {
    return synthesize_eeg(run_protocol(protocol), config, protocol.sample_rate_hz, protocol.seed,
                          subject_id);
}

std::vector<std::pair<int, ObjectLabel>> label_trials(const EventLog& events) {
    static const EventKind kTrialSequence[] = {
        EventKind::RotationStart, EventKind::GlassesOpaque, EventKind::GlassesTransparent,
        EventKind::ObservationStart, EventKind::AudioCue, EventKind::MovementEnd,
    };

    struct TrialState {
        std::size_t next = 0;
        ObjectLabel object = ObjectLabel::NoObject;
        std::int64_t last_sample = -1;
    };
    std::map<int, TrialState> trials;

    auto describe = [](const EventMarker& ev) {
        return std::string(event_kind_label(ev.kind)) + " (trial " + std::to_string(ev.trial_id) +
               ", sample " + std::to_string(ev.sample_index) + ")";
    };

    for (const auto& ev : events) {
        if (ev.trial_id < 0) continue;
        auto& st = trials[ev.trial_id];
        if (st.next >= std::size(kTrialSequence) || ev.kind != kTrialSequence[st.next]) {
            throw InputError("event out of protocol order: " + describe(ev));
        }
        if (st.next == 0) {
            st.object = ev.object;
        } else if (ev.object != st.object) {
            throw InputError("object label changed mid-trial: " + describe(ev));
        }
        if (ev.sample_index < st.last_sample) {
            throw InputError("event timestamps regress: " + describe(ev));
        }
        st.last_sample = ev.sample_index;
        ++st.next;
    }

    std::vector<std::pair<int, ObjectLabel>> labels;
    for (const auto& [trial_id, st] : trials) {
        if (st.next != std::size(kTrialSequence)) {
            throw InputError("trial " + std::to_string(trial_id) + " is missing events after " +
                             std::string(event_kind_label(kTrialSequence[st.next - 1])));
        }
        labels.emplace_back(trial_id, st.object);
    }
    return labels;
}

GroundTruthConfig GroundTruthConfig::planted_alpha_contrast(double power_ratio) {
    if (!(power_ratio > 0.0)) throw InputError("power ratio must be positive");
    GroundTruthConfig config;

    SourceSpec occipital;
    occipital.name = "occipital_alpha";
    occipital.low_hz = 8.0;
    occipital.high_hz = 13.0;
    occipital.mixing_column = Vector(kNumChannels);
    occipital.mixing_column << 0.05, 0.08, 0.08, 0.08, 0.35, 0.75, 1.0, 0.75;
    occipital.mixing_column.normalize();
    occipital.amplitude_uv = 8.0;
    occipital.power_multipliers[0][0] = power_ratio;  // Power trials, observation window

    SourceSpec central;
    central.name = "central_alpha";
    central.low_hz = 8.0;
    central.high_hz = 13.0;
    central.mixing_column = Vector(kNumChannels);
    central.mixing_column << 0.25, 0.8, 1.0, 0.8, 0.3, 0.05, 0.05, 0.05;
    central.mixing_column.normalize();
    central.amplitude_uv = 8.0;
    central.power_multipliers[0][1] = power_ratio;  // Power trials, movement window

    SourceSpec background;
    background.name = "broadband_background";
    background.low_hz = 0.5;
    background.high_hz = 40.0;
    background.mixing_column = Vector(kNumChannels);
    background.mixing_column << 0.6, 0.5, 0.55, 0.5, 0.55, 0.45, 0.5, 0.45;
    background.mixing_column.normalize();
    background.amplitude_uv = 6.0;

    config.sources = {occipital, central, background};
    return config;
}

GroundTruthConfig GroundTruthConfig::zero_contrast() { return planted_alpha_contrast(1.0); }

}  // namespace graspdec
