#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "graspdec/rng.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

struct ObjectSchedule {
    enum class Kind { BalancedRandom, Fixed };
    Kind kind = Kind::BalancedRandom;
    std::vector<ObjectLabel> fixed;  // used when kind == Fixed; one entry per trial
};

// Session protocol parameters. Defaults follow the recorded paradigm: 5 blocks
// of 10 trials, 2 s observation, 4 s movement, audio-cue alignment.
struct ProtocolConfig {
    int n_blocks = 5;
    int trials_per_block = 10;
    double observation_s = 2.0;
    double movement_s = 4.0;
    double rotation_s = 3.0;
    double rest_between_blocks_s = 30.0;
    double inter_trial_s = 2.0;
    ObjectSchedule schedule;
    double sample_rate_hz = kPaperSampleRateHz;
    std::uint64_t seed = 0;

    int total_trials() const { return n_blocks * trials_per_block; }

    static ProtocolConfig paper_default();  // 5 x 10 trials
    // 15 x 10 trials: 50 trials per object under the balanced schedule.
    static ProtocolConfig per_object_50();
};

// Deterministic trial/block event log. Per trial: RotationStart,
// GlassesOpaque (the glasses blank during rotation), GlassesTransparent,
// ObservationStart, AudioCue exactly observation_s later, MovementEnd
// movement_s after the cue. Blocks are bracketed by BlockStart/BlockEnd with
// Rest periods in between.
EventLog run_protocol(const ProtocolConfig& config);

// One latent source: band-limited noise mixed into the channels, with its
// power scaled per (grasp class, phase) inside the corresponding trial
// windows. power_multipliers is indexed [grasp][phase] with grasp 0 = Power,
// 1 = Precision and phase 0 = Observation, 1 = Movement.
struct SourceSpec {
    std::string name;
    double low_hz = 8.0;
    double high_hz = 13.0;
    Vector mixing_column;  // length kNumChannels, montage order
    double amplitude_uv = 8.0;
    std::array<std::array<double, 2>, 2> power_multipliers{{{1.0, 1.0}, {1.0, 1.0}}};
};

struct GroundTruthConfig {
    std::vector<SourceSpec> sources;
    double noise_sigma_uv = 2.0;

    // Two alpha sources with opposed class contrast: occipital power modulation
    // during observation and central modulation during movement, over a
    // broadband background source.
    static GroundTruthConfig planted_alpha_contrast(double power_ratio = 4.0);
    static GroundTruthConfig zero_contrast();
};

struct GroundTruth {
    Matrix mixing_matrix;  // [kNumChannels x n_sources]
    std::vector<SourceSpec> sources;
    double noise_sigma_uv = 0.0;
    std::vector<std::uint64_t> source_seeds;
    std::uint64_t noise_seed = 0;
};

struct SessionArtifacts {
    Recording recording;
    EventLog events;
    GroundTruth ground_truth;
};

// X = A S + noise over the event timeline; the retained ground truth makes the
// session a usable oracle for the decoding pipeline.
SessionArtifacts synthesize_eeg(const EventLog& events, const GroundTruthConfig& config,
                                double sample_rate_hz, std::uint64_t seed,
                                const std::string& subject_id);

SessionArtifacts simulate_session(const ProtocolConfig& protocol, const GroundTruthConfig& config,
                                  const std::string& subject_id);

// Per-trial object labels; validates trial event order and consistency and
// names the first offending event otherwise.
std::vector<std::pair<int, ObjectLabel>> label_trials(const EventLog& events);

// White noise filtered into [low_hz, high_hz] (low-pass when low_hz <= 0) and
// normalized to unit RMS; the source process used by synthesize_eeg.
Vector bandlimited_noise(Eigen::Index n_samples, double low_hz, double high_hz,
                         double sample_rate_hz, Rng& rng);

}  // namespace graspdec
