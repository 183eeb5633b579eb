#pragma once

#include <vector>

#include "graspdec/csp.hpp"
#include "graspdec/epoch.hpp"
#include "graspdec/eval.hpp"
#include "graspdec/filter.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

// Full decode over one session: notch, 0.5-40 Hz broadband, per-band
// zero-phase filtering, 2 s epochs around each cue, leakage-safe CSP + SVM
// evaluation per (band, phase), plus a full-data CSP fit per condition for
// topography export.
struct PipelineOptions {
    std::vector<BandName> bands{BandName::Delta, BandName::Theta, BandName::Alpha, BandName::Beta,
                                BandName::Gamma};
    std::vector<Phase> phases{Phase::Observation, Phase::Movement};
    EvaluationConfig eval;
    double notch_hz = 60.0;
    double notch_q = 30.0;
    double broadband_low_hz = 0.5;
    double broadband_high_hz = 40.0;
};

struct BandPhaseResult {
    BandDefinition band{BandName::Alpha, 8.0, 13.0};
    Phase phase = Phase::Observation;
    double accuracy_percent = 0.0;
    CspModel model;                      // fitted on every epoch of the condition
    std::vector<FeatureVector> features; // derived from that full fit
};

struct PipelineResult {
    std::vector<BandPhaseResult> results;
    std::vector<TrialExtractionError> epoch_errors;
};

// Throws InputError when the recording fails validation (message lists every
// violation) and propagates evaluation errors.
PipelineResult run_pipeline(const Recording& recording, const EventLog& events,
                            const PipelineOptions& options);

// Worker cap for per-band parallelism; honors the GRASPDEC_THREADS variable.
int worker_cap();

}  // namespace graspdec
