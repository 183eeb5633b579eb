#include "graspdec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "graspdec/errors.hpp"

namespace graspdec {

int worker_cap() {
    if (const char* env = std::getenv("GRASPDEC_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs fn(i) for i in [0, n) on up to worker_cap() threads. Slot-indexed
// results keep the output independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(worker_cap(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

PipelineResult run_pipeline(const Recording& recording, const EventLog& events,
                            const PipelineOptions& options) {
    ValidationReport report = validate_recording(recording);
    if (!report.valid()) {
        std::string message = "recording failed validation:";
        for (const auto& v : report.violations) message += "\n  [" + v.code + "] " + v.message;
        throw InputError(message);
    }
    if (options.bands.empty() || options.phases.empty()) {
        throw InputError("pipeline needs at least one band and one phase");
    }

    const double fs = recording.sample_rate_hz;
    Matrix cleaned = filtfilt_rows(design_notch(options.notch_hz, fs, options.notch_q),
                                   recording.samples);
    cleaned = filtfilt_rows(design_butterworth(FilterKind::Bandpass, options.broadband_low_hz,
                                               options.broadband_high_hz, 4, fs),
                            cleaned);

    const int n_bands = static_cast<int>(options.bands.size());
    std::vector<std::vector<BandPhaseResult>> band_results(static_cast<std::size_t>(n_bands));
    std::vector<std::vector<TrialExtractionError>> band_errors(static_cast<std::size_t>(n_bands));

    parallel_for(n_bands, [&](int b) {
        BandDefinition band = standard_band(options.bands[static_cast<std::size_t>(b)]);
        Matrix band_signal = filtfilt_rows(design_band_filter(band, fs), cleaned);

        for (Phase phase : options.phases) {
            EpochExtraction extraction = extract_epochs(band_signal, events, phase, fs, band);
            if (phase == options.phases.front()) {
                band_errors[static_cast<std::size_t>(b)] = extraction.errors;
            }

            BandPhaseResult result;
            result.band = band;
            result.phase = phase;
            result.accuracy_percent = evaluate_epochs(extraction.epochs, options.eval);

            auto [power, precision] = epochs_by_class(extraction.epochs);
            result.model = fit_csp(power, precision);
            result.features.reserve(extraction.epochs.size());
            for (const auto& ep : extraction.epochs) {
                result.features.push_back(log_variance_features(result.model, ep));
            }
            band_results[static_cast<std::size_t>(b)].push_back(std::move(result));
        }
    });

    PipelineResult out;
    for (int b = 0; b < n_bands; ++b) {
        for (auto& r : band_results[static_cast<std::size_t>(b)]) out.results.push_back(std::move(r));
        for (auto& e : band_errors[static_cast<std::size_t>(b)]) out.epoch_errors.push_back(e);
    }
    return out;
}

}  // namespace graspdec
