#pragma once

#include <complex>
#include <vector>

#include "graspdec/types.hpp"

namespace graspdec {

enum class FilterKind { Notch, Bandpass, Lowpass };

std::string_view filter_kind_label(FilterKind kind);

struct FilterDesignMeta {
    FilterKind kind = FilterKind::Bandpass;
    double low_hz = 0.0;
    double high_hz = 0.0;
    int order = 0;
    double sample_rate_hz = 0.0;
    double quality_factor = 0.0;  // notch only
};

// One biquad, denominator normalized to a0 = 1.
struct SosSection {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

struct IirFilter {
    std::vector<SosSection> sections;
    FilterDesignMeta design_meta;

    int total_order() const { return 2 * static_cast<int>(sections.size()); }
};

// Butterworth design: analog prototype, frequency pre-warp, bilinear
// transform, conjugate-pair grouping into second-order sections. `order` is
// the prototype order (a Bandpass of order n has 2n poles) and must be one of
// {2, 4, 6, 8}. Lowpass designs ignore low_hz.
IirFilter design_butterworth(FilterKind kind, double low_hz, double high_hz, int order,
                             double sample_rate_hz);

// Second-order IIR notch (unit gain at DC and Nyquist, zero at center_hz).
IirFilter design_notch(double center_hz, double sample_rate_hz, double quality_factor = 30.0);

// Single-pass transfer function evaluated at freq_hz. Zero-phase application
// has amplitude response |H|^2 and power gain |H|^4.
std::complex<double> frequency_response(const IirFilter& filter, double freq_hz);

// Pole locations of every section (roots of the denominators).
std::vector<std::complex<double>> filter_poles(const IirFilter& filter);

// Causal single-pass filtering from zero initial state.
Vector sosfilt(const IirFilter& filter, const Eigen::Ref<const Vector>& signal);

// Zero-phase filtering: odd-reflection padding of 3 * (total order + 1)
// samples per end, steady-state initial conditions, one forward and one
// backward pass, averaged with the time-reversed application so that
// filtfilt(f, reverse(x)) == reverse(filtfilt(f, x)) holds exactly.
Vector filtfilt(const IirFilter& filter, const Eigen::Ref<const Vector>& signal);

// filtfilt applied to each row (channel) independently.
Matrix filtfilt_rows(const IirFilter& filter, const Eigen::Ref<const Matrix>& signals);

int filtfilt_min_samples(const IirFilter& filter);

struct FilterBankOutput {
    std::vector<BandDefinition> bands;
    std::vector<Matrix> band_signals;  // same shape as the input, one per band

    const Matrix& band(BandName name) const;
};

// Per-band zero-phase decomposition with 4th-order Butterworth designs; a band
// with low edge 0 (delta) uses a 4th-order low-pass at its high edge.
FilterBankOutput apply_filter_bank(const Eigen::Ref<const Matrix>& signals,
                                   const std::vector<BandDefinition>& bands,
                                   double sample_rate_hz);

// The per-band designs used by apply_filter_bank.
IirFilter design_band_filter(const BandDefinition& band, double sample_rate_hz);

}  // namespace graspdec
