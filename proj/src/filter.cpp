#include "graspdec/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graspdec/errors.hpp"

namespace graspdec {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double prewarp(double freq_hz, double fs) {
    return 2.0 * fs * std::tan(kPi * freq_hz / fs);
}

struct DenominatorPair {
    double sum;      // p + q
    double product;  // p * q
};

// Group poles into conjugate (or real) pairs, each yielding one biquad
// denominator z^2 - (p+q) z + pq. Pairs are ordered with the innermost poles
// first so the accumulated gain lands on the best-conditioned section.
std::vector<DenominatorPair> conjugate_pairs(std::vector<Complex> poles) {
    std::vector<DenominatorPair> pairs;
    while (!poles.empty()) {
        auto top = std::max_element(poles.begin(), poles.end(), [](const Complex& a, const Complex& b) {
            return std::abs(a.imag()) < std::abs(b.imag());
        });
        Complex p = *top;
        poles.erase(top);
        Complex want = std::abs(p.imag()) < 1e-12 ? p : std::conj(p);
        auto mate = std::min_element(poles.begin(), poles.end(), [&](const Complex& a, const Complex& b) {
            return std::abs(a - want) < std::abs(b - want);
        });
        if (mate == poles.end()) throw NumericalError("unpaired pole while grouping sections");
        Complex q = *mate;
        poles.erase(mate);
        pairs.push_back({(p + q).real(), (p * q).real()});
    }
    std::sort(pairs.begin(), pairs.end(), [](const DenominatorPair& a, const DenominatorPair& b) {
        return a.product < b.product;  // |p|^2 ascending
    });
    return pairs;
}

void check_stability(const IirFilter& f) {
    for (const auto& p : filter_poles(f)) {
        if (!(std::abs(p) < 1.0)) throw NumericalError("designed filter has a pole on or outside the unit circle");
    }
    for (const auto& s : f.sections) {
        for (double c : {s.b0, s.b1, s.b2, s.a1, s.a2}) {
            if (!std::isfinite(c)) throw NumericalError("non-finite filter coefficient");
        }
    }
}

struct BiquadState {
    double s0 = 0.0, s1 = 0.0;
};

// Steady-state (direct form II transposed) section states for a unit constant
// input to the cascade; scaled at run time by the first signal sample.
std::vector<BiquadState> steady_state_unit(const IirFilter& f) {
    std::vector<BiquadState> zi(f.sections.size());
    double scale = 1.0;  // DC gain accumulated over preceding sections
    for (std::size_t k = 0; k < f.sections.size(); ++k) {
        const auto& s = f.sections[k];
        double denom = 1.0 + s.a1 + s.a2;
        double g = (s.b0 + s.b1 + s.b2) / denom;
        zi[k].s0 = (g - s.b0) * scale;
        zi[k].s1 = (s.b2 - s.a2 * g) * scale;
        scale *= g;
    }
    return zi;
}

void sosfilt_inplace(const IirFilter& f, Vector& x, const std::vector<BiquadState>* zi_unit,
                     double zi_scale) {
    for (std::size_t k = 0; k < f.sections.size(); ++k) {
        const auto& s = f.sections[k];
        double s0 = zi_unit ? (*zi_unit)[k].s0 * zi_scale : 0.0;
        double s1 = zi_unit ? (*zi_unit)[k].s1 * zi_scale : 0.0;
        for (Eigen::Index t = 0; t < x.size(); ++t) {
            double xt = x[t];
            double yt = s.b0 * xt + s0;
            s0 = s.b1 * xt - s.a1 * yt + s1;
            s1 = s.b2 * xt - s.a2 * yt;
            x[t] = yt;
        }
    }
}

// One forward-backward pass with odd-reflection padding.
Vector filtfilt_once(const IirFilter& f, const Eigen::Ref<const Vector>& x,
                     const std::vector<BiquadState>& zi_unit) {
    const Eigen::Index n = x.size();
    const Eigen::Index pad = filtfilt_min_samples(f) - 1;

    Vector ext(n + 2 * pad);
    for (Eigen::Index i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
    ext.segment(pad, n) = x;
    for (Eigen::Index i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

    sosfilt_inplace(f, ext, &zi_unit, ext[0]);
    ext.reverseInPlace();
    sosfilt_inplace(f, ext, &zi_unit, ext[0]);
    ext.reverseInPlace();
    return ext.segment(pad, n);
}

}  // namespace

std::string_view filter_kind_label(FilterKind kind) {
    switch (kind) {
        case FilterKind::Notch: return "notch";
        case FilterKind::Bandpass: return "bandpass";
        case FilterKind::Lowpass: return "lowpass";
    }
    return "?";
}

IirFilter design_butterworth(FilterKind kind, double low_hz, double high_hz, int order,
                             double sample_rate_hz) {
    if (kind == FilterKind::Notch) throw InputError("use design_notch for notch filters");
    if (!(sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
    if (order != 2 && order != 4 && order != 6 && order != 8) {
        throw InputError("Butterworth order must be one of {2, 4, 6, 8}");
    }
    double nyquist = sample_rate_hz / 2.0;
    if (!(high_hz > 0.0) || !(high_hz < nyquist)) {
        throw InputError("high cutoff must lie in (0, Nyquist)");
    }
    if (kind == FilterKind::Bandpass && (!(low_hz > 0.0) || !(low_hz < high_hz))) {
        throw InputError("bandpass cutoffs must satisfy 0 < low < high");
    }

    const double fs = sample_rate_hz;
    const double k_bilinear = 2.0 * fs;

    // Butterworth prototype poles on the unit left-half circle.
    const int n = order;
    std::vector<Complex> proto;
    for (int k = 1; k <= n; ++k) {
        double theta = kPi * (2.0 * k + n - 1.0) / (2.0 * n);
        proto.emplace_back(std::cos(theta), std::sin(theta));
    }

    std::vector<Complex> analog_poles;
    double analog_gain = 1.0;
    int n_analog_zeros_at_origin = 0;
    if (kind == FilterKind::Lowpass) {
        double wc = prewarp(high_hz, fs);
        for (const auto& p : proto) analog_poles.push_back(p * wc);
        analog_gain = std::pow(wc, n);
    } else {
        double w1 = prewarp(low_hz, fs);
        double w2 = prewarp(high_hz, fs);
        double bw = w2 - w1;
        double w0_sq = w1 * w2;
        for (const auto& p : proto) {
            Complex b = p * (bw / 2.0);
            Complex d = std::sqrt(b * b - w0_sq);
            analog_poles.push_back(b + d);
            analog_poles.push_back(b - d);
        }
        analog_gain = std::pow(bw, n);
        n_analog_zeros_at_origin = n;
    }

    // Bilinear transform of poles; zeros at s=0 map to z=+1 and the remaining
    // zeros at infinity map to z=-1.
    std::vector<Complex> digital_poles;
    Complex gain_num = std::pow(Complex(k_bilinear, 0.0), n_analog_zeros_at_origin);
    Complex gain_den = 1.0;
    for (const auto& s : analog_poles) {
        digital_poles.push_back((k_bilinear + s) / (k_bilinear - s));
        gain_den *= (k_bilinear - s);
    }
    double digital_gain = analog_gain * (gain_num / gain_den).real();

    IirFilter filter;
    filter.design_meta = {kind, kind == FilterKind::Lowpass ? 0.0 : low_hz, high_hz, order, fs, 0.0};

    auto pairs = conjugate_pairs(std::move(digital_poles));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        SosSection sec;
        sec.a1 = -pairs[k].sum;
        sec.a2 = pairs[k].product;
        if (kind == FilterKind::Lowpass) {
            sec.b0 = 1.0; sec.b1 = 2.0; sec.b2 = 1.0;   // (z + 1)^2
        } else {
            sec.b0 = 1.0; sec.b1 = 0.0; sec.b2 = -1.0;  // (z - 1)(z + 1)
        }
        filter.sections.push_back(sec);
    }
    filter.sections.front().b0 *= digital_gain;
    filter.sections.front().b1 *= digital_gain;
    filter.sections.front().b2 *= digital_gain;

    check_stability(filter);
    return filter;
}

IirFilter design_notch(double center_hz, double sample_rate_hz, double quality_factor) {
    if (!(sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
    if (!(center_hz > 0.0) || !(center_hz < sample_rate_hz / 2.0)) {
        throw InputError("notch center must lie in (0, Nyquist)");
    }
    if (!(quality_factor > 0.0)) throw InputError("notch quality factor must be positive");

    double w0 = 2.0 * kPi * center_hz / sample_rate_hz;
    double alpha = std::sin(w0) / (2.0 * quality_factor);
    double a0 = 1.0 + alpha;

    SosSection sec;
    sec.b0 = 1.0 / a0;
    sec.b1 = -2.0 * std::cos(w0) / a0;
    sec.b2 = 1.0 / a0;
    sec.a1 = -2.0 * std::cos(w0) / a0;
    sec.a2 = (1.0 - alpha) / a0;

    IirFilter filter;
    filter.sections.push_back(sec);
    filter.design_meta = {FilterKind::Notch, center_hz, center_hz, 2, sample_rate_hz, quality_factor};
    check_stability(filter);
    return filter;
}

std::complex<double> frequency_response(const IirFilter& filter, double freq_hz) {
    double w = 2.0 * kPi * freq_hz / filter.design_meta.sample_rate_hz;
    Complex z1 = std::polar(1.0, -w);
    Complex z2 = z1 * z1;
    Complex h = 1.0;
    for (const auto& s : filter.sections) {
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
}

std::vector<std::complex<double>> filter_poles(const IirFilter& filter) {
    std::vector<Complex> poles;
    for (const auto& s : filter.sections) {
        Complex disc = std::sqrt(Complex(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
        poles.push_back((-s.a1 + disc) / 2.0);
        poles.push_back((-s.a1 - disc) / 2.0);
    }
    return poles;
}

Vector sosfilt(const IirFilter& filter, const Eigen::Ref<const Vector>& signal) {
    Vector y = signal;
    sosfilt_inplace(filter, y, nullptr, 0.0);
    return y;
}

int filtfilt_min_samples(const IirFilter& filter) {
    return 3 * (filter.total_order() + 1) + 1;
}

Vector filtfilt(const IirFilter& filter, const Eigen::Ref<const Vector>& signal) {
    if (filter.sections.empty()) throw InputError("empty filter");
    const int min_len = filtfilt_min_samples(filter);
    if (signal.size() < min_len) {
        throw InputError("signal too short for zero-phase filtering: need at least " +
                         std::to_string(min_len) + " samples, got " + std::to_string(signal.size()));
    }
    auto zi = steady_state_unit(filter);
    Vector forward = filtfilt_once(filter, signal, zi);
    Vector reversed = filtfilt_once(filter, signal.reverse(), zi);
    return 0.5 * (forward + reversed.reverse());
}

Matrix filtfilt_rows(const IirFilter& filter, const Eigen::Ref<const Matrix>& signals) {
    Matrix out(signals.rows(), signals.cols());
    for (Eigen::Index r = 0; r < signals.rows(); ++r) {
        out.row(r) = filtfilt(filter, signals.row(r).transpose()).transpose();
    }
    return out;
}

const Matrix& FilterBankOutput::band(BandName name) const {
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (bands[i].name == name) return band_signals[i];
    }
    throw InputError("band not present in filter bank output");
}

IirFilter design_band_filter(const BandDefinition& band, double sample_rate_hz) {
    if (band.low_hz <= 0.0) {
        return design_butterworth(FilterKind::Lowpass, 0.0, band.high_hz, 4, sample_rate_hz);
    }
    return design_butterworth(FilterKind::Bandpass, band.low_hz, band.high_hz, 4, sample_rate_hz);
}

FilterBankOutput apply_filter_bank(const Eigen::Ref<const Matrix>& signals,
                                   const std::vector<BandDefinition>& bands,
                                   double sample_rate_hz) {
    FilterBankOutput out;
    out.bands = bands;
    out.band_signals.reserve(bands.size());
    for (const auto& band : bands) {
        if (!(band.high_hz > band.low_hz)) throw InputError("band edges must satisfy low < high");
        if (!(band.high_hz < sample_rate_hz / 2.0)) {
            throw InputError("band high edge must be below Nyquist");
        }
        IirFilter f = design_band_filter(band, sample_rate_hz);
        out.band_signals.push_back(filtfilt_rows(f, signals));
    }
    return out;
}

}  // namespace graspdec
