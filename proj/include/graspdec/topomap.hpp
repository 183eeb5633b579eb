#pragma once

#include <string>
#include <vector>

#include "graspdec/csp.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

inline constexpr int kMinScalpResolution = 8;

struct ElectrodeValue {
    std::string label;
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

// N x N scalp map over the unit head disc. Cells outside the disc are NaN
// ("absent"); in-disc values live in [-0.5, 0.5]. Cell (row, col) is centered
// at x = -1 + (col + 0.5) * 2/N, y = 1 - (row + 0.5) * 2/N.
struct ScalpGrid {
    int resolution = 0;
    Matrix values;
    std::vector<ElectrodeValue> electrode_overlay;
    int component = -1;        // eigenvalue rank, 0-based
    double eigenvalue = 0.0;
    bool selected = false;     // one of the four feature components
};

// Rescale so that max |value| == 0.5; errors on an all-zero pattern.
Vector scale_pattern(const Eigen::Ref<const Vector>& pattern);

// Inverse-distance-weighted (power 2) interpolation of scaled electrode
// values. Exact at electrode locations: each electrode's nearest cell carries
// its value verbatim.
ScalpGrid interpolate_scalp(const Eigen::Ref<const Vector>& scaled, const Montage& montage,
                            int resolution);

// One grid per CSP component, ordered by eigenvalue rank; the four selected
// components are flagged for the four-panel topography figure. With
// use_filters the rows of W are mapped instead of the columns of A.
std::vector<ScalpGrid> export_csp_maps(const CspModel& model, const Montage& montage,
                                       int resolution, bool use_filters = false);

}  // namespace graspdec
