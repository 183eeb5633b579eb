#include "graspdec/topomap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspdec/errors.hpp"

namespace graspdec {

namespace {

constexpr double kCoincidentDistanceSq = 1e-24;

double cell_coord(int index, int resolution) {
    return -1.0 + (index + 0.5) * 2.0 / resolution;
}

int nearest_cell_index(double coord, int resolution) {
    auto idx = static_cast<int>(std::llround((coord + 1.0) * resolution / 2.0 - 0.5));
    return std::clamp(idx, 0, resolution - 1);
}

}  // namespace

Vector scale_pattern(const Eigen::Ref<const Vector>& pattern) {
    double peak = pattern.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) throw InputError("cannot scale an all-zero pattern");
    return pattern * (0.5 / peak);
}

ScalpGrid interpolate_scalp(const Eigen::Ref<const Vector>& scaled, const Montage& montage,
                            int resolution) {
    const auto n_electrodes = static_cast<Eigen::Index>(montage.positions.size());
    if (scaled.size() != n_electrodes) throw InputError("value count does not match montage size");
    if (n_electrodes == 0) throw InputError("montage is empty");
    if (resolution < kMinScalpResolution) {
        throw InputError("scalp grid resolution must be at least " +
                         std::to_string(kMinScalpResolution));
    }

    ScalpGrid grid;
    grid.resolution = resolution;
    grid.values.setConstant(resolution, resolution, std::numeric_limits<double>::quiet_NaN());

    for (int row = 0; row < resolution; ++row) {
        double y = -cell_coord(row, resolution);  // row 0 is the top of the map
        for (int col = 0; col < resolution; ++col) {
            double x = cell_coord(col, resolution);
            if (x * x + y * y > 1.0) continue;

            double weight_sum = 0.0, value_sum = 0.0;
            double exact = std::numeric_limits<double>::quiet_NaN();
            for (Eigen::Index e = 0; e < n_electrodes; ++e) {
                double dx = x - montage.positions[static_cast<std::size_t>(e)].x;
                double dy = y - montage.positions[static_cast<std::size_t>(e)].y;
                double d2 = dx * dx + dy * dy;
                if (d2 < kCoincidentDistanceSq) {
                    exact = scaled[e];
                    break;
                }
                weight_sum += 1.0 / d2;
                value_sum += scaled[e] / d2;
            }
            double v = std::isnan(exact) ? value_sum / weight_sum : exact;
            grid.values(row, col) = std::clamp(v, -0.5, 0.5);
        }
    }

    // Pin each electrode's nearest cell to its exact value so the map is
    // faithful at the measurement sites regardless of resolution.
    for (Eigen::Index e = 0; e < n_electrodes; ++e) {
        const auto& p = montage.positions[static_cast<std::size_t>(e)];
        int col = nearest_cell_index(p.x, resolution);
        int row = nearest_cell_index(-p.y, resolution);
        grid.values(row, col) = scaled[e];
        grid.electrode_overlay.push_back(
            {montage.labels[static_cast<std::size_t>(e)], p.x, p.y, scaled[e]});
    }
    return grid;
}

std::vector<ScalpGrid> export_csp_maps(const CspModel& model, const Montage& montage,
                                       int resolution, bool use_filters) {
    const Matrix& patterns = use_filters ? model.projection.transpose() : model.patterns;
    std::vector<ScalpGrid> grids;
    for (Eigen::Index c = 0; c < patterns.cols(); ++c) {
        ScalpGrid grid = interpolate_scalp(scale_pattern(patterns.col(c)), montage, resolution);
        grid.component = static_cast<int>(c);
        grid.eigenvalue = model.eigenvalues[c];
        grid.selected = std::find(model.selected_indices.begin(), model.selected_indices.end(),
                                  static_cast<int>(c)) != model.selected_indices.end();
        grids.push_back(std::move(grid));
    }
    return grids;
}

}  // namespace graspdec
