#include "graspdec/csp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "graspdec/errors.hpp"

namespace graspdec {

namespace {

Matrix mean_normalized_covariance(const std::vector<Epoch>& epochs) {
    Matrix acc = Matrix::Zero(epochs.front().data.rows(), epochs.front().data.rows());
    for (const auto& ep : epochs) acc += trial_covariance(ep);
    return acc / static_cast<double>(epochs.size());
}

// Deterministic sign convention: the largest-magnitude entry of every filter
// row is positive. Patterns flip with their filters so A W = I is preserved.
void fix_signs(Matrix& w, Matrix& a) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        Eigen::Index j;
        w.row(i).cwiseAbs().maxCoeff(&j);
        if (w(i, j) < 0.0) {
            w.row(i) = -w.row(i);
            a.col(i) = -a.col(i);
        }
    }
}

}  // namespace

Matrix trial_covariance(const Eigen::Ref<const Matrix>& epoch_data) {
    Matrix c = epoch_data * epoch_data.transpose();
    double tr = c.trace();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
        throw NumericalError("degenerate trial: epoch has no signal energy");
    }
    return c / tr;
}

Matrix trial_covariance(const Epoch& epoch) { return trial_covariance(epoch.data); }

CspModel fit_csp_from_covariances(const Eigen::Ref<const Matrix>& class1_cov,
                                  const Eigen::Ref<const Matrix>& class2_cov) {
    const Eigen::Index n = class1_cov.rows();
    if (class1_cov.cols() != n || class2_cov.rows() != n || class2_cov.cols() != n) {
        throw InputError("class covariances must be square and equally sized");
    }

    Matrix composite = class1_cov + class2_cov;
    composite = 0.5 * (composite + composite.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Matrix> comp_eig(composite);
    if (comp_eig.info() != Eigen::Success) throw NumericalError("composite covariance eigendecomposition failed");
    double d_max = comp_eig.eigenvalues().maxCoeff();
    double d_min = comp_eig.eigenvalues().minCoeff();
    if (!(d_max > 0.0)) throw NumericalError("composite covariance is not positive");
    if (d_min <= 0.0 || d_max / d_min > 1e10) {
        double ridge = 1e-8 * composite.trace() / static_cast<double>(n);
        composite.diagonal().array() += ridge;
        comp_eig.compute(composite);
        d_min = comp_eig.eigenvalues().minCoeff();
        if (!(d_min > 0.0)) throw NumericalError("composite covariance is singular even after ridge");
    }

    // Whitening P: P (C1 + C2) P^T = I
    Matrix whitener = comp_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                      comp_eig.eigenvectors().transpose();

    Matrix s1 = whitener * class1_cov * whitener.transpose();
    s1 = 0.5 * (s1 + s1.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> rot_eig(s1);
    if (rot_eig.info() != Eigen::Success) throw NumericalError("whitened covariance eigendecomposition failed");

    // Eigen returns ascending order; CSP convention is descending.
    CspModel model;
    model.projection.resize(n, n);
    model.eigenvalues.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index src = n - 1 - i;
        model.projection.row(i) = rot_eig.eigenvectors().col(src).transpose() * whitener;
        model.eigenvalues[i] = std::clamp(rot_eig.eigenvalues()[src], 0.0, 1.0);
    }

    // A = W^{-1} = U D^{1/2} V with the same reordering
    Matrix unwhitener = comp_eig.eigenvectors() * comp_eig.eigenvalues().cwiseSqrt().asDiagonal();
    model.patterns.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        model.patterns.col(i) = unwhitener * rot_eig.eigenvectors().col(n - 1 - i);
    }

    fix_signs(model.projection, model.patterns);

    model.selected_indices = {0, 1, static_cast<int>(n) - 2, static_cast<int>(n) - 1};
    return model;
}

CspModel fit_csp(const std::vector<Epoch>& class1_epochs, const std::vector<Epoch>& class2_epochs) {
    if (class1_epochs.size() < 2 || class2_epochs.size() < 2) {
        throw InputError("CSP needs at least 2 epochs per class");
    }
    const auto& ref = class1_epochs.front();
    auto same_condition = [&](const Epoch& ep) {
        bool band_ok = ep.band.has_value() == ref.band.has_value() &&
                       (!ref.band || ep.band->name == ref.band->name);
        return band_ok && ep.phase == ref.phase && ep.data.rows() == ref.data.rows() &&
               ep.data.cols() == ref.data.cols();
    };
    for (const auto* set : {&class1_epochs, &class2_epochs}) {
        for (const auto& ep : *set) {
            if (!same_condition(ep)) throw InputError("epochs must share band, phase and shape");
        }
    }

    CspModel model = fit_csp_from_covariances(mean_normalized_covariance(class1_epochs),
                                              mean_normalized_covariance(class2_epochs));
    if (ref.band) model.band = *ref.band;
    model.phase = ref.phase;
    return model;
}

Matrix project(const CspModel& model, const Epoch& epoch) {
    if (epoch.data.rows() != model.projection.cols()) {
        throw InputError("epoch channel count does not match the CSP model");
    }
    if (epoch.band && epoch.band->name != model.band.name) {
        throw InputError("epoch band does not match the CSP model");
    }
    if (epoch.phase != model.phase) {
        throw InputError("epoch phase does not match the CSP model");
    }
    return model.projection * epoch.data;
}

FeatureVector log_variance_features(const CspModel& model, const Epoch& epoch) {
    Matrix z = project(model, epoch);

    Eigen::Vector4d variances;
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        int idx = model.selected_indices[static_cast<std::size_t>(k)];
        variances[k] = z.row(idx).squaredNorm();
        total += variances[k];
    }
    if (!(total > 0.0)) throw NumericalError("degenerate trial: selected components carry no variance");

    FeatureVector fv;
    fv.trial_id = epoch.trial_id;
    fv.band = model.band;
    fv.phase = model.phase;
    fv.grasp_class = epoch.grasp_class;
    for (int k = 0; k < 4; ++k) fv.values[k] = std::log(variances[k] / total);
    return fv;
}

Matrix spatial_patterns(const CspModel& model) {
    double err = (model.patterns * model.projection - Matrix::Identity(model.patterns.rows(), model.patterns.rows()))
                     .cwiseAbs()
                     .maxCoeff();
    if (!(err < 1e-6)) throw NumericalError("CSP patterns are not the inverse of the projection");
    return model.patterns;
}

}  // namespace graspdec
