#pragma once

#include <vector>

#include "graspdec/epoch.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

// Common Spatial Patterns model for one (band, phase) condition, fitted on
// Power-vs-Precision epochs.
//
// Rows of `projection` (W) are spatial filters sorted by eigenvalue in
// descending order; eigenvalue i is the class-1 (Power) share of the variance
// captured by component i, so W simultaneously diagonalizes both mean class
// covariances and whitens their sum: W (C1 + C2) W^T = I. Columns of
// `patterns` (A = W^{-1}) are the corresponding scalp topographies.
struct CspModel {
    BandDefinition band{BandName::Alpha, 8.0, 13.0};
    Phase phase = Phase::Observation;
    Matrix projection;                 // W: [n_components x n_channels]
    Vector eigenvalues;                // descending, each in [0, 1]
    std::vector<int> selected_indices; // first two and last two components
    Matrix patterns;                   // A = W^{-1}: [n_channels x n_components]
};

// Trace-normalized covariance C = X X^T / tr(X X^T) of one epoch.
Matrix trial_covariance(const Eigen::Ref<const Matrix>& epoch_data);
Matrix trial_covariance(const Epoch& epoch);

// Core fit from mean class covariances: whiten the composite C1 + C2, rotate
// into the eigenbasis of whitened C1, sort by eigenvalue descending. A ridge
// of 1e-8 * tr/n is added when the composite's condition number exceeds 1e10.
CspModel fit_csp_from_covariances(const Eigen::Ref<const Matrix>& class1_cov,
                                  const Eigen::Ref<const Matrix>& class2_cov);

// Fit from two-class epoch sets (>= 2 epochs per class, matching shapes).
CspModel fit_csp(const std::vector<Epoch>& class1_epochs, const std::vector<Epoch>& class2_epochs);

// Z = W X. The epoch must match the model's band and phase.
Matrix project(const CspModel& model, const Epoch& epoch);

struct FeatureVector {
    int trial_id = 0;
    BandDefinition band{BandName::Alpha, 8.0, 13.0};
    Phase phase = Phase::Observation;
    GraspClass grasp_class = GraspClass::Power;
    Eigen::Vector4d values;  // log of variance shares of the selected components
};

// f_j = log(var(z_j) / sum_{k in selected} var(z_k)) for the four selected
// components, ordered by selected index.
FeatureVector log_variance_features(const CspModel& model, const Epoch& epoch);

// The mixing patterns A = W^{-1}; verifies A W = I before returning.
Matrix spatial_patterns(const CspModel& model);

}  // namespace graspdec
