#pragma once

#include <vector>

#include "graspdec/csp.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

// Power = +1, Precision = -1.
inline constexpr int kPowerLabel = 1;
inline constexpr int kPrecisionLabel = -1;

int class_sign(GraspClass grasp);

// Soft-margin linear SVM in the 4-dimensional CSP feature space.
struct SvmModel {
    Eigen::Vector4d weights = Eigen::Vector4d::Zero();
    double bias = 0.0;
    double c_parameter = 1.0;
    Vector dual_coefficients;  // alpha_i in [0, C], one per training sample
};

// Solves the soft-margin dual (box [0, C], sum alpha_i y_i = 0) by maximal
// violating pair coordinate updates with deterministic index-order tie
// breaking. Throws on single-class input, non-finite features, or failure to
// reach the KKT tolerance.
SvmModel train_svm(const Eigen::Ref<const Matrix>& features, const std::vector<int>& labels,
                   double c_parameter);
SvmModel train_svm(const std::vector<FeatureVector>& features, double c_parameter);

double decision_value(const SvmModel& model, const Eigen::Ref<const Eigen::Vector4d>& x);

// sign(w . x + b); a value of exactly zero resolves to Power.
GraspClass predict(const SvmModel& model, const Eigen::Ref<const Eigen::Vector4d>& x);

// Largest complementarity violation of the stored dual solution on its
// training set (0 for an exact KKT point).
double kkt_residual(const SvmModel& model, const Eigen::Ref<const Matrix>& features,
                    const std::vector<int>& labels);

}  // namespace graspdec
