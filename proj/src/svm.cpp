#include "graspdec/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspdec/errors.hpp"

namespace graspdec {

namespace {

constexpr double kStopTolerance = 1e-9;
constexpr double kQuadFloor = 1e-12;
constexpr long kMaxIterations = 20'000'000;

}  // namespace

int class_sign(GraspClass grasp) {
    return grasp == GraspClass::Power ? kPowerLabel : kPrecisionLabel;
}

SvmModel train_svm(const Eigen::Ref<const Matrix>& features, const std::vector<int>& labels,
                   double c_parameter) {
    const Eigen::Index n = features.rows();
    if (n == 0 || static_cast<Eigen::Index>(labels.size()) != n) {
        throw InputError("feature/label count mismatch");
    }
    if (features.cols() != 4) throw InputError("SVM features must be 4-dimensional");
    if (!(c_parameter > 0.0)) throw InputError("C must be positive");
    if (!features.allFinite()) throw InputError("non-finite feature value");

    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y != kPowerLabel && y != kPrecisionLabel) throw InputError("labels must be +1 or -1");
        (y > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw InputError("training data must contain both classes");

    const double c = c_parameter;
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)];

    // Dual: min 1/2 a^T Q a - e^T a with Q_ij = y_i y_j x_i.x_j.
    // G = Q a - e is tracked incrementally through w = sum a_i y_i x_i.
    Vector alpha = Vector::Zero(n);
    Eigen::Vector4d w = Eigen::Vector4d::Zero();
    Vector grad = Vector::Constant(n, -1.0);

    auto refresh_grad = [&] {
        for (Eigen::Index t = 0; t < n; ++t) grad[t] = y[t] * features.row(t).dot(w) - 1.0;
    };

    double m_up = 0.0, m_low = 0.0;
    for (long iter = 0;; ++iter) {
        if (iter >= kMaxIterations) throw NumericalError("SVM solver failed to converge");

        // Maximal violating pair, first index on ties.
        Eigen::Index i = -1, j = -1;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            bool up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
            bool low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
            double v = -y[t] * grad[t];
            if (up && v > m_up) {
                m_up = v;
                i = t;
            }
            if (low && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || m_up - m_low <= kStopTolerance) break;

        double k_ii = features.row(i).squaredNorm();
        double k_jj = features.row(j).squaredNorm();
        double k_ij = features.row(i).dot(features.row(j));
        double old_i = alpha[i], old_j = alpha[j];

        if (y[i] != y[j]) {
            double quad = std::max(k_ii + k_jj + 2.0 * k_ij, kQuadFloor);
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0 && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = c - diff;
            } else if (diff <= 0.0 && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = std::max(k_ii + k_jj - 2.0 * k_ij, kQuadFloor);
            double delta = (grad[i] - grad[j]) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = sum - c;
            } else if (sum <= c && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = sum - c;
            } else if (sum <= c && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        w += (alpha[i] - old_i) * y[i] * features.row(i).transpose() +
             (alpha[j] - old_j) * y[j] * features.row(j).transpose();
        refresh_grad();
    }

    SvmModel model;
    model.weights = w;
    model.c_parameter = c;
    model.dual_coefficients = alpha;

    // Bias from free support vectors; midpoint of the KKT interval otherwise.
    double free_sum = 0.0;
    int free_count = 0;
    const double bound_tol = c * 1e-10;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (alpha[t] > bound_tol && alpha[t] < c - bound_tol) {
            free_sum += y[t] - features.row(t).dot(w);
            ++free_count;
        }
    }
    model.bias = free_count > 0 ? free_sum / free_count : -0.5 * (m_up + m_low);
    return model;
}

SvmModel train_svm(const std::vector<FeatureVector>& features, double c_parameter) {
    Matrix x(static_cast<Eigen::Index>(features.size()), 4);
    std::vector<int> y;
    y.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
        y.push_back(class_sign(features[i].grasp_class));
    }
    return train_svm(x, y, c_parameter);
}

double decision_value(const SvmModel& model, const Eigen::Ref<const Eigen::Vector4d>& x) {
    return model.weights.dot(x) + model.bias;
}

GraspClass predict(const SvmModel& model, const Eigen::Ref<const Eigen::Vector4d>& x) {
    return decision_value(model, x) >= 0.0 ? GraspClass::Power : GraspClass::Precision;
}

double kkt_residual(const SvmModel& model, const Eigen::Ref<const Matrix>& features,
                    const std::vector<int>& labels) {
    const double c = model.c_parameter;
    const double bound_tol = c * 1e-10;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        double margin = labels[static_cast<std::size_t>(i)] *
                        (features.row(i).dot(model.weights) + model.bias);
        double a = model.dual_coefficients[i];
        double violation;
        if (a <= bound_tol) {
            violation = std::max(0.0, 1.0 - margin);
        } else if (a >= c - bound_tol) {
            violation = std::max(0.0, margin - 1.0);
        } else {
            violation = std::abs(margin - 1.0);
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

}  // namespace graspdec
