#include <doctest.h>

#include <array>
#include <cmath>

#include "graspdec/errors.hpp"
#include "graspdec/rng.hpp"
#include "graspdec/svm.hpp"
#include "oracles.hpp"

using namespace graspdec;

namespace {

Matrix pad4(const std::vector<std::array<double, 2>>& points) {
    Matrix x(static_cast<Eigen::Index>(points.size()), 4);
    x.setZero();
    for (std::size_t i = 0; i < points.size(); ++i) {
        x(static_cast<Eigen::Index>(i), 0) = points[i][0];
        x(static_cast<Eigen::Index>(i), 1) = points[i][1];
    }
    return x;
}

// two separable clusters with a comfortable margin
void random_separable(Rng& rng, int n_per_class, Matrix* x, std::vector<int>* y) {
    x->resize(2 * n_per_class, 4);
    y->clear();
    Eigen::Vector4d direction;
    for (int k = 0; k < 4; ++k) direction[k] = rng.normal();
    direction.normalize();
    for (int i = 0; i < 2 * n_per_class; ++i) {
        int label = i < n_per_class ? 1 : -1;
        Eigen::Vector4d p;
        for (int k = 0; k < 4; ++k) p[k] = rng.normal();
        p += direction * (3.0 * label);
        x->row(i) = p.transpose();
        y->push_back(label);
    }
}

void random_overlapping(Rng& rng, int n_per_class, Matrix* x, std::vector<int>* y) {
    x->resize(2 * n_per_class, 4);
    y->clear();
    for (int i = 0; i < 2 * n_per_class; ++i) {
        int label = i < n_per_class ? 1 : -1;
        for (int k = 0; k < 4; ++k) (*x)(i, k) = rng.normal() + 0.5 * label;
        y->push_back(label);
    }
}

double training_accuracy(const SvmModel& model, const Matrix& x, const std::vector<int>& y) {
    int correct = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::Vector4d xi = x.row(i).transpose();
        if (class_sign(predict(model, xi)) == y[static_cast<std::size_t>(i)]) ++correct;
    }
    return 100.0 * correct / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("two symmetric points recover the max-margin separator exactly") {
    Matrix x = pad4({{-1.0, 0.0}, {1.0, 0.0}});
    std::vector<int> y = {-1, 1};  // Precision at -1, Power at +1
    SvmModel model = train_svm(x, y, 1e6);

    CHECK(std::abs(model.bias) <= 1e-6);
    CHECK(std::abs(model.weights[0] - 1.0) <= 1e-6);
    CHECK(model.weights.tail<3>().cwiseAbs().maxCoeff() <= 1e-9);
    double margin = 2.0 / model.weights.norm();
    CHECK(std::abs(margin - 2.0) <= 1e-6);
    CHECK(kkt_residual(model, x, y) <= 1e-6);
}

TEST_CASE("XOR stays at the linear 75% ceiling established by brute force") {
    std::vector<std::array<double, 2>> points = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    std::vector<int> labels = {1, 1, -1, -1};
    double ceiling = oracles::best_hyperplane_accuracy_2d(points, labels);
    CHECK(ceiling == doctest::Approx(75.0));

    Matrix x = pad4(points);
    SvmModel model = train_svm(x, labels, 10.0);
    CHECK(training_accuracy(model, x, labels) <= ceiling);
}

TEST_CASE("duplicating every sample leaves the solution unchanged") {
    Rng rng(8);
    Matrix x;
    std::vector<int> y;
    random_separable(rng, 12, &x, &y);
    SvmModel base = train_svm(x, y, 1e5);

    Matrix x2(2 * x.rows(), 4);
    x2 << x, x;
    std::vector<int> y2 = y;
    y2.insert(y2.end(), y.begin(), y.end());
    SvmModel doubled = train_svm(x2, y2, 1e5);

    CHECK((base.weights - doubled.weights).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(base.bias - doubled.bias) <= 1e-8);
}

TEST_CASE("predict follows the sign rule with ties to Power") {
    SvmModel model;
    model.weights << 1.0, 0.0, 0.0, 0.0;
    model.bias = 0.0;
    CHECK(predict(model, Eigen::Vector4d(3.0, 0.0, 0.0, 0.0)) == GraspClass::Power);
    CHECK(predict(model, Eigen::Vector4d(0.0, 0.0, 0.0, 0.0)) == GraspClass::Power);
    CHECK(predict(model, Eigen::Vector4d(-3.0, 0.0, 0.0, 0.0)) == GraspClass::Precision);
}

TEST_CASE("training input validation") {
    Matrix x = pad4({{0, 0}, {1, 1}});
    CHECK_THROWS_AS(train_svm(x, {1, 1}, 1.0), InputError);
    CHECK_THROWS_AS(train_svm(x, {1}, 1.0), InputError);
    CHECK_THROWS_AS(train_svm(x, {1, -1}, -1.0), InputError);
    Matrix bad = x;
    bad(0, 2) = std::nan("");
    CHECK_THROWS_AS(train_svm(bad, {1, -1}, 1.0), InputError);
    Matrix narrow(2, 3);
    narrow.setZero();
    CHECK_THROWS_AS(train_svm(narrow, {1, -1}, 1.0), InputError);
}

TEST_CASE("dual feasibility and KKT residual on 50 random datasets") {
    Rng rng(123);
    for (int round = 0; round < 50; ++round) {
        Matrix x;
        std::vector<int> y;
        double c = round % 3 == 0 ? 0.1 : (round % 3 == 1 ? 1.0 : 100.0);
        if (round % 2 == 0) {
            random_overlapping(rng, 10 + static_cast<int>(rng.uniform_int(15)), &x, &y);
        } else {
            random_separable(rng, 10 + static_cast<int>(rng.uniform_int(15)), &x, &y);
        }
        SvmModel model = train_svm(x, y, c);

        double dual_balance = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            double a = model.dual_coefficients[i];
            CHECK(a >= 0.0);
            CHECK(a <= c + 1e-12);
            dual_balance += a * y[static_cast<std::size_t>(i)];
        }
        CHECK(std::abs(dual_balance) <= 1e-9);
        CHECK(kkt_residual(model, x, y) <= 1e-6);
    }
}

TEST_CASE("translating all features shifts only the bias") {
    Rng rng(456);
    for (int round = 0; round < 10; ++round) {
        Matrix x;
        std::vector<int> y;
        random_overlapping(rng, 15, &x, &y);
        SvmModel base = train_svm(x, y, 1.0);

        Eigen::Vector4d offset;
        for (int k = 0; k < 4; ++k) offset[k] = rng.normal();
        Matrix shifted = x;
        shifted.rowwise() += offset.transpose();
        SvmModel moved = train_svm(shifted, y, 1.0);

        CHECK((base.weights - moved.weights).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(std::abs(moved.bias - (base.bias - base.weights.dot(offset))) <= 1e-6);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            Eigen::Vector4d a = x.row(i).transpose();
            Eigen::Vector4d b = shifted.row(i).transpose();
            CHECK(predict(base, a) == predict(moved, b));
        }
    }
}

TEST_CASE("training accuracy is non-decreasing in C") {
    Rng rng(789);
    for (int round = 0; round < 8; ++round) {
        Matrix x;
        std::vector<int> y;
        random_overlapping(rng, 20, &x, &y);
        double previous = -1.0;
        for (double c : {0.01, 1.0, 100.0}) {
            double acc = training_accuracy(train_svm(x, y, c), x, y);
            CHECK(acc >= previous - 1e-9);
            previous = acc;
        }
    }
}
