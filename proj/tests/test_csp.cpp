#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "graspdec/csp.hpp"
#include "graspdec/errors.hpp"
#include "graspdec/rng.hpp"
#include "oracles.hpp"

using namespace graspdec;

namespace {

Matrix random_spd(Eigen::Index n, Rng& rng) {
    Matrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = rng.normal();
    }
    Matrix spd = a * a.transpose() + 0.05 * Matrix::Identity(n, n);
    return spd / spd.trace();
}

Epoch make_epoch(const Matrix& data, GraspClass grasp = GraspClass::Power, int trial = 0) {
    Epoch ep;
    ep.trial_id = trial;
    ep.grasp_class = grasp;
    ep.data = data;
    return ep;
}

// epochs drawn as X = A S with per-class source scales; source 0 carries the
// planted class contrast
std::vector<Epoch> planted_epochs(const Matrix& mixing, const Vector& scales, int count,
                                  GraspClass grasp, Rng& rng) {
    std::vector<Epoch> out;
    const Eigen::Index n_sources = mixing.cols();
    for (int e = 0; e < count; ++e) {
        Matrix s(n_sources, 300);
        for (Eigen::Index r = 0; r < n_sources; ++r) {
            for (Eigen::Index c = 0; c < s.cols(); ++c) s(r, c) = scales[r] * rng.normal();
        }
        out.push_back(make_epoch(mixing * s, grasp, e));
    }
    return out;
}

CspModel identity_model() {
    CspModel model;
    model.projection = Matrix::Identity(kNumChannels, kNumChannels);
    model.patterns = Matrix::Identity(kNumChannels, kNumChannels);
    model.eigenvalues = Vector::LinSpaced(kNumChannels, 0.9, 0.1);
    model.selected_indices = {0, 1, 6, 7};
    return model;
}

}  // namespace

TEST_CASE("trial_covariance is the trace-normalized scatter") {
    Matrix x(2, 2);
    x << 1.0, 0.0, 0.0, 1.0;
    Matrix c = trial_covariance(x);
    CHECK(c(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(c(0, 1)) < 1e-15);

    Rng rng(3);
    Matrix random(kNumChannels, 500);
    for (Eigen::Index r = 0; r < random.rows(); ++r) {
        for (Eigen::Index s = 0; s < random.cols(); ++s) random(r, s) = rng.normal();
    }
    Matrix cr = trial_covariance(random);
    CHECK(std::abs(cr.trace() - 1.0) <= 1e-12);
    CHECK((cr - cr.transpose()).cwiseAbs().maxCoeff() < 1e-15);

    // collinear rows give a rank-1 covariance with eigenvalues {1, 0}
    Matrix collinear(2, 100);
    for (Eigen::Index s = 0; s < 100; ++s) {
        collinear(0, s) = std::sin(0.1 * static_cast<double>(s));
        collinear(1, s) = 2.0 * collinear(0, s);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(trial_covariance(collinear));
    CHECK(eig.eigenvalues()[0] == doctest::Approx(0.0).epsilon(0.0).scale(1e-12));
    CHECK(eig.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(trial_covariance(Matrix::Zero(3, 50)), NumericalError);
}

TEST_CASE("fit_csp on planted diagonal covariances recovers axis filters") {
    Matrix c1 = Matrix::Zero(2, 2), c2 = Matrix::Zero(2, 2);
    c1.diagonal() << 4.0 / 5.0, 1.0 / 5.0;
    c2.diagonal() << 1.0 / 5.0, 4.0 / 5.0;
    CspModel model = fit_csp_from_covariances(c1, c2);

    CHECK(model.eigenvalues[0] == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(model.eigenvalues[1] == doctest::Approx(0.2).epsilon(1e-10));
    // filters align with the coordinate axes up to scale
    CHECK(std::abs(model.projection(0, 1)) < 1e-9 * std::abs(model.projection(0, 0)));
    CHECK(std::abs(model.projection(1, 0)) < 1e-9 * std::abs(model.projection(1, 1)));
    CHECK(model.selected_indices == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("identical class covariances give eigenvalues 0.5") {
    Rng rng(17);
    Matrix c = random_spd(6, rng);
    CspModel model = fit_csp_from_covariances(c, c);
    for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
        CHECK(std::abs(model.eigenvalues[i] - 0.5) <= 1e-10);
    }
}

TEST_CASE("fit_csp recovers a planted discriminative source in 8 channels") {
    Rng rng(99);
    Matrix mixing(kNumChannels, kNumChannels);
    for (Eigen::Index r = 0; r < mixing.rows(); ++r) {
        for (Eigen::Index c = 0; c < mixing.cols(); ++c) mixing(r, c) = rng.normal();
    }
    Vector strong = Vector::Ones(kNumChannels), weak = Vector::Ones(kNumChannels);
    strong[0] = 3.0;  // planted source variance x9 in class 1

    auto class1 = planted_epochs(mixing, strong, 40, GraspClass::Power, rng);
    auto class2 = planted_epochs(mixing, weak, 40, GraspClass::Precision, rng);
    CspModel model = fit_csp(class1, class2);

    CHECK(model.eigenvalues[0] >= 0.7);
    for (Eigen::Index i = 1; i < model.eigenvalues.size(); ++i) {
        CHECK(std::abs(model.eigenvalues[i] - 0.5) <= 0.15);
    }

    // eigenvalues agree with the independent Jacobi oracle on the same
    // mean class covariances
    Matrix c1 = Matrix::Zero(kNumChannels, kNumChannels);
    Matrix c2 = Matrix::Zero(kNumChannels, kNumChannels);
    for (const auto& ep : class1) c1 += trial_covariance(ep) / static_cast<double>(class1.size());
    for (const auto& ep : class2) c2 += trial_covariance(ep) / static_cast<double>(class2.size());
    auto oracle = oracles::generalized_eigenvalues(oracles::to_nested(c1), oracles::to_nested(c1 + c2));
    for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
        CHECK(std::abs(model.eigenvalues[i] - oracle[static_cast<std::size_t>(i)]) <= 1e-8);
    }

    // top pattern matches the planted mixing column up to sign
    Vector pattern = model.patterns.col(0);
    double cosine = std::abs(pattern.dot(mixing.col(0))) / (pattern.norm() * mixing.col(0).norm());
    CHECK(cosine >= 0.95);

    CHECK_THROWS_AS(fit_csp({class1.front()}, class2), InputError);
}

TEST_CASE("CSP invariants hold on random SPD pairs (2..8 channels)") {
    Rng rng(2024);
    for (int round = 0; round < 60; ++round) {
        auto n = static_cast<Eigen::Index>(2 + rng.uniform_int(7));
        Matrix c1 = random_spd(n, rng);
        Matrix c2 = random_spd(n, rng);
        CspModel model = fit_csp_from_covariances(c1, c2);
        const Matrix& w = model.projection;

        Matrix d1 = w * c1 * w.transpose();
        Matrix d2 = w * c2 * w.transpose();
        Matrix off1 = d1 - Matrix(d1.diagonal().asDiagonal());
        Matrix off2 = d2 - Matrix(d2.diagonal().asDiagonal());
        CHECK(off1.cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(off2.cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((d1.diagonal() + d2.diagonal() - Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((d1.diagonal() - model.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8);

        Matrix whitened = w * (c1 + c2) * w.transpose();
        CHECK((whitened - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((model.patterns * w - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9);

        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(model.eigenvalues[i] >= 0.0);
            CHECK(model.eigenvalues[i] <= 1.0);
            if (i > 0) CHECK(model.eigenvalues[i] <= model.eigenvalues[i - 1] + 1e-15);
        }
        CHECK(model.selected_indices ==
              std::vector<int>{0, 1, static_cast<int>(n) - 2, static_cast<int>(n) - 1});

        auto oracle = oracles::generalized_eigenvalues(oracles::to_nested(c1), oracles::to_nested(c1 + c2));
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(std::abs(model.eigenvalues[i] - oracle[static_cast<std::size_t>(i)]) <= 1e-8);
        }
    }
}

TEST_CASE("class swap reverses eigenvalues and keeps the selected subspace") {
    Rng rng(5);
    for (int round = 0; round < 10; ++round) {
        Matrix c1 = random_spd(kNumChannels, rng);
        Matrix c2 = random_spd(kNumChannels, rng);
        CspModel ab = fit_csp_from_covariances(c1, c2);
        CspModel ba = fit_csp_from_covariances(c2, c1);

        for (Eigen::Index i = 0; i < kNumChannels; ++i) {
            CHECK(std::abs(ab.eigenvalues[i] - (1.0 - ba.eigenvalues[kNumChannels - 1 - i])) <= 1e-9);
        }

        // principal angles between the two selected filter subspaces
        auto selected_basis = [](const CspModel& m) {
            Matrix rows(4, kNumChannels);
            for (int k = 0; k < 4; ++k) rows.row(k) = m.projection.row(m.selected_indices[static_cast<std::size_t>(k)]);
            Eigen::HouseholderQR<Matrix> qr(rows.transpose());
            Matrix q = qr.householderQ() * Matrix::Identity(kNumChannels, 4);
            return q;
        };
        Eigen::JacobiSVD<Matrix> svd(selected_basis(ab).transpose() * selected_basis(ba));
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            double clamped = std::min(1.0, svd.singularValues()[i]);
            CHECK(std::acos(clamped) <= 1e-6);
        }
    }
}

TEST_CASE("features are invariant to a global positive scale") {
    Rng rng(31);
    Matrix mixing = Matrix::Identity(kNumChannels, kNumChannels);
    Vector strong = Vector::Ones(kNumChannels);
    strong[2] = 2.0;
    auto class1 = planted_epochs(mixing, strong, 10, GraspClass::Power, rng);
    auto class2 = planted_epochs(mixing, Vector::Ones(kNumChannels), 10, GraspClass::Precision, rng);

    auto scaled1 = class1;
    auto scaled2 = class2;
    for (auto& ep : scaled1) ep.data *= 3.7;
    for (auto& ep : scaled2) ep.data *= 3.7;

    CspModel base = fit_csp(class1, class2);
    CspModel scaled = fit_csp(scaled1, scaled2);
    for (std::size_t i = 0; i < class1.size(); ++i) {
        Eigen::Vector4d f0 = log_variance_features(base, class1[i]).values;
        Eigen::Vector4d f1 = log_variance_features(scaled, scaled1[i]).values;
        CHECK((f0 - f1).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("project applies W and validates the epoch") {
    CspModel model = identity_model();
    Epoch ep = make_epoch(Matrix::Random(kNumChannels, 100));
    CHECK((project(model, ep) - ep.data).cwiseAbs().maxCoeff() == 0.0);

    CspModel doubled = identity_model();
    doubled.projection *= 2.0;
    doubled.patterns *= 0.5;
    Matrix z = project(doubled, ep);
    CHECK(z.row(0).squaredNorm() == doctest::Approx(4.0 * ep.data.row(0).squaredNorm()).epsilon(1e-12));

    Epoch wrong_shape = make_epoch(Matrix::Random(kNumChannels - 1, 100));
    CHECK_THROWS_AS(project(model, wrong_shape), InputError);

    Epoch wrong_band = ep;
    wrong_band.band = BandDefinition{BandName::Gamma, 30.0, 40.0};
    CspModel alpha_model = identity_model();
    alpha_model.band = BandDefinition{BandName::Alpha, 8.0, 13.0};
    CHECK_THROWS_AS(project(alpha_model, wrong_band), InputError);
}

TEST_CASE("log-variance features normalize over the selected components") {
    CspModel model = identity_model();

    // equal variance on the four selected components
    Matrix data = Matrix::Zero(kNumChannels, 8);
    for (int idx : {0, 1, 6, 7}) {
        data(idx, 2 * (idx % 4)) = 1.0;
        data(idx, 2 * (idx % 4) + 1) = -1.0;
    }
    FeatureVector fv = log_variance_features(model, make_epoch(data));
    for (int k = 0; k < 4; ++k) CHECK(fv.values[k] == doctest::Approx(std::log(0.25)).epsilon(1e-12));

    // monotone in the component variances, and shares sum to one
    Matrix graded = Matrix::Zero(kNumChannels, 8);
    double amps[] = {2.0, 1.5, 1.0, 0.25};
    int sel[] = {0, 1, 6, 7};
    for (int k = 0; k < 4; ++k) {
        graded(sel[k], 0) = amps[k];
        graded(sel[k], 1) = -amps[k];
    }
    FeatureVector graded_fv = log_variance_features(model, make_epoch(graded));
    double exp_sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (k > 0) CHECK(graded_fv.values[k] < graded_fv.values[k - 1]);
        CHECK(graded_fv.values[k] <= 0.0);
        exp_sum += std::exp(graded_fv.values[k]);
    }
    CHECK(exp_sum == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(log_variance_features(model, make_epoch(Matrix::Zero(kNumChannels, 8))),
                    NumericalError);
}

TEST_CASE("spatial patterns invert the projection") {
    Rng rng(41);
    Matrix c1 = random_spd(kNumChannels, rng);
    Matrix c2 = random_spd(kNumChannels, rng);
    CspModel model = fit_csp_from_covariances(c1, c2);
    Matrix a = spatial_patterns(model);
    CHECK((a * model.projection - Matrix::Identity(kNumChannels, kNumChannels)).cwiseAbs().maxCoeff() <=
          1e-9);

    // whitening of an identity composite leaves W orthonormal, so A = W^T
    Matrix v = Eigen::HouseholderQR<Matrix>(c1).householderQ();
    Vector lam = Vector::LinSpaced(kNumChannels, 0.9, 0.1);
    Matrix d1 = v * lam.asDiagonal() * v.transpose();
    Matrix d2 = Matrix::Identity(kNumChannels, kNumChannels) - d1;
    CspModel ortho = fit_csp_from_covariances(d1, d2);
    CHECK((spatial_patterns(ortho) - ortho.projection.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
}
