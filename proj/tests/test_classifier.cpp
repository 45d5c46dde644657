#include <doctest.h>

#include "test_util.hpp"

#include <cmath>
#include <filesystem>

#include "modalfeat/classifier.hpp"
#include "modalfeat/rng.hpp"

using namespace modalfeat;

namespace {

struct Blobs {
    Eigen::MatrixXd x;
    std::vector<int> y;
};

// Isotropic Gaussian blobs, points interleaved across classes.
Blobs gaussian_blobs(const std::vector<std::pair<double, double>>& centers,
                     int per_class, double sigma, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Blobs blobs;
    blobs.x.resize(static_cast<Eigen::Index>(centers.size()) * per_class, 2);
    Eigen::Index row = 0;
    for (int i = 0; i < per_class; ++i) {
        for (size_t c = 0; c < centers.size(); ++c) {
            blobs.x(row, 0) = centers[c].first + sigma * rng.next_gaussian();
            blobs.x(row, 1) = centers[c].second + sigma * rng.next_gaussian();
            blobs.y.push_back(static_cast<int>(c));
            ++row;
        }
    }
    return blobs;
}

}  // namespace

TEST_CASE("standardizer centers and scales training data") {
    SplitMix64 rng(3);
    Eigen::MatrixXd x(40, 3);
    for (Eigen::Index r = 0; r < 40; ++r) {
        x(r, 0) = 5.0 + 2.0 * rng.next_gaussian();
        x(r, 1) = -3.0 + 0.25 * rng.next_gaussian();
        x(r, 2) = 7.0;  // zero variance
    }
    Standardizer s;
    s.fit(x);
    Eigen::MatrixXd z = s.transform(x);

    for (int c = 0; c < 2; ++c) {
        double mean = z.col(c).mean();
        double sd = std::sqrt((z.col(c).array() - mean).square().mean());
        CHECK(std::abs(mean) <= 1e-9);
        CHECK(std::abs(sd - 1.0) <= 1e-9);
    }
    CHECK(z.col(2).cwiseAbs().maxCoeff() == 0.0);  // not NaN

    CHECK_THROWS_AS(s.transform(Eigen::MatrixXd::Zero(2, 5)),
                    std::invalid_argument);
}

TEST_CASE("separable clusters train to full accuracy") {
    Blobs blobs = gaussian_blobs({{0.0, 0.0}, {8.0, 8.0}}, 20, 0.3, 11);
    Standardizer s;
    s.fit(blobs.x);
    Eigen::MatrixXd z = s.transform(blobs.x);
    OvrSvmModel model = fit_ovr_svm(z, blobs.y, {.c = 1.0, .epochs = 500});
    CHECK(accuracy(predict(model, z), blobs.y) == doctest::Approx(1.0));
}

TEST_CASE("three gaussian blobs classify a holdout set") {
    std::vector<std::pair<double, double>> centers{{0, 0}, {10, 0}, {0, 10}};
    Blobs train = gaussian_blobs(centers, 30, 1.0, 101);
    Blobs test = gaussian_blobs(centers, 30, 1.0, 202);

    Standardizer s;
    s.fit(train.x);
    OvrSvmModel model =
        fit_ovr_svm(s.transform(train.x), train.y, {.c = 1.0, .epochs = 500});
    double acc = accuracy(predict(model, s.transform(test.x)), test.y);
    CHECK(acc >= 0.95);
}

TEST_CASE("training is deterministic across reruns") {
    Blobs blobs = gaussian_blobs({{0, 0}, {6, 1}, {2, 7}}, 25, 1.5, 77);
    Standardizer s;
    s.fit(blobs.x);
    Eigen::MatrixXd z = s.transform(blobs.x);

    OvrSvmModel a = fit_ovr_svm(z, blobs.y, {.c = 2.0, .epochs = 300, .seed = 9});
    OvrSvmModel b = fit_ovr_svm(z, blobs.y, {.c = 2.0, .epochs = 300, .seed = 9});
    CHECK(exactly_equal(a.weights, b.weights));
    CHECK(exactly_equal(a.bias, b.bias));
    CHECK(predict(a, z) == predict(b, z));
}

TEST_CASE("duplicating the training set leaves the boundary in place") {
    Blobs blobs = gaussian_blobs({{0, 0}, {5, 5}}, 15, 1.0, 31);
    Eigen::MatrixXd doubled(blobs.x.rows() * 2, blobs.x.cols());
    doubled << blobs.x, blobs.x;
    std::vector<int> y2 = blobs.y;
    y2.insert(y2.end(), blobs.y.begin(), blobs.y.end());

    OvrSvmModel base = fit_ovr_svm(blobs.x, blobs.y, {.epochs = 400});
    OvrSvmModel dup = fit_ovr_svm(doubled, y2, {.epochs = 400});
    CHECK((base.weights - dup.weights).cwiseAbs().maxCoeff() <=
          1e-6 * base.weights.cwiseAbs().maxCoeff());
    CHECK((base.bias - dup.bias).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("prediction ties break toward the lower class label") {
    OvrSvmModel model;
    model.classes = {2, 5};
    model.weights = Eigen::MatrixXd::Ones(2, 1);
    model.bias = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd x(1, 1);
    x << 0.7;  // identical score for both classes
    CHECK(predict(model, x) == std::vector<int>{2});
}

TEST_CASE("predictions ignore uniform positive score rescaling") {
    Blobs blobs = gaussian_blobs({{0, 0}, {4, 4}, {8, 0}}, 20, 1.0, 55);
    OvrSvmModel model = fit_ovr_svm(blobs.x, blobs.y, {.epochs = 300});
    OvrSvmModel scaled = model;
    scaled.weights *= 12.5;
    scaled.bias *= 12.5;
    CHECK(predict(model, blobs.x) == predict(scaled, blobs.x));
}

TEST_CASE("fit input validation") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 2);
    std::vector<int> one_class{1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(fit_ovr_svm(x, one_class, {}), std::invalid_argument);

    std::vector<int> y{0, 1, 0, 1, 0, 1};
    Eigen::MatrixXd bad = x;
    bad(2, 1) = std::nan("");
    CHECK_THROWS_AS(fit_ovr_svm(bad, y, {}), std::invalid_argument);

    CHECK_THROWS_AS(fit_ovr_svm(x, y, {.c = -1.0}), std::invalid_argument);
    std::vector<int> short_y{0, 1};
    CHECK_THROWS_AS(fit_ovr_svm(x, short_y, {}), std::invalid_argument);
}

TEST_CASE("predict validates feature dimensions") {
    Blobs blobs = gaussian_blobs({{0, 0}, {5, 5}}, 10, 0.5, 2);
    OvrSvmModel model = fit_ovr_svm(blobs.x, blobs.y, {.epochs = 200});
    CHECK_THROWS_AS(predict(model, Eigen::MatrixXd::Zero(3, 5)),
                    std::invalid_argument);
}

TEST_CASE("accuracy arithmetic") {
    CHECK(accuracy({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(accuracy({1, 2, 3}, {4, 5, 6}) == doctest::Approx(0.0));
    std::vector<int> pred(510, 0), truth(510, 0);
    for (int i = 433; i < 510; ++i) truth[static_cast<size_t>(i)] = 1;
    CHECK(accuracy(pred, truth) == doctest::Approx(433.0 / 510.0));
    CHECK_THROWS_AS(accuracy({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(accuracy({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("model save and load round-trip") {
    namespace fs = std::filesystem;
    Blobs blobs = gaussian_blobs({{0, 0}, {6, 0}, {0, 6}}, 15, 1.0, 21);
    Standardizer s;
    s.fit(blobs.x);
    OvrSvmModel model =
        fit_ovr_svm(s.transform(blobs.x), blobs.y, {.c = 0.5, .epochs = 250, .seed = 4});

    fs::path dir = fs::temp_directory_path() / "modalfeat_model_test";
    fs::create_directories(dir);
    std::string path = (dir / "model.txt").string();
    save_model(model, s, path);

    auto [loaded, loaded_std] = load_model(path);
    CHECK(loaded.classes == model.classes);
    CHECK(loaded.c == model.c);
    CHECK(loaded.seed == model.seed);
    CHECK(loaded.epochs == model.epochs);
    CHECK((loaded.weights - model.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.bias - model.bias).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded_std.mean - s.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK(predict(loaded, loaded_std.transform(blobs.x)) ==
          predict(model, s.transform(blobs.x)));

    CHECK_THROWS_AS(load_model((dir / "missing.txt").string()), std::runtime_error);
    fs::remove_all(dir);
}
