#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace modalfeat {

// Per-dimension standardisation learned on training data. Zero-variance
// dimensions get scale 0 so they map to 0 rather than NaN.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // 1/stddev (population), or 0

    void fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

struct SvmOptions {
    double c = 1.0;
    int epochs = 200;
    std::uint64_t seed = 0;  // recorded in the model; the solver is full-batch
                             // and does not consume randomness
};

// One-versus-rest linear SVM with squared hinge loss, trained by full-batch
// accelerated gradient descent. Full-batch makes the fit a deterministic
// function of (X, y, C, epochs) alone, bit-identical across reruns and
// invariant to duplicating the training set.
struct OvrSvmModel {
    std::vector<int> classes;  // ascending labels
    Eigen::MatrixXd weights;   // classes x dims
    Eigen::VectorXd bias;
    double c = 1.0;
    std::uint64_t seed = 0;
    int epochs = 0;
};

OvrSvmModel fit_ovr_svm(const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const SvmOptions& opts = {});

Eigen::MatrixXd decision_scores(const OvrSvmModel& model,
                                const Eigen::MatrixXd& x);

// Argmax over per-class scores; ties break toward the lower class label.
std::vector<int> predict(const OvrSvmModel& model, const Eigen::MatrixXd& x);

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth);

// Versioned text round-trip of model plus standardizer.
void save_model(const OvrSvmModel& model, const Standardizer& standardizer,
                const std::string& path);
std::pair<OvrSvmModel, Standardizer> load_model(const std::string& path);

}  // namespace modalfeat
