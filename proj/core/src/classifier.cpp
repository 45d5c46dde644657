#include "modalfeat/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace modalfeat {

void Standardizer::fit(const Eigen::MatrixXd& x) {
    const double n = static_cast<double>(x.rows());
    if (n < 1) throw std::invalid_argument("cannot standardise an empty matrix");
    mean = x.colwise().mean();
    Eigen::VectorXd var =
        ((x.rowwise() - mean.transpose()).array().square().colwise().sum() / n)
            .transpose();
    scale.resize(var.size());
    for (Eigen::Index i = 0; i < var.size(); ++i) {
        double sd = std::sqrt(var[i]);
        scale[i] = sd > 1e-300 ? 1.0 / sd : 0.0;
    }
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size())
        throw std::invalid_argument("standardizer dimension mismatch");
    return (x.rowwise() - mean.transpose()).array().rowwise() *
           scale.transpose().array();
}

namespace {

// Squared-hinge binary SVM:
//   F(w, b) = ||w||^2 / (2C) + mean_i max(0, 1 - y_i (w.x_i + b))^2
// minimised with Nesterov-accelerated full-batch gradient descent.
void fit_binary(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double c,
                int epochs, Eigen::VectorXd& w_out, double& b_out) {
    const double n = static_cast<double>(x.rows());
    const Eigen::Index d = x.cols();

    // Lipschitz bound 1/C + 2 lmax(Xa^T Xa)/n with Xa = [X 1], via power
    // iteration started from the all-ones direction.
    Eigen::VectorXd u = Eigen::VectorXd::Ones(d + 1).normalized();
    double lmax = 0.0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd xu = x * u.head(d);
        xu.array() += u[d];
        Eigen::VectorXd v(d + 1);
        v.head(d) = x.transpose() * xu;
        v[d] = xu.sum();
        lmax = v.norm();
        if (lmax < 1e-30) break;
        u = v / lmax;
    }
    const double step = 1.0 / (1.0 / c + 2.2 * lmax / n);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d), w_prev = w, wy = w;
    double b = 0.0, b_prev = 0.0, by = 0.0;
    double theta = 1.0;

    for (int t = 0; t < epochs; ++t) {
        Eigen::VectorXd margin = y.array() * (x * wy).array() + y.array() * by;
        Eigen::VectorXd slack = (1.0 - margin.array()).cwiseMax(0.0);
        Eigen::VectorXd coef = (-2.0 / n) * slack.array() * y.array();

        Eigen::VectorXd grad_w = wy / c + x.transpose() * coef;
        double grad_b = coef.sum();

        w_prev = w;
        b_prev = b;
        w = wy - step * grad_w;
        b = by - step * grad_b;

        double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        double momentum = (theta - 1.0) / theta_next;
        wy = w + momentum * (w - w_prev);
        by = b + momentum * (b - b_prev);
        theta = theta_next;
    }
    w_out = std::move(w);
    b_out = b;
}

}  // namespace

OvrSvmModel fit_ovr_svm(const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const SvmOptions& opts) {
    if (static_cast<size_t>(x.rows()) != y.size())
        throw std::invalid_argument("label count does not match sample count");
    if (x.rows() == 0) throw std::invalid_argument("empty training set");
    if (!x.allFinite())
        throw std::invalid_argument("training features contain non-finite values");
    if (opts.c <= 0.0) throw std::invalid_argument("C must be positive");

    std::set<int> labels(y.begin(), y.end());
    if (labels.size() < 2)
        throw std::invalid_argument("training needs at least two classes");

    OvrSvmModel model;
    model.classes.assign(labels.begin(), labels.end());
    model.c = opts.c;
    model.seed = opts.seed;
    model.epochs = opts.epochs;
    model.weights.resize(static_cast<Eigen::Index>(model.classes.size()), x.cols());
    model.bias.resize(static_cast<Eigen::Index>(model.classes.size()));

    for (size_t k = 0; k < model.classes.size(); ++k) {
        Eigen::VectorXd target(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            target[i] = y[static_cast<size_t>(i)] == model.classes[k] ? 1.0 : -1.0;
        Eigen::VectorXd w;
        double b = 0.0;
        fit_binary(x, target, opts.c, opts.epochs, w, b);
        model.weights.row(static_cast<Eigen::Index>(k)) = w.transpose();
        model.bias[static_cast<Eigen::Index>(k)] = b;
    }
    return model;
}

Eigen::MatrixXd decision_scores(const OvrSvmModel& model,
                                const Eigen::MatrixXd& x) {
    if (x.cols() != model.weights.cols())
        throw std::invalid_argument("feature dimension does not match model");
    return (x * model.weights.transpose()).rowwise() + model.bias.transpose();
}

std::vector<int> predict(const OvrSvmModel& model, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd scores = decision_scores(model, x);
    std::vector<int> out(static_cast<size_t>(x.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < scores.cols(); ++k)
            if (scores(i, k) > scores(i, best)) best = k;  // ties keep lower index
        out[static_cast<size_t>(i)] = model.classes[static_cast<size_t>(best)];
    }
    return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.empty()) throw std::invalid_argument("empty prediction set");
    if (predicted.size() != truth.size())
        throw std::invalid_argument("prediction / truth length mismatch");
    size_t correct = 0;
    for (size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

void save_model(const OvrSvmModel& model, const Standardizer& standardizer,
                const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open model file for write: " + path);
    os << std::setprecision(17);
    os << "modalfeat-svm v1\n";
    os << "C " << model.c << "\n";
    os << "seed " << model.seed << "\n";
    os << "epochs " << model.epochs << "\n";
    os << "classes " << model.classes.size() << "\n";
    os << "dims " << model.weights.cols() << "\n";
    os << "labels";
    for (int c : model.classes) os << ' ' << c;
    os << "\nmean";
    for (Eigen::Index i = 0; i < standardizer.mean.size(); ++i)
        os << ' ' << standardizer.mean[i];
    os << "\nscale";
    for (Eigen::Index i = 0; i < standardizer.scale.size(); ++i)
        os << ' ' << standardizer.scale[i];
    os << "\nbias";
    for (Eigen::Index i = 0; i < model.bias.size(); ++i) os << ' ' << model.bias[i];
    os << "\n";
    for (Eigen::Index k = 0; k < model.weights.rows(); ++k) {
        os << "w" << k;
        for (Eigen::Index j = 0; j < model.weights.cols(); ++j)
            os << ' ' << model.weights(k, j);
        os << "\n";
    }
}

std::pair<OvrSvmModel, Standardizer> load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open model file: " + path);
    std::string magic;
    std::getline(is, magic);
    if (magic != "modalfeat-svm v1")
        throw std::runtime_error("unrecognised model format in " + path);

    OvrSvmModel model;
    Standardizer std_;
    std::string key;
    size_t classes = 0;
    Eigen::Index dims = 0;

    auto expect = [&](const char* want) {
        is >> key;
        if (key != want)
            throw std::runtime_error("malformed model file, expected " +
                                     std::string(want) + " got " + key);
    };
    expect("C");
    is >> model.c;
    expect("seed");
    is >> model.seed;
    expect("epochs");
    is >> model.epochs;
    expect("classes");
    is >> classes;
    expect("dims");
    is >> dims;
    expect("labels");
    model.classes.resize(classes);
    for (auto& c : model.classes) is >> c;
    expect("mean");
    std_.mean.resize(dims);
    for (Eigen::Index i = 0; i < dims; ++i) is >> std_.mean[i];
    expect("scale");
    std_.scale.resize(dims);
    for (Eigen::Index i = 0; i < dims; ++i) is >> std_.scale[i];
    expect("bias");
    model.bias.resize(static_cast<Eigen::Index>(classes));
    for (Eigen::Index i = 0; i < model.bias.size(); ++i) is >> model.bias[i];
    model.weights.resize(static_cast<Eigen::Index>(classes), dims);
    for (size_t k = 0; k < classes; ++k) {
        is >> key;  // w<k>
        for (Eigen::Index j = 0; j < dims; ++j)
            is >> model.weights(static_cast<Eigen::Index>(k), j);
    }
    if (!is) throw std::runtime_error("truncated model file: " + path);
    return {std::move(model), std::move(std_)};
}

}  // namespace modalfeat
