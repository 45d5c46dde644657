#include "modalfeat/baseline_features.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace modalfeat {

namespace {

// Uniform quantisation of the 0-255 range into `levels` bins.
int quantize(double pixel, int levels) {
    double p = pixel < 0.0 ? 0.0 : (pixel > 255.0 ? 255.0 : pixel);
    int q = static_cast<int>(p * levels / 256.0);
    return q >= levels ? levels - 1 : q;
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

Glcm compute_glcm(const ImageBuffer& image, const GlcmParams& params) {
    const int levels = params.levels;
    if (levels < 2) throw std::invalid_argument("GLCM needs at least 2 gray levels");
    if (image.rows() < 1 || image.cols() < 1)
        throw std::invalid_argument("empty image");

    const int rows = image.rows(), cols = image.cols();
    Eigen::MatrixXi q(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            q(r, c) = quantize(image.pixels(r, c), levels);

    Glcm glcm;
    glcm.params = params;
    glcm.counts = Eigen::MatrixXd::Zero(levels, levels);

    for (double theta : params.thetas) {
        // Screen convention: theta is measured from the +x (column) axis and
        // positive angles go up, i.e. toward smaller row indices.
        int dr = -static_cast<int>(std::lround(params.distance * std::sin(theta)));
        int dc = static_cast<int>(std::lround(params.distance * std::cos(theta)));
        for (int r = 0; r < rows; ++r) {
            int nr = r + dr;
            if (nr < 0 || nr >= rows) continue;
            for (int c = 0; c < cols; ++c) {
                int nc = c + dc;
                if (nc < 0 || nc >= cols) continue;
                glcm.counts(q(r, c), q(nr, nc)) += 1.0;
            }
        }
    }

    double total = glcm.counts.sum();
    glcm.normalized = total > 0 ? (glcm.counts / total).eval()
                                : Eigen::MatrixXd::Zero(levels, levels).eval();
    return glcm;
}

HaralickFeatures haralick_features(const Glcm& glcm) {
    const Eigen::MatrixXd& p = glcm.normalized;
    const int g = static_cast<int>(p.rows());
    if (std::abs(p.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("GLCM is not normalised");

    Eigen::VectorXd px = p.rowwise().sum();
    Eigen::VectorXd py = p.colwise().sum();

    double mu_x = 0.0, mu_y = 0.0;
    for (int i = 0; i < g; ++i) {
        mu_x += i * px[i];
        mu_y += i * py[i];
    }
    double var_x = 0.0, var_y = 0.0;
    for (int i = 0; i < g; ++i) {
        var_x += (i - mu_x) * (i - mu_x) * px[i];
        var_y += (i - mu_y) * (i - mu_y) * py[i];
    }
    double sigma_x = std::sqrt(var_x), sigma_y = std::sqrt(var_y);

    // Marginal sum/difference distributions, 0-based levels: i+j in
    // [0, 2g-2], |i-j| in [0, g-1].
    Eigen::VectorXd p_sum = Eigen::VectorXd::Zero(2 * g - 1);
    Eigen::VectorXd p_diff = Eigen::VectorXd::Zero(g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            p_sum[i + j] += p(i, j);
            p_diff[std::abs(i - j)] += p(i, j);
        }

    HaralickFeatures h;

    // h1 angular second moment
    h.values[0] = p.array().square().sum();

    // h2 contrast
    double contrast = 0.0;
    for (int n = 0; n < g; ++n) contrast += double(n) * n * p_diff[n];
    h.values[1] = contrast;

    // h3 correlation
    double cross = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) cross += double(i) * j * p(i, j);
    if (sigma_x * sigma_y > 0.0) {
        h.values[2] = (cross - mu_x * mu_y) / (sigma_x * sigma_y);
    } else {
        h.values[2] = 0.0;
        h.degenerate_correlation = true;
    }

    // h4 sum of squares: variance
    double variance = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            variance += (i - mu_x) * (i - mu_x) * p(i, j);
    h.values[3] = variance;

    // h5 inverse difference moment
    double idm = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) idm += p(i, j) / (1.0 + double(i - j) * (i - j));
    h.values[4] = idm;

    // h6 sum average, h8 sum entropy, h7 sum variance (defined against h8,
    // as in the original publication)
    double sum_avg = 0.0, sum_ent = 0.0;
    for (int k = 0; k < 2 * g - 1; ++k) {
        sum_avg += k * p_sum[k];
        sum_ent -= xlogx(p_sum[k]);
    }
    double sum_var = 0.0;
    for (int k = 0; k < 2 * g - 1; ++k)
        sum_var += (k - sum_ent) * (k - sum_ent) * p_sum[k];
    h.values[5] = sum_avg;
    h.values[6] = sum_var;
    h.values[7] = sum_ent;

    // h9 entropy
    double entropy = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) entropy -= xlogx(p(i, j));
    h.values[8] = entropy;

    // h10 difference variance, h11 difference entropy
    double diff_mean = 0.0, diff_ent = 0.0;
    for (int k = 0; k < g; ++k) {
        diff_mean += k * p_diff[k];
        diff_ent -= xlogx(p_diff[k]);
    }
    double diff_var = 0.0;
    for (int k = 0; k < g; ++k)
        diff_var += (k - diff_mean) * (k - diff_mean) * p_diff[k];
    h.values[9] = diff_var;
    h.values[10] = diff_ent;

    // h12, h13 information measures of correlation
    double hx = 0.0, hy = 0.0, hxy1 = 0.0, hxy2 = 0.0;
    for (int i = 0; i < g; ++i) {
        hx -= xlogx(px[i]);
        hy -= xlogx(py[i]);
    }
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            double marg = px[i] * py[j];
            if (marg > 0.0) {
                if (p(i, j) > 0.0) hxy1 -= p(i, j) * std::log(marg);
                hxy2 -= marg * std::log(marg);
            }
        }
    double hmax = std::max(hx, hy);
    h.values[11] = hmax > 0.0 ? (entropy - hxy1) / hmax : 0.0;
    double arg = 1.0 - std::exp(-2.0 * (hxy2 - entropy));
    h.values[12] = arg > 0.0 ? std::sqrt(arg) : 0.0;

    return h;
}

LbpHistogram lbp_features(const ImageBuffer& image, int neighbors, int radius) {
    if (neighbors != 8 || radius < 1)
        throw std::invalid_argument("only the 8-neighbour integer ring is supported");
    const int rows = image.rows(), cols = image.cols();
    if (rows < 2 * radius + 1 || cols < 2 * radius + 1)
        throw std::invalid_argument("image too small for LBP radius");

    // East first, then counterclockwise.
    const int dr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    const int dc[8] = {1, 1, 0, -1, -1, -1, 0, 1};

    LbpHistogram hist;
    hist.neighbors = neighbors;
    hist.radius = radius;
    hist.bins.assign(1u << neighbors, 0.0);

    const Eigen::MatrixXd& px = image.pixels;
    long coded = 0;
    for (int r = radius; r < rows - radius; ++r) {
        for (int c = radius; c < cols - radius; ++c) {
            double center = px(r, c);
            unsigned code = 0;
            for (int p = 0; p < 8; ++p)
                if (px(r + dr[p] * radius, c + dc[p] * radius) >= center)
                    code |= 1u << p;
            hist.bins[code] += 1.0;
            ++coded;
        }
    }
    if (coded > 0)
        for (double& b : hist.bins) b /= static_cast<double>(coded);
    return hist;
}

HogDescriptor hog_features(const ImageBuffer& image, int cell, int bins) {
    if (cell < 1 || bins < 1) throw std::invalid_argument("bad HOG parameters");
    if (image.rows() < cell || image.cols() < cell)
        throw std::invalid_argument("image smaller than one HOG cell");

    const int cell_rows = image.rows() / cell;
    const int cell_cols = image.cols() / cell;
    const int rows = cell_rows * cell, cols = cell_cols * cell;
    const double pi = 3.14159265358979323846;

    HogDescriptor desc;
    desc.cell = cell;
    desc.bins = bins;
    desc.values.assign(static_cast<size_t>(cell_rows) * cell_cols * bins, 0.0);

    const Eigen::MatrixXd& px = image.pixels;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            int c0 = c > 0 ? c - 1 : 0, c1 = c < image.cols() - 1 ? c + 1 : c;
            int r0 = r > 0 ? r - 1 : 0, r1 = r < image.rows() - 1 ? r + 1 : r;
            double gx = px(r, c1) - px(r, c0);
            double gy = px(r1, c) - px(r0, c);
            double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx);
            if (angle < 0) angle += pi;          // unsigned orientation
            if (angle >= pi) angle -= pi;
            int bin = static_cast<int>(angle / pi * bins);
            if (bin >= bins) bin = bins - 1;
            size_t cell_index =
                static_cast<size_t>(r / cell) * cell_cols + (c / cell);
            desc.values[cell_index * bins + bin] += mag;
        }
    }

    double norm = 0.0;
    for (double v : desc.values) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& v : desc.values) v /= norm;
    return desc;
}

namespace {

template <typename Fn>
FeatureVector timed_vector(const char* name, const ImageBuffer& image, Fn&& fn) {
    FeatureVector fv;
    fv.extractor = name;
    fv.image_id = image.source;
    auto t0 = std::chrono::steady_clock::now();
    fv.values = fn();
    auto t1 = std::chrono::steady_clock::now();
    fv.extract_seconds = std::chrono::duration<double>(t1 - t0).count();
    return fv;
}

}  // namespace

FeatureVector haralick_feature_vector(const ImageBuffer& image,
                                      const GlcmParams& params) {
    return timed_vector("haralick", image, [&] {
        HaralickFeatures h = haralick_features(compute_glcm(image, params));
        return std::vector<double>(h.values.begin(), h.values.end());
    });
}

FeatureVector lbp_feature_vector(const ImageBuffer& image, int neighbors,
                                 int radius) {
    return timed_vector("lbp", image, [&] {
        return lbp_features(image, neighbors, radius).bins;
    });
}

FeatureVector hog_feature_vector(const ImageBuffer& image, int cell, int bins) {
    return timed_vector("hog", image, [&] {
        return hog_features(image, cell, bins).values;
    });
}

}  // namespace modalfeat
