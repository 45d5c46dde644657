#pragma once

#include <array>

#include "modalfeat/feature_vector.hpp"
#include "modalfeat/image.hpp"

namespace modalfeat {

struct GlcmParams {
    int distance = 1;
    std::vector<double> thetas = {0.0, 3.14159265358979323846,
                                  1.5707963267948966, 2.356194490192345};
    int levels = 32;
};

// Gray-level cooccurrence matrix: one count per ordered pixel pair found at
// offset (d, theta), accumulated over all directions in params.thetas. A
// direction set containing both a direction and its opposite (0 and pi in
// the default set) contributes symmetric counts for that axis.
struct Glcm {
    Eigen::MatrixXd counts;
    Eigen::MatrixXd normalized;  // entries sum to 1
    GlcmParams params;
};

Glcm compute_glcm(const ImageBuffer& image, const GlcmParams& params = {});

// Haralick's features 1-13 over a normalised GLCM; feature 14 (maximal
// correlation coefficient) is omitted. Inverse difference moment uses the
// 1/(1+(i-j)^2) weight. Gray levels are 0-based.
struct HaralickFeatures {
    std::array<double, 13> values{};
    // sigma_x * sigma_y == 0; correlation was forced to 0.
    bool degenerate_correlation = false;
};

HaralickFeatures haralick_features(const Glcm& glcm);

// LBP codes over the 8 integer-offset neighbours at radius 1 (ordering:
// east, then counterclockwise), delta(x) = 1 iff x >= 0; histogram over 2^P
// bins normalised to sum 1.
struct LbpHistogram {
    std::vector<double> bins;
    int neighbors = 8;
    int radius = 1;
};

LbpHistogram lbp_features(const ImageBuffer& image, int neighbors = 8,
                          int radius = 1);

// Per-cell unsigned-orientation histograms from clamped central-difference
// gradients, concatenated row-major and L2-normalised as a whole. The image
// is cropped to whole cells.
struct HogDescriptor {
    std::vector<double> values;
    int cell = 8;
    int bins = 9;
};

HogDescriptor hog_features(const ImageBuffer& image, int cell = 8, int bins = 9);

// FeatureVector adapters used by the benchmark harness; each records the
// wall-clock time of the pure extraction call.
FeatureVector haralick_feature_vector(const ImageBuffer& image,
                                      const GlcmParams& params = {});
FeatureVector lbp_feature_vector(const ImageBuffer& image, int neighbors = 8,
                                 int radius = 1);
FeatureVector hog_feature_vector(const ImageBuffer& image, int cell = 8,
                                 int bins = 9);

}  // namespace modalfeat
