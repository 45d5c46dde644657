#pragma once

#include <iosfwd>

#include "modalfeat/feature_vector.hpp"
#include "modalfeat/image.hpp"

namespace modalfeat {

// Ordered bank of N x N kernels used by the filter-variance pipeline.
struct FilterBank {
    std::vector<Eigen::MatrixXd> kernels;
    std::string name;
    int size = 0;

    int count() const { return static_cast<int>(kernels.size()); }
};

// Separable DCT bank: kernels h_mn = h_m h_n^T in row-major (m, n) order.
// For n = 3 the basis vectors are the integer triples {1,1,1}, {1,0,-1},
// {1,-2,1}; larger sizes use the orthonormal DCT-II vectors.
FilterBank dct_filter_bank(int n = 3);

// The nine modes of the modal basis solved on a 3x3 grid, each reshaped to a
// 3x3 kernel, eigenvalue-ascending.
FilterBank dmd_filter_bank();

// Valid-mode 2D cross-correlation (no padding, no kernel flip); output is
// (rows-N+1) x (cols-N+1).
ImageBuffer correlate_valid(const ImageBuffer& image,
                            const Eigen::MatrixXd& kernel);

// One feature per kernel: the population variance of the valid-filtered
// image, in bank order.
FeatureVector filter_variance_features(const ImageBuffer& image,
                                       const FilterBank& bank);

// Plain-text dump, one kernel block per section.
void dump_bank(std::ostream& os, const FilterBank& bank);

}  // namespace modalfeat
