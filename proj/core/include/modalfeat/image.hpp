#pragma once

#include <Eigen/Core>
#include <string>

namespace modalfeat {

// Grayscale raster held as a dense real matrix. Values are in [0, 255] when
// loaded from disk and real-valued after filtering or reconstruction.
struct ImageBuffer {
    Eigen::MatrixXd pixels;
    std::string source;

    ImageBuffer() = default;
    ImageBuffer(Eigen::MatrixXd px, std::string src = {})
        : pixels(std::move(px)), source(std::move(src)) {}

    int rows() const { return static_cast<int>(pixels.rows()); }
    int cols() const { return static_cast<int>(pixels.cols()); }
};

// Column-major flattening, the same ordering used for flattened mode shapes:
// pixel (r, c) lands at index c * rows + r.
Eigen::VectorXd flatten(const ImageBuffer& image);
ImageBuffer unflatten(const Eigen::VectorXd& v, int rows, int cols,
                      std::string source = {});

// Lossless quarter-turn rotation, k quarter turns; pixel (0,0) maps to
// (0, rows-1) for k = 1. Odd k requires a square image.
ImageBuffer rotate90(const ImageBuffer& image, int k);

}  // namespace modalfeat
