#include "modalfeat/image.hpp"

#include <stdexcept>

namespace modalfeat {

Eigen::VectorXd flatten(const ImageBuffer& image) {
    return Eigen::Map<const Eigen::VectorXd>(image.pixels.data(),
                                             image.pixels.size());
}

ImageBuffer unflatten(const Eigen::VectorXd& v, int rows, int cols,
                      std::string source) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("unflatten: vector length does not match grid");
    Eigen::MatrixXd px = Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
    return ImageBuffer(std::move(px), std::move(source));
}

ImageBuffer rotate90(const ImageBuffer& image, int k) {
    int turns = ((k % 4) + 4) % 4;
    if (turns % 2 == 1 && image.rows() != image.cols())
        throw std::invalid_argument(
            "rotate90: odd quarter-turn count requires a square image");

    const Eigen::MatrixXd& in = image.pixels;
    Eigen::MatrixXd out;
    switch (turns) {
        case 0:
            out = in;
            break;
        case 1:
            // (r, c) -> (c, rows-1-r)
            out.resize(in.cols(), in.rows());
            for (Eigen::Index r = 0; r < in.rows(); ++r)
                for (Eigen::Index c = 0; c < in.cols(); ++c)
                    out(c, in.rows() - 1 - r) = in(r, c);
            break;
        case 2:
            out = in.reverse();
            break;
        case 3:
            out.resize(in.cols(), in.rows());
            for (Eigen::Index r = 0; r < in.rows(); ++r)
                for (Eigen::Index c = 0; c < in.cols(); ++c)
                    out(in.cols() - 1 - c, r) = in(r, c);
            break;
    }
    return ImageBuffer(std::move(out), image.source);
}

}  // namespace modalfeat
