#include "modalfeat/filter_features.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "modalfeat/modal_basis.hpp"

namespace modalfeat {

FilterBank dct_filter_bank(int n) {
    if (n < 2) throw std::invalid_argument("filter size must be >= 2");

    std::vector<Eigen::VectorXd> h(static_cast<size_t>(n));
    if (n == 3) {
        h[0] = Eigen::Vector3d(1, 1, 1);
        h[1] = Eigen::Vector3d(1, 0, -1);
        h[2] = Eigen::Vector3d(1, -2, 1);
    } else {
        const double pi = 3.14159265358979323846;
        for (int m = 0; m < n; ++m) {
            Eigen::VectorXd v(n);
            for (int k = 0; k < n; ++k) {
                v[k] = m == 0 ? 1.0 / std::sqrt(double(n))
                              : std::sqrt(2.0 / n) *
                                    std::cos((2 * k + 1) * m * pi / (2.0 * n));
            }
            h[static_cast<size_t>(m)] = v;
        }
    }

    FilterBank bank;
    bank.name = n == 3 ? "dct3" : "dct" + std::to_string(n);
    bank.size = n;
    bank.kernels.reserve(static_cast<size_t>(n) * n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            bank.kernels.push_back(h[static_cast<size_t>(m)] *
                                   h[static_cast<size_t>(k)].transpose());
    return bank;
}

FilterBank dmd_filter_bank() {
    ModalBasis basis = solve_modes(build_operator(GridSpec{3, 3}), 9);

    FilterBank bank;
    bank.name = "dmd3";
    bank.size = 3;
    bank.kernels.reserve(9);
    for (int i = 0; i < 9; ++i) {
        Eigen::VectorXd col = basis.modes.col(i);
        bank.kernels.push_back(
            Eigen::Map<const Eigen::MatrixXd>(col.data(), 3, 3));
    }
    return bank;
}

ImageBuffer correlate_valid(const ImageBuffer& image,
                            const Eigen::MatrixXd& kernel) {
    const int n = static_cast<int>(kernel.rows());
    if (kernel.cols() != n) throw std::invalid_argument("kernel must be square");
    if (image.rows() < n || image.cols() < n)
        throw std::invalid_argument("image smaller than kernel: " +
                                    std::to_string(image.rows()) + "x" +
                                    std::to_string(image.cols()) + " vs " +
                                    std::to_string(n));

    const int out_r = image.rows() - n + 1;
    const int out_c = image.cols() - n + 1;
    Eigen::MatrixXd out(out_r, out_c);
    const Eigen::MatrixXd& in = image.pixels;
    for (int r = 0; r < out_r; ++r) {
        for (int c = 0; c < out_c; ++c) {
            double acc = 0.0;
            for (int kr = 0; kr < n; ++kr)
                for (int kc = 0; kc < n; ++kc)
                    acc += kernel(kr, kc) * in(r + kr, c + kc);
            out(r, c) = acc;
        }
    }
    return ImageBuffer(std::move(out), image.source);
}

FeatureVector filter_variance_features(const ImageBuffer& image,
                                       const FilterBank& bank) {
    if (bank.kernels.empty()) throw std::invalid_argument("empty filter bank");
    if (image.rows() < bank.size || image.cols() < bank.size)
        throw std::invalid_argument("image smaller than filter size");

    FeatureVector fv;
    fv.extractor = bank.name;
    fv.image_id = image.source;
    fv.values.resize(bank.kernels.size());

    auto t0 = std::chrono::steady_clock::now();
    for (size_t k = 0; k < bank.kernels.size(); ++k) {
        ImageBuffer filtered = correlate_valid(image, bank.kernels[k]);
        const double count = static_cast<double>(filtered.pixels.size());
        const double mean = filtered.pixels.sum() / count;
        fv.values[k] = (filtered.pixels.array() - mean).square().sum() / count;
    }
    auto t1 = std::chrono::steady_clock::now();
    fv.extract_seconds = std::chrono::duration<double>(t1 - t0).count();
    return fv;
}

void dump_bank(std::ostream& os, const FilterBank& bank) {
    char buf[48];
    os << "# filter bank " << bank.name << ", " << bank.count() << " kernels of "
       << bank.size << "x" << bank.size << "\n";
    for (int k = 0; k < bank.count(); ++k) {
        os << "# kernel " << k << "\n";
        const Eigen::MatrixXd& m = bank.kernels[static_cast<size_t>(k)];
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                std::snprintf(buf, sizeof(buf), "% .10f", m(r, c));
                os << buf << (c + 1 < m.cols() ? " " : "");
            }
            os << "\n";
        }
        os << "\n";
    }
}

}  // namespace modalfeat
