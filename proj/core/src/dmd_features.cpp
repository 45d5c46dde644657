#include "modalfeat/dmd_features.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <iterator>
#include <cmath>
#include <stdexcept>

namespace modalfeat {

namespace {

void check_dims(const ModalBasis& basis, const ImageBuffer& image) {
    if (image.rows() != basis.grid.rows || image.cols() != basis.grid.cols)
        throw std::invalid_argument(
            "image is " + std::to_string(image.rows()) + "x" +
            std::to_string(image.cols()) + " but basis grid is " +
            std::to_string(basis.grid.rows) + "x" +
            std::to_string(basis.grid.cols));
}

// Unit-norm eigenvectors of the 1-D path-graph Laplacian (the axis factors
// of the grid operator's eigenbasis).
Eigen::VectorXd axis_cosine(int length, int m) {
    const double pi = 3.14159265358979323846;
    Eigen::VectorXd v(length);
    if (m == 0) {
        v.setConstant(1.0 / std::sqrt(double(length)));
    } else {
        double scale = std::sqrt(2.0 / length);
        for (int i = 0; i < length; ++i)
            v[i] = scale * std::cos(pi * m * (2 * i + 1) / (2.0 * length));
    }
    return v;
}

double group_amplitude(const Eigen::VectorXd& lambda, const ModalBasis& basis,
                       const std::vector<int>& members);

}  // namespace

DualProjector::DualProjector(ModalBasis basis) : basis_(std::move(basis)) {
    const Eigen::MatrixXd& q = basis_.modes;
    Eigen::MatrixXd gram = q.transpose() * q;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("singular basis: Q^T Q is not factorisable");
    Eigen::VectorXd d = ldlt.vectorD();
    if (d.minCoeff() <= 1e-12 * d.maxCoeff())
        throw std::runtime_error("singular basis: Q^T Q is rank deficient");

    dual_ = ldlt.solve(q.transpose());
    build_fast_path();
}

void DualProjector::build_fast_path() {
    fast_groups_.clear();
    if (basis_.groups.empty() ||
        basis_.mode_l2.size() != basis_.mode_count())
        return;
    const int rows = basis_.grid.rows, cols = basis_.grid.cols;
    if (rows < 2 || cols < 2) return;

    // Ascending closed-form spectrum of the grid operator with its (m, n)
    // axis indices.
    struct Entry {
        double value;
        int m, n;
    };
    std::vector<Entry> spectrum;
    spectrum.reserve(static_cast<size_t>(rows) * cols);
    const double pi = 3.14159265358979323846;
    for (int m = 0; m < rows; ++m)
        for (int n = 0; n < cols; ++n) {
            double lam = (2.0 - 2.0 * std::cos(pi * m / rows)) +
                         (2.0 - 2.0 * std::cos(pi * n / cols));
            spectrum.push_back({lam * lam, m, n});
        }
    std::sort(spectrum.begin(), spectrum.end(),
              [](const Entry& a, const Entry& b) { return a.value < b.value; });

    // Pair stored modes with spectrum entries in order; give up if any
    // eigenvalue disagrees (the basis did not come from the grid operator).
    const int n_q = basis_.mode_count();
    if (n_q > static_cast<int>(spectrum.size())) return;
    for (int i = 0; i < n_q; ++i) {
        double expected = spectrum[static_cast<size_t>(i)].value;
        if (std::abs(basis_.eigenvalues[i] - expected) >
            1e-6 * std::max(1.0, expected))
            return;
    }

    // Compact transform rows/columns: only the axis frequencies in use.
    std::vector<int> m_index(static_cast<size_t>(rows), -1);
    std::vector<int> n_index(static_cast<size_t>(cols), -1);
    int m_count = 0, n_count = 0;
    for (int i = 0; i < n_q; ++i) {
        const Entry& e = spectrum[static_cast<size_t>(i)];
        if (m_index[static_cast<size_t>(e.m)] < 0)
            m_index[static_cast<size_t>(e.m)] = m_count++;
        if (n_index[static_cast<size_t>(e.n)] < 0)
            n_index[static_cast<size_t>(e.n)] = n_count++;
    }
    row_basis_.resize(rows, m_count);
    col_basis_.resize(cols, n_count);
    for (int m = 0; m < rows; ++m)
        if (m_index[static_cast<size_t>(m)] >= 0)
            row_basis_.col(m_index[static_cast<size_t>(m)]) = axis_cosine(rows, m);
    for (int n = 0; n < cols; ++n)
        if (n_index[static_cast<size_t>(n)] >= 0)
            col_basis_.col(n_index[static_cast<size_t>(n)]) = axis_cosine(cols, n);

    std::vector<FastGroup> groups;
    groups.reserve(basis_.groups.size());
    for (const auto& members : basis_.groups) {
        FastGroup fg;
        double norm_sq = 0.0;
        for (int i : members) {
            const Entry& e = spectrum[static_cast<size_t>(i)];
            fg.entries.emplace_back(m_index[static_cast<size_t>(e.m)],
                                    n_index[static_cast<size_t>(e.n)]);
            norm_sq += basis_.mode_l2[i] * basis_.mode_l2[i];
        }
        fg.inv_rms = 1.0 / std::sqrt(norm_sq / static_cast<double>(members.size()));
        groups.push_back(std::move(fg));
    }
    fast_groups_ = std::move(groups);

    // The factored amplitudes must reproduce the dense dual product; probe
    // with a few fixed pseudo-random images and drop the path on any drift.
    const int n_groups = basis_.group_count();
    std::vector<double> fast(static_cast<size_t>(n_groups));
    Eigen::MatrixXd probe(rows, cols);
    std::uint64_t state = 0x1234abcd;
    for (int trial = 0; trial < 3; ++trial) {
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) {
                state = state * 6364136223846793005ull + 1442695040888963407ull;
                probe(r, c) = static_cast<double>(state >> 11) * 0x1.0p-45;
            }
        ImageBuffer image(probe);
        group_amplitudes(image, n_groups, fast.data());
        Eigen::VectorXd lambda = coordinates(image);
        for (int g = 0; g < n_groups; ++g) {
            double slow = group_amplitude(lambda, basis_,
                                          basis_.groups[static_cast<size_t>(g)]);
            if (std::abs(fast[static_cast<size_t>(g)] - slow) >
                1e-9 * std::max(1.0, slow)) {
                fast_groups_.clear();
                return;
            }
        }
    }
}

Eigen::VectorXd DualProjector::coordinates(const ImageBuffer& image) const {
    check_dims(basis_, image);
    return dual_ * Eigen::Map<const Eigen::VectorXd>(image.pixels.data(),
                                                     image.pixels.size());
}

void DualProjector::group_amplitudes(const ImageBuffer& image, int n_groups,
                                     double* out) const {
    if (n_groups < 0 || n_groups > basis_.group_count())
        throw std::invalid_argument("n_groups exceeds basis group count");
    check_dims(basis_, image);

    if (!fast_groups_.empty()) {
        // Orthonormal-coordinate transform, then per-group norms: the group
        // amplitude is the eigenspace projection norm over the group RMS
        // mode norm. Two small matrix products replace the dense dual
        // product; buffers live on the stack so concurrent calls stay
        // allocation-free.
        const int cols = basis_.grid.cols;
        const int m_count = static_cast<int>(row_basis_.cols());
        const int n_count = static_cast<int>(col_basis_.cols());

        double stack_buf[4096];
        std::vector<double> heap_buf;
        double* buf = stack_buf;
        size_t need = static_cast<size_t>(m_count) * (cols + n_count);
        if (need > std::size(stack_buf)) {
            heap_buf.resize(need);
            buf = heap_buf.data();
        }
        Eigen::Map<Eigen::MatrixXd> fold(buf, m_count, cols);
        Eigen::Map<Eigen::MatrixXd> transform(
            buf + static_cast<size_t>(m_count) * cols, m_count, n_count);

        fold.noalias() = row_basis_.transpose() * image.pixels;
        transform.noalias() = fold * col_basis_;

        for (int g = 0; g < n_groups; ++g) {
            const FastGroup& fg = fast_groups_[static_cast<size_t>(g)];
            double sq = 0.0;
            for (const auto& [mi, ni] : fg.entries) {
                double v = transform(mi, ni);
                sq += v * v;
            }
            out[g] = std::sqrt(sq) * fg.inv_rms;
        }
        return;
    }

    Eigen::VectorXd lambda =
        dual_ * Eigen::Map<const Eigen::VectorXd>(image.pixels.data(),
                                                  image.pixels.size());
    for (int g = 0; g < n_groups; ++g)
        out[g] = group_amplitude(lambda, basis_,
                                 basis_.groups[static_cast<size_t>(g)]);
}

ModalSpectrum project(const DualProjector& projector, const ImageBuffer& image) {
    ModalSpectrum spectrum;
    spectrum.lambda = projector.coordinates(image);
    Eigen::VectorXd rebuilt = projector.basis().modes * spectrum.lambda;
    spectrum.residual_norm =
        (flatten(image) - rebuilt).lpNorm<Eigen::Infinity>();
    return spectrum;
}

ImageBuffer reconstruct(const ModalBasis& basis, const Eigen::VectorXd& lambda,
                        std::span<const int> subset) {
    if (lambda.size() != basis.mode_count())
        throw std::invalid_argument("lambda length does not match basis");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(basis.grid.nodes());
    for (int i : subset) {
        if (i < 0 || i >= basis.mode_count())
            throw std::out_of_range("mode index " + std::to_string(i) +
                                    " outside basis of " +
                                    std::to_string(basis.mode_count()));
        acc += lambda[i] * basis.modes.col(i);
    }
    return unflatten(acc, basis.grid.rows, basis.grid.cols);
}

namespace {

// Group amplitude: the L2 norm of the group's coordinates, weighted by the
// member mode norms and renormalised by their RMS. For simple modes this is
// |lambda|, for canonical congruent pairs (equal norms by construction) it
// is sqrt(lambda_i^2 + lambda_j^2). For accidental degeneracies with ragged
// member norms the weighting measures the eigenspace projection norm, the
// quantity that is exactly invariant under grid rotations.
double group_amplitude(const Eigen::VectorXd& lambda, const ModalBasis& basis,
                       const std::vector<int>& members) {
    double weighted_sq = 0.0, norm_sq = 0.0;
    for (int i : members) {
        double w = basis.mode_l2[i];
        weighted_sq += lambda[i] * w * lambda[i] * w;
        norm_sq += w * w;
    }
    double rms = std::sqrt(norm_sq / static_cast<double>(members.size()));
    return std::sqrt(weighted_sq) / rms;
}

}  // namespace

InvariantSpectrum rotation_invariant(const ModalSpectrum& spectrum,
                                     const ModalBasis& basis) {
    if (basis.groups.empty())
        throw std::invalid_argument("basis has no degeneracy groups");
    if (spectrum.lambda.size() != basis.mode_count() ||
        basis.mode_l2.size() != basis.mode_count())
        throw std::invalid_argument("spectrum length does not match basis");

    InvariantSpectrum inv;
    inv.amplitudes.resize(basis.group_count());
    std::vector<double> phases;
    for (int g = 0; g < basis.group_count(); ++g) {
        const auto& members = basis.groups[static_cast<size_t>(g)];
        inv.amplitudes[g] = group_amplitude(spectrum.lambda, basis, members);
        if (members.size() == 2) {
            phases.push_back(
                std::atan2(spectrum.lambda[members[1]], spectrum.lambda[members[0]]));
            inv.phase_groups.push_back(g);
        }
    }
    inv.phases = Eigen::Map<const Eigen::VectorXd>(
        phases.data(), static_cast<Eigen::Index>(phases.size()));
    return inv;
}

MultiscalePair multiscale_filter(const DualProjector& projector,
                                 const ImageBuffer& image, int cutoff) {
    const ModalBasis& basis = projector.basis();
    if (cutoff < 1 || cutoff > basis.mode_count())
        throw std::invalid_argument("cutoff must be in [1, n_q], got " +
                                    std::to_string(cutoff));
    check_dims(basis, image);

    Eigen::VectorXd lambda = projector.coordinates(image);
    Eigen::VectorXd low =
        basis.modes.leftCols(cutoff) * lambda.head(cutoff);

    MultiscalePair pair;
    pair.low = unflatten(low, basis.grid.rows, basis.grid.cols, image.source);
    pair.high = ImageBuffer(image.pixels - pair.low.pixels, image.source);
    return pair;
}

MultiscalePair multiscale_filter(const ModalBasis& basis,
                                 const ImageBuffer& image, int cutoff) {
    return multiscale_filter(DualProjector(basis), image, cutoff);
}

FeatureVector full_scale_features(const DualProjector& projector,
                                  const ImageBuffer& image, int n_features) {
    const ModalBasis& basis = projector.basis();
    if (n_features < 1)
        throw std::invalid_argument("n_features must be positive");
    if (basis.group_count() < n_features)
        throw std::invalid_argument(
            "basis provides only " + std::to_string(basis.group_count()) +
            " invariant amplitudes; solve a larger basis for " +
            std::to_string(n_features) + " features");
    check_dims(basis, image);

    FeatureVector fv;
    fv.extractor = "fs_dmd";
    fv.image_id = image.source;
    fv.values.resize(static_cast<size_t>(n_features));

    auto t0 = std::chrono::steady_clock::now();
    projector.group_amplitudes(image, n_features, fv.values.data());
    auto t1 = std::chrono::steady_clock::now();
    fv.extract_seconds = std::chrono::duration<double>(t1 - t0).count();
    return fv;
}

}  // namespace modalfeat
