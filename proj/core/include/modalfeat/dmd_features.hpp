#pragma once

#include <span>

#include "modalfeat/feature_vector.hpp"
#include "modalfeat/image.hpp"
#include "modalfeat/modal_basis.hpp"

namespace modalfeat {

// Precomputed dual basis (Q^T Q)^-1 Q^T. The basis is generally not
// orthonormal (infinity-normalised modes), so projection needs the dual
// rather than Q^T alone. Immutable once built; reusable across images.
//
// Bases produced by solve_modes inherit the operator's separable cosine
// eigenstructure, so the constructor also prepares a factored evaluator for
// the group amplitudes (two small matrix products instead of one dense dual
// product). The factored route is validated against the dense dual at
// construction and dropped whenever it does not reproduce it.
class DualProjector {
public:
    explicit DualProjector(ModalBasis basis);

    const ModalBasis& basis() const { return basis_; }
    const Eigen::MatrixXd& dual() const { return dual_; }

    // Modal coordinates of an image: one dual-matrix product.
    Eigen::VectorXd coordinates(const ImageBuffer& image) const;

    bool has_fast_amplitudes() const { return !fast_groups_.empty(); }

    // First n_groups invariant group amplitudes; the per-image work the
    // full-scale extractor times.
    void group_amplitudes(const ImageBuffer& image, int n_groups,
                          double* out) const;

private:
    struct FastGroup {
        // Axis-frequency slots (into row_basis_/col_basis_ columns) of each
        // member's separable transform entry.
        std::vector<std::pair<int, int>> entries;
        double inv_rms = 1.0;  // 1 / RMS of the group's mode norms
    };

    void build_fast_path();

    ModalBasis basis_;
    Eigen::MatrixXd dual_;  // n_q x (rows*cols)
    // Factored evaluator: the orthonormal cosine transform restricted to the
    // axis frequencies the basis touches, one 1-D basis vector per column.
    Eigen::MatrixXd row_basis_;  // rows x m_count
    Eigen::MatrixXd col_basis_;  // cols x n_count
    std::vector<FastGroup> fast_groups_;
};

struct ModalSpectrum {
    Eigen::VectorXd lambda;      // least-squares modal coordinates
    double residual_norm = 0.0;  // infinity norm of P_V - Q*lambda
};

// Rotation-invariant form of a spectrum: one amplitude per degeneracy group
// (plain |lambda| for simple modes, L2 norm over the group for congruent
// ones) and one phase per congruent pair.
struct InvariantSpectrum {
    Eigen::VectorXd amplitudes;
    Eigen::VectorXd phases;
    std::vector<int> phase_groups;  // group index each phase belongs to
};

ModalSpectrum project(const DualProjector& projector, const ImageBuffer& image);

// Partial reconstruction over a subset of mode indices (0-based).
ImageBuffer reconstruct(const ModalBasis& basis, const Eigen::VectorXd& lambda,
                        std::span<const int> subset);

InvariantSpectrum rotation_invariant(const ModalSpectrum& spectrum,
                                     const ModalBasis& basis);

// Low/high split at a mode count: low reconstructs modes 1..cutoff, high is
// the image minus low (so low + high is exactly the input, including any
// decomposition residual).
struct MultiscalePair {
    ImageBuffer low;
    ImageBuffer high;
};
MultiscalePair multiscale_filter(const DualProjector& projector,
                                 const ImageBuffer& image, int cutoff);
MultiscalePair multiscale_filter(const ModalBasis& basis,
                                 const ImageBuffer& image, int cutoff);

// First n_features invariant amplitudes in ascending-eigenvalue group order.
FeatureVector full_scale_features(const DualProjector& projector,
                                  const ImageBuffer& image, int n_features);

}  // namespace modalfeat
