#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace modalfeat {

struct GridSpec {
    int rows = 0;
    int cols = 0;

    int nodes() const { return rows * cols; }
    bool operator==(const GridSpec&) const = default;
};

// Discrete plate-bending operator with identity mass matrix: the square of
// the 4-neighbour grid Laplacian, which is the 13-point biharmonic stencil
// in the interior with the natural free-edge closure at the boundary.
// Symmetric positive semidefinite; the constant vector spans its null space.
struct DynamicOperator {
    Eigen::MatrixXd matrix;  // (rows*cols) x (rows*cols)
    GridSpec grid;
};

// Modal projection basis. Column i of `modes` is the flattened shape of the
// i-th mode (column-major pixel order), infinity-normalised to 1 and sorted
// by ascending eigenvalue. `groups` partitions mode indices into degeneracy
// groups: singletons are simple modes, larger groups are congruent.
struct ModalBasis {
    Eigen::MatrixXd modes;
    Eigen::VectorXd eigenvalues;
    std::vector<std::vector<int>> groups;
    // Per-mode L2 norms (modes are infinity-normalised, so these differ);
    // invariant amplitudes weight coordinates by them so that a group
    // amplitude measures the eigenspace projection norm.
    Eigen::VectorXd mode_l2;
    GridSpec grid;

    int mode_count() const { return static_cast<int>(modes.cols()); }
    int group_count() const { return static_cast<int>(groups.size()); }
};

inline constexpr double kDefaultGroupTol = 1e-6;
inline constexpr std::uint32_t kStencilVersion = 1;

DynamicOperator build_operator(const GridSpec& grid);

// The n_q lowest modes of the operator. Deterministic: eigenvalues ascending,
// degenerate pairs rotated to a canonical representative with equal infinity
// norms (so congruent-group amplitudes are exactly invariant under grid
// rotations), each mode infinity-normalised with its first extremal entry
// positive. Groups are populated with the default tolerance.
ModalBasis solve_modes(const DynamicOperator& op, int n_q);

// Re-partition into degeneracy groups: consecutive modes whose eigenvalue
// gap is <= rel_tol relative to the larger eigenvalue share a group.
ModalBasis classify_modes(ModalBasis basis, double rel_tol = kDefaultGroupTol);

// Sub-basis containing the first n_groups degeneracy groups.
ModalBasis truncate_to_groups(const ModalBasis& basis, int n_groups);

// --- optional on-disk basis cache -----------------------------------------
// Flat binary layout: header of 4 little-endian uint32 (rows, cols, n_q,
// stencil version), then eigenvalues, then the mode matrix column-major, all
// float64. The cache is a pure optimisation: a loaded basis is bit-identical
// to a rebuilt one.

void save_basis(const ModalBasis& basis, const std::string& path);
std::optional<ModalBasis> try_load_basis(const std::string& path,
                                         const GridSpec& grid, int n_q);
ModalBasis load_or_build_basis(const GridSpec& grid, int n_q,
                               const std::string& cache_path = {});

}  // namespace modalfeat
