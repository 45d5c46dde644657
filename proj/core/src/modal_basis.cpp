#include "modalfeat/modal_basis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace modalfeat {

namespace {

void check_grid(const GridSpec& grid) {
    if (grid.rows < 2 || grid.cols < 2)
        throw std::invalid_argument("grid must be at least 2x2, got " +
                                    std::to_string(grid.rows) + "x" +
                                    std::to_string(grid.cols));
}

// Equalise the infinity norms of two orthonormal vectors spanning a
// degenerate eigenspace. Any orthonormal pair the eigensolver hands back is
// an arbitrary rotation within the eigenspace; picking the rotation angle
// where both members have the same infinity norm makes the pair, and hence
// the congruent-group amplitude, a canonical function of the eigenspace.
void equalize_pair(Eigen::Ref<Eigen::VectorXd> a, Eigen::Ref<Eigen::VectorXd> b) {
    auto gap = [&](double t) {
        double c = std::cos(t), s = std::sin(t);
        double na = (c * a + s * b).lpNorm<Eigen::Infinity>();
        double nb = (-s * a + c * b).lpNorm<Eigen::Infinity>();
        return na - nb;
    };
    double lo = 0.0, hi = 1.5707963267948966;  // pi/2 swaps the two members
    double glo = gap(lo);
    if (glo == 0.0) return;
    // gap(hi) = -gap(lo), so a sign change is guaranteed on [lo, hi].
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = gap(mid);
        if (gm == 0.0) { lo = hi = mid; break; }
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    double c = std::cos(t), s = std::sin(t);
    Eigen::VectorXd na = c * a + s * b;
    Eigen::VectorXd nb = -s * a + c * b;
    a = na;
    b = nb;
}

// Index of the first entry attaining the maximum absolute value.
Eigen::Index first_extremal(const Eigen::VectorXd& v) {
    double m = v.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) == m) return i;
    return 0;
}

}  // namespace

DynamicOperator build_operator(const GridSpec& grid) {
    check_grid(grid);
    const int r = grid.rows, c = grid.cols, n = grid.nodes();

    // 4-neighbour grid Laplacian; node (i, j) sits at column-major index
    // j * rows + i.
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    auto idx = [r](int i, int j) { return j * r + i; };
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < r; ++i) {
            int u = idx(i, j);
            int deg = 0;
            const int di[4] = {-1, 1, 0, 0};
            const int dj[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                int ni = i + di[k], nj = j + dj[k];
                if (ni < 0 || ni >= r || nj < 0 || nj >= c) continue;
                lap(u, idx(ni, nj)) = -1.0;
                ++deg;
            }
            lap(u, u) = static_cast<double>(deg);
        }
    }

    DynamicOperator op;
    op.matrix = lap * lap;
    op.grid = grid;
    return op;
}

ModalBasis solve_modes(const DynamicOperator& op, int n_q) {
    const int n = op.grid.nodes();
    if (n_q < 1 || n_q > n)
        throw std::invalid_argument("n_q must be in [1, rows*cols], got " +
                                    std::to_string(n_q));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed to converge on " +
                                 std::to_string(n) + "-dim operator");

    Eigen::MatrixXd vecs = solver.eigenvectors().leftCols(n_q);
    Eigen::VectorXd vals = solver.eigenvalues().head(n_q);
    const double val_scale = std::max(std::abs(solver.eigenvalues()[n - 1]), 1.0);

    // Clamp the numerical zero of the rigid (piston) mode and snap its shape
    // to the exact constant vector; the null space is known analytically.
    for (int i = 0; i < n_q; ++i) {
        if (std::abs(vals[i]) < 1e-10 * val_scale) {
            vals[i] = 0.0;
            vecs.col(i).setConstant(vecs.col(i).sum() >= 0 ? 1.0 / std::sqrt(double(n))
                                                           : -1.0 / std::sqrt(double(n)));
        }
    }

    // Canonicalise degenerate pairs (relative splitting at round-off level,
    // far below any physical gap): rotate each pair so both members share
    // the same infinity norm. Mixing only happens inside the eigenspace, so
    // the eigen-residual bound is preserved. Larger accidental degeneracies
    // are left as returned; the norm-weighted amplitude handles them.
    const double canon_abs = 1e-12 * val_scale;
    int start = 0;
    while (start < n_q) {
        int end = start + 1;
        while (end < n_q &&
               vals[end] - vals[end - 1] <= canon_abs + 1e-9 * std::abs(vals[end]))
            ++end;
        if (end - start == 2 && vals[start] > 0.0)
            equalize_pair(vecs.col(start), vecs.col(start + 1));
        start = end;
    }

    // Infinity normalisation and sign convention: first extremal entry positive.
    for (int i = 0; i < n_q; ++i) {
        double m = vecs.col(i).lpNorm<Eigen::Infinity>();
        vecs.col(i) /= m;
        if (vecs.col(i)[first_extremal(vecs.col(i))] < 0) vecs.col(i) = -vecs.col(i);
    }

    ModalBasis basis;
    basis.modes = std::move(vecs);
    basis.eigenvalues = std::move(vals);
    basis.grid = op.grid;

    // Residual check on the normalised modes.
    double worst = 0.0;
    for (int i = 0; i < n_q; ++i) {
        double res = (op.matrix * basis.modes.col(i) -
                      basis.eigenvalues[i] * basis.modes.col(i))
                         .lpNorm<Eigen::Infinity>() /
                     std::max(basis.eigenvalues[i], 1.0);
        worst = std::max(worst, res);
    }
    if (worst > 1e-8)
        throw std::runtime_error("eigensolve residual too large: max " +
                                 std::to_string(worst));

    return classify_modes(std::move(basis));
}

ModalBasis classify_modes(ModalBasis basis, double rel_tol) {
    const int n = basis.mode_count();
    basis.mode_l2.resize(n);
    for (int i = 0; i < n; ++i) basis.mode_l2[i] = basis.modes.col(i).norm();
    basis.groups.clear();
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n) {
            double gap = basis.eigenvalues[end] - basis.eigenvalues[end - 1];
            double scale = std::max(basis.eigenvalues[end], 1e-300);
            if (gap / scale > rel_tol) break;
            ++end;
        }
        std::vector<int> g(static_cast<size_t>(end - start));
        for (int k = start; k < end; ++k) g[static_cast<size_t>(k - start)] = k;
        basis.groups.push_back(std::move(g));
        start = end;
    }
    return basis;
}

ModalBasis truncate_to_groups(const ModalBasis& basis, int n_groups) {
    if (n_groups < 1 || n_groups > basis.group_count())
        throw std::invalid_argument("n_groups out of range: " +
                                    std::to_string(n_groups) + " of " +
                                    std::to_string(basis.group_count()));
    int keep = basis.groups[static_cast<size_t>(n_groups - 1)].back() + 1;

    ModalBasis out;
    out.modes = basis.modes.leftCols(keep);
    out.eigenvalues = basis.eigenvalues.head(keep);
    out.mode_l2.resize(keep);
    for (int i = 0; i < keep; ++i) out.mode_l2[i] = out.modes.col(i).norm();
    out.grid = basis.grid;
    out.groups.assign(basis.groups.begin(), basis.groups.begin() + n_groups);
    return out;
}

// --- cache ------------------------------------------------------------

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_basis(const ModalBasis& basis, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open basis cache for write: " + path);
    write_u32(os, static_cast<std::uint32_t>(basis.grid.rows));
    write_u32(os, static_cast<std::uint32_t>(basis.grid.cols));
    write_u32(os, static_cast<std::uint32_t>(basis.mode_count()));
    write_u32(os, kStencilVersion);
    os.write(reinterpret_cast<const char*>(basis.eigenvalues.data()),
             static_cast<std::streamsize>(sizeof(double)) * basis.eigenvalues.size());
    os.write(reinterpret_cast<const char*>(basis.modes.data()),
             static_cast<std::streamsize>(sizeof(double)) * basis.modes.size());
    if (!os) throw std::runtime_error("short write to basis cache: " + path);
}

std::optional<ModalBasis> try_load_basis(const std::string& path,
                                         const GridSpec& grid, int n_q) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::uint32_t rows = read_u32(is), cols = read_u32(is);
    std::uint32_t nq = read_u32(is), version = read_u32(is);
    if (!is || rows != static_cast<std::uint32_t>(grid.rows) ||
        cols != static_cast<std::uint32_t>(grid.cols) ||
        nq != static_cast<std::uint32_t>(n_q) || version != kStencilVersion)
        return std::nullopt;

    ModalBasis basis;
    basis.grid = grid;
    basis.eigenvalues.resize(n_q);
    basis.modes.resize(grid.nodes(), n_q);
    is.read(reinterpret_cast<char*>(basis.eigenvalues.data()),
            static_cast<std::streamsize>(sizeof(double)) * n_q);
    is.read(reinterpret_cast<char*>(basis.modes.data()),
            static_cast<std::streamsize>(sizeof(double)) * basis.modes.size());
    if (!is) return std::nullopt;
    return classify_modes(std::move(basis));
}

ModalBasis load_or_build_basis(const GridSpec& grid, int n_q,
                               const std::string& cache_path) {
    check_grid(grid);
    if (!cache_path.empty()) {
        if (auto cached = try_load_basis(cache_path, grid, n_q)) return *cached;
    }
    ModalBasis basis = solve_modes(build_operator(grid), n_q);
    if (!cache_path.empty()) {
        std::filesystem::path p(cache_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        save_basis(basis, cache_path);
    }
    return basis;
}

}  // namespace modalfeat
