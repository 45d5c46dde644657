// Microbenchmarks for the per-image extraction kernels on a 32x32 patch, the
// patch size of the main benchmark protocol. Basis and bank construction sit
// outside the measured loops, matching how the harness times extraction.

#include <benchmark/benchmark.h>

#include "modalfeat/baseline_features.hpp"
#include "modalfeat/dataset.hpp"
#include "modalfeat/dmd_features.hpp"
#include "modalfeat/filter_features.hpp"
#include "modalfeat/modal_basis.hpp"

using namespace modalfeat;

namespace {

const ImageBuffer& patch32() {
    static ImageBuffer patch = [] {
        std::vector<TextureClass> classes = synthetic_textures(8, 1, 256, 42);
        SplitSpec spec;
        spec.patches_per_class = 1;
        spec.patch_size = 32;
        spec.seed = 7;
        return sample_patches(classes[5].images[0], spec).front();
    }();
    return patch;
}

const DualProjector& projector100() {
    static DualProjector projector = [] {
        GridSpec grid{32, 32};
        ModalBasis full = solve_modes(build_operator(grid), grid.nodes());
        return DualProjector(truncate_to_groups(full, 100));
    }();
    return projector;
}

}  // namespace

static void BM_FullScaleDmd100(benchmark::State& state) {
    const DualProjector& projector = projector100();
    const ImageBuffer& img = patch32();
    for (auto _ : state)
        benchmark::DoNotOptimize(full_scale_features(projector, img, 100));
}
BENCHMARK(BM_FullScaleDmd100);

// The same coordinates through the dense dual-matrix product (the general
// projection route, also what project() uses).
static void BM_DenseDualProduct(benchmark::State& state) {
    const DualProjector& projector = projector100();
    const ImageBuffer& img = patch32();
    for (auto _ : state) benchmark::DoNotOptimize(projector.coordinates(img));
}
BENCHMARK(BM_DenseDualProduct);

static void BM_Haralick(benchmark::State& state) {
    const ImageBuffer& img = patch32();
    for (auto _ : state)
        benchmark::DoNotOptimize(haralick_feature_vector(img));
}
BENCHMARK(BM_Haralick);

static void BM_Lbp(benchmark::State& state) {
    const ImageBuffer& img = patch32();
    for (auto _ : state) benchmark::DoNotOptimize(lbp_feature_vector(img));
}
BENCHMARK(BM_Lbp);

static void BM_Hog(benchmark::State& state) {
    const ImageBuffer& img = patch32();
    for (auto _ : state) benchmark::DoNotOptimize(hog_feature_vector(img));
}
BENCHMARK(BM_Hog);

static void BM_FilteringDmd(benchmark::State& state) {
    static FilterBank bank = dmd_filter_bank();
    const ImageBuffer& img = patch32();
    for (auto _ : state)
        benchmark::DoNotOptimize(filter_variance_features(img, bank));
}
BENCHMARK(BM_FilteringDmd);

static void BM_Dct3(benchmark::State& state) {
    static FilterBank bank = dct_filter_bank(3);
    const ImageBuffer& img = patch32();
    for (auto _ : state)
        benchmark::DoNotOptimize(filter_variance_features(img, bank));
}
BENCHMARK(BM_Dct3);

BENCHMARK_MAIN();
