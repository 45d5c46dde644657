#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalfeat/image.hpp"

namespace modalfeat {

struct TextureClass {
    int id = 0;
    std::string label;
    std::vector<ImageBuffer> images;
};

// The patch-sampling and split protocol: patches_per_class overlapped
// patch_size x patch_size sub-images per source image, train_count/test_count
// of them per class.
struct SplitSpec {
    int patches_per_class = 540;
    int patch_size = 32;
    int train_count = 30;
    int test_count = 510;
    std::uint64_t seed = 0;
};

// 8-bit grayscale decode; color inputs are converted by averaging the
// channels. Supports PGM/PPM (P2/P3/P5/P6) natively and PNG when built with
// libpng.
ImageBuffer load_image(const std::string& path);

// patches_per_class patches at uniformly random top-left positions (overlap
// allowed), deterministic for a given (image, spec.seed).
std::vector<ImageBuffer> sample_patches(const ImageBuffer& image,
                                        const SplitSpec& spec);

struct Sample {
    ImageBuffer patch;
    int label = 0;
    std::string source;  // originating class/image
    int row = 0;         // top-left patch origin
    int col = 0;
};

struct DatasetSplit {
    std::vector<Sample> train;
    std::vector<Sample> test;
};

// Per-class disjoint train/test patch sets, seeded.
DatasetSplit make_split(const std::vector<TextureClass>& classes,
                        const SplitSpec& spec);

// Deterministic catalogue of eight visually distinct stationary textures:
// sinusoidal gratings at two frequencies and two orientations, a
// checkerboard, blurred white noise, sparse dots, and jittered horizontal
// stripes.
std::vector<TextureClass> synthetic_textures(int n_classes = 8,
                                             int images_per_class = 1,
                                             int size = 256,
                                             std::uint64_t seed = 0);

// Directory tree <root>/<class_label>/*.pgm|*.ppm|*.png, labels sorted.
std::vector<TextureClass> load_texture_directory(const std::string& root);

// Audit manifest: class, source, x, y, split.
void write_patch_manifest(const std::string& path, const DatasetSplit& split);

}  // namespace modalfeat
