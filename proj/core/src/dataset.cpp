#include "modalfeat/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "modalfeat/rng.hpp"

#if MODALFEAT_HAVE_PNG
#include <png.h>
#endif

namespace fs = std::filesystem;

namespace modalfeat {

namespace {

struct PatchPos {
    int row, col;
};

// The uniform top-left placements a given seed produces; shared by
// sample_patches and make_split so both see the same patch sets.
std::vector<PatchPos> patch_positions(int rows, int cols, const SplitSpec& spec,
                                      std::uint64_t seed) {
    const int s = spec.patch_size;
    if (s < 1) throw std::invalid_argument("patch size must be positive");
    if (rows < s || cols < s)
        throw std::invalid_argument("image " + std::to_string(rows) + "x" +
                                    std::to_string(cols) +
                                    " smaller than patch size " + std::to_string(s));
    SplitMix64 rng(seed);
    std::vector<PatchPos> out;
    out.reserve(static_cast<size_t>(spec.patches_per_class));
    for (int i = 0; i < spec.patches_per_class; ++i) {
        int r = static_cast<int>(
            rng.next_below(static_cast<std::uint64_t>(rows - s + 1)));
        int c = static_cast<int>(
            rng.next_below(static_cast<std::uint64_t>(cols - s + 1)));
        out.push_back({r, c});
    }
    return out;
}

// --- PNM decoding -------------------------------------------------------

int pnm_next_int(std::istream& is) {
    // Skips whitespace and '#' comments.
    int ch = is.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = is.get();
        } else if (std::isspace(ch)) {
            ch = is.get();
        } else {
            break;
        }
    }
    if (ch == EOF || !std::isdigit(ch)) throw std::runtime_error("bad PNM header");
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = is.get();
    }
    return value;
}

ImageBuffer load_pnm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open image: " + path);

    char p = 0, kind = 0;
    is.get(p);
    is.get(kind);
    if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6'))
        throw std::runtime_error("unsupported PNM type in " + path);

    const bool color = kind == '3' || kind == '6';
    const bool ascii = kind == '2' || kind == '3';
    int width = pnm_next_int(is);
    int height = pnm_next_int(is);
    int maxval = pnm_next_int(is);
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error("only 8-bit PNM supported: " + path);

    const int channels = color ? 3 : 1;
    const long count = static_cast<long>(width) * height * channels;
    std::vector<double> raw(static_cast<size_t>(count));
    if (ascii) {
        for (long i = 0; i < count; ++i)
            raw[static_cast<size_t>(i)] = pnm_next_int(is);
    } else {
        std::vector<unsigned char> bytes(static_cast<size_t>(count));
        is.read(reinterpret_cast<char*>(bytes.data()), count);
        if (!is) throw std::runtime_error("truncated PNM data in " + path);
        for (long i = 0; i < count; ++i)
            raw[static_cast<size_t>(i)] = bytes[static_cast<size_t>(i)];
    }

    Eigen::MatrixXd px(height, width);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            size_t base = (static_cast<size_t>(r) * width + c) * channels;
            double v = color ? (raw[base] + raw[base + 1] + raw[base + 2]) / 3.0
                             : raw[base];
            px(r, c) = v;
        }
    return ImageBuffer(std::move(px), path);
}

#if MODALFEAT_HAVE_PNG
ImageBuffer load_png(const std::string& path) {
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw std::runtime_error("cannot decode PNG: " + path);
    img.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&img);
        throw std::runtime_error("cannot decode PNG: " + path);
    }
    Eigen::MatrixXd px(img.height, img.width);
    for (unsigned r = 0; r < img.height; ++r)
        for (unsigned c = 0; c < img.width; ++c) {
            size_t base = (static_cast<size_t>(r) * img.width + c) * 3;
            px(static_cast<int>(r), static_cast<int>(c)) =
                (double(buffer[base]) + buffer[base + 1] + buffer[base + 2]) / 3.0;
        }
    return ImageBuffer(std::move(px), path);
}
#endif

}  // namespace

ImageBuffer load_image(const std::string& path) {
    if (!fs::exists(path))
        throw std::runtime_error("image file does not exist: " + path);
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return load_pnm(path);
    if (ext == ".png") {
#if MODALFEAT_HAVE_PNG
        return load_png(path);
#else
        throw std::runtime_error("built without PNG support, cannot read " + path);
#endif
    }
    throw std::runtime_error("unsupported image format: " + path);
}

std::vector<ImageBuffer> sample_patches(const ImageBuffer& image,
                                        const SplitSpec& spec) {
    const int s = spec.patch_size;
    std::vector<PatchPos> positions =
        patch_positions(image.rows(), image.cols(), spec, spec.seed);

    std::vector<ImageBuffer> patches;
    patches.reserve(positions.size());
    for (const PatchPos& p : positions)
        patches.emplace_back(image.pixels.block(p.row, p.col, s, s),
                             image.source + "@r" + std::to_string(p.row) + "c" +
                                 std::to_string(p.col));
    return patches;
}

DatasetSplit make_split(const std::vector<TextureClass>& classes,
                        const SplitSpec& spec) {
    if (classes.empty()) throw std::invalid_argument("no texture classes");

    DatasetSplit split;
    for (const TextureClass& cls : classes) {
        if (cls.images.empty())
            throw std::invalid_argument("class " + cls.label + " has no images");

        // Pool the per-image patch sets, remembering origins for the manifest.
        struct Origin {
            int image_index, row, col;
        };
        std::vector<ImageBuffer> pool;
        std::vector<Origin> origins;
        for (size_t im = 0; im < cls.images.size(); ++im) {
            const ImageBuffer& img = cls.images[im];
            const int s = spec.patch_size;
            std::uint64_t seed = derive_seed(
                spec.seed, static_cast<std::uint64_t>(cls.id) * 4096 + im);
            for (const PatchPos& p :
                 patch_positions(img.rows(), img.cols(), spec, seed)) {
                pool.emplace_back(img.pixels.block(p.row, p.col, s, s),
                                  img.source + "@r" + std::to_string(p.row) +
                                      "c" + std::to_string(p.col));
                origins.push_back({static_cast<int>(im), p.row, p.col});
            }
        }

        if (static_cast<int>(pool.size()) < spec.train_count + spec.test_count)
            throw std::invalid_argument(
                "class " + cls.label + " has " + std::to_string(pool.size()) +
                " patches, need " +
                std::to_string(spec.train_count + spec.test_count));

        std::vector<int> order(pool.size());
        std::iota(order.begin(), order.end(), 0);
        SplitMix64 rng(derive_seed(spec.seed, 7777 + static_cast<std::uint64_t>(cls.id)));
        for (size_t i = pool.size(); i > 1; --i) {
            size_t j = rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }

        auto push = [&](std::vector<Sample>& dst, int from, int count) {
            for (int k = from; k < from + count; ++k) {
                int idx = order[static_cast<size_t>(k)];
                Sample s;
                s.patch = pool[static_cast<size_t>(idx)];
                s.label = cls.id;
                s.source = cls.images[static_cast<size_t>(origins[static_cast<size_t>(idx)].image_index)].source;
                s.row = origins[static_cast<size_t>(idx)].row;
                s.col = origins[static_cast<size_t>(idx)].col;
                dst.push_back(std::move(s));
            }
        };
        push(split.train, 0, spec.train_count);
        push(split.test, spec.train_count, spec.test_count);
    }
    return split;
}

// --- synthetic texture catalogue ----------------------------------------

namespace {

constexpr double kPi = 3.14159265358979323846;

void clamp_image(Eigen::MatrixXd& px) {
    px = px.cwiseMax(0.0).cwiseMin(255.0);
}

// Plane-wave grating: cycles_per_32px along a direction given in degrees.
Eigen::MatrixXd grating(int size, double cycles_per_32, double angle_deg,
                        SplitMix64& rng) {
    double k = 2.0 * kPi * cycles_per_32 / 32.0;
    double ux = std::cos(angle_deg * kPi / 180.0);
    double uy = std::sin(angle_deg * kPi / 180.0);
    double phase = rng.next_double() * 2.0 * kPi;
    Eigen::MatrixXd px(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            px(r, c) = 128.0 + 60.0 * std::sin(k * (ux * c + uy * r) + phase);
    return px;
}

Eigen::MatrixXd checkerboard(int size, int cell, SplitMix64& rng) {
    int off_r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(2 * cell)));
    int off_c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(2 * cell)));
    Eigen::MatrixXd px(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            bool on = (((r + off_r) / cell) + ((c + off_c) / cell)) % 2 == 0;
            px(r, c) = (on ? 188.0 : 68.0) + (rng.next_double() - 0.5) * 12.0;
        }
    clamp_image(px);
    return px;
}

Eigen::MatrixXd blurred_noise(int size, SplitMix64& rng) {
    Eigen::MatrixXd px(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) px(r, c) = rng.next_double() - 0.5;

    // Three passes of a radius-2 separable box blur approximate a Gaussian.
    for (int pass = 0; pass < 3; ++pass) {
        Eigen::MatrixXd tmp = px;
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                double acc = 0.0;
                for (int d = -2; d <= 2; ++d)
                    acc += px(r, std::clamp(c + d, 0, size - 1));
                tmp(r, c) = acc / 5.0;
            }
        px = tmp;
        for (int c = 0; c < size; ++c)
            for (int r = 0; r < size; ++r) {
                double acc = 0.0;
                for (int d = -2; d <= 2; ++d)
                    acc += tmp(std::clamp(r + d, 0, size - 1), c);
                px(r, c) = acc / 5.0;
            }
    }
    double sd = std::sqrt(px.array().square().mean());
    px = 128.0 + (px.array() * (55.0 / sd)).matrix().array();
    Eigen::MatrixXd out = px;
    clamp_image(out);
    return out;
}

Eigen::MatrixXd sparse_dots(int size, SplitMix64& rng) {
    Eigen::MatrixXd px = Eigen::MatrixXd::Constant(size, size, 96.0);
    int dots = size * size / 260;
    for (int d = 0; d < dots; ++d) {
        int cr = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(size)));
        int cc = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(size)));
        for (int r = std::max(0, cr - 6); r < std::min(size, cr + 7); ++r)
            for (int c = std::max(0, cc - 6); c < std::min(size, cc + 7); ++c) {
                double d2 = double(r - cr) * (r - cr) + double(c - cc) * (c - cc);
                px(r, c) += 140.0 * std::exp(-d2 / (2.0 * 2.2 * 2.2));
            }
    }
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            px(r, c) += (rng.next_double() - 0.5) * 12.0;
    clamp_image(px);
    return px;
}

Eigen::MatrixXd jittered_stripes(int size, SplitMix64& rng) {
    // Horizontal stripes, period 10 rows, with a slowly wandering phase.
    Eigen::MatrixXd px(size, size);
    double phase = rng.next_double() * 2.0 * kPi;
    for (int r = 0; r < size; ++r) {
        phase += (rng.next_double() - 0.5) * 0.55;
        double band = std::sin(2.0 * kPi * r / 10.0 + phase);
        double level = band >= 0.0 ? 178.0 : 78.0;
        for (int c = 0; c < size; ++c)
            px(r, c) = level + (rng.next_double() - 0.5) * 16.0;
    }
    clamp_image(px);
    return px;
}

struct CatalogueEntry {
    const char* label;
    Eigen::MatrixXd (*make)(int, SplitMix64&);
};

Eigen::MatrixXd make_grating_lo_0(int s, SplitMix64& r) { return grating(s, 3.0, 0.0, r); }
Eigen::MatrixXd make_grating_lo_45(int s, SplitMix64& r) { return grating(s, 3.0, 45.0, r); }
Eigen::MatrixXd make_grating_hi_0(int s, SplitMix64& r) { return grating(s, 5.0, 0.0, r); }
Eigen::MatrixXd make_grating_hi_45(int s, SplitMix64& r) { return grating(s, 5.0, 45.0, r); }
Eigen::MatrixXd make_checker(int s, SplitMix64& r) { return checkerboard(s, 8, r); }

const CatalogueEntry kCatalogue[] = {
    {"grating_f3_d0", &make_grating_lo_0},
    {"grating_f3_d45", &make_grating_lo_45},
    {"grating_f5_d0", &make_grating_hi_0},
    {"grating_f5_d45", &make_grating_hi_45},
    {"checkerboard", &make_checker},
    {"blurred_noise", &blurred_noise},
    {"sparse_dots", &sparse_dots},
    {"jittered_stripes", &jittered_stripes},
};

}  // namespace

std::vector<TextureClass> synthetic_textures(int n_classes, int images_per_class,
                                             int size, std::uint64_t seed) {
    constexpr int catalogue_size = static_cast<int>(std::size(kCatalogue));
    if (n_classes < 1 || n_classes > catalogue_size)
        throw std::invalid_argument("n_classes must be in [1, " +
                                    std::to_string(catalogue_size) + "]");
    if (images_per_class < 1 || size < 32)
        throw std::invalid_argument("bad synthetic texture parameters");

    std::vector<TextureClass> classes;
    classes.reserve(static_cast<size_t>(n_classes));
    for (int c = 0; c < n_classes; ++c) {
        TextureClass cls;
        cls.id = c;
        cls.label = kCatalogue[c].label;
        for (int im = 0; im < images_per_class; ++im) {
            SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(c) * 1000 + im));
            ImageBuffer img(kCatalogue[c].make(size, rng),
                            "synthetic/" + cls.label + "#" + std::to_string(im));
            cls.images.push_back(std::move(img));
        }
        classes.push_back(std::move(cls));
    }
    return classes;
}

std::vector<TextureClass> load_texture_directory(const std::string& root) {
    if (!fs::is_directory(root))
        throw std::runtime_error("dataset root is not a directory: " + root);

    std::vector<std::string> labels;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) labels.push_back(entry.path().filename().string());
    std::sort(labels.begin(), labels.end());
    if (labels.empty())
        throw std::runtime_error("no class subdirectories under " + root);

    std::vector<TextureClass> classes;
    for (size_t i = 0; i < labels.size(); ++i) {
        TextureClass cls;
        cls.id = static_cast<int>(i);
        cls.label = labels[i];
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(fs::path(root) / labels[i])) {
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png")
                files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const std::string& f : files) cls.images.push_back(load_image(f));
        if (cls.images.empty())
            throw std::runtime_error("class directory has no readable images: " +
                                     labels[i]);
        classes.push_back(std::move(cls));
    }
    return classes;
}

void write_patch_manifest(const std::string& path, const DatasetSplit& split) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open manifest for write: " + path);
    os << "class,source,x,y,split\n";
    auto rows = [&](const std::vector<Sample>& set, const char* tag) {
        for (const Sample& s : set)
            os << s.label << ',' << s.source << ',' << s.col << ',' << s.row << ','
               << tag << '\n';
    };
    rows(split.train, "train");
    rows(split.test, "test");
}

}  // namespace modalfeat
