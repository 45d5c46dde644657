#include "modalfeat/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "modalfeat/baseline_features.hpp"
#include "modalfeat/classifier.hpp"
#include "modalfeat/dmd_features.hpp"
#include "modalfeat/filter_features.hpp"
#include "modalfeat/modal_basis.hpp"

namespace fs = std::filesystem;

namespace modalfeat {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Chunked parallel apply; with workers <= 1 runs inline on the caller.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::vector<TextureClass> load_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset == "synthetic")
        return synthetic_textures(cfg.classes, 1, cfg.image_size, cfg.split.seed);
    return load_texture_directory(cfg.dataset);
}

std::string dataset_id(const ExperimentConfig& cfg) {
    if (cfg.dataset == "synthetic") return "synthetic";
    return fs::path(cfg.dataset).filename().string();
}

std::vector<std::pair<std::string, std::string>> echo_config(
    const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> echo;
    auto add = [&](const std::string& k, const std::string& v) {
        echo.emplace_back(k, v);
    };
    std::string extractors;
    for (const auto& e : cfg.extractors) {
        if (!extractors.empty()) extractors += ", ";
        extractors += e.name;
        if (e.name == "fs_dmd") extractors += ":" + std::to_string(e.modes);
    }
    add("dataset", cfg.dataset);
    add("classes", std::to_string(cfg.classes));
    add("image_size", std::to_string(cfg.image_size));
    add("patches_per_class", std::to_string(cfg.split.patches_per_class));
    add("patch_size", std::to_string(cfg.split.patch_size));
    add("train_count", std::to_string(cfg.split.train_count));
    add("test_count", std::to_string(cfg.split.test_count));
    add("seed", std::to_string(cfg.split.seed));
    add("svm_c", std::to_string(cfg.svm_c));
    add("svm_epochs", std::to_string(cfg.svm_epochs));
    add("extractors", extractors);
    add("workers", std::to_string(cfg.workers));
    return echo;
}

Eigen::MatrixXd to_matrix(const std::vector<FeatureVector>& features) {
    if (features.empty()) throw std::runtime_error("no features extracted");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()),
                      static_cast<Eigen::Index>(features.front().values.size()));
    for (size_t i = 0; i < features.size(); ++i) {
        if (features[i].values.size() != features.front().values.size())
            throw std::runtime_error("inconsistent feature dimensions");
        for (size_t j = 0; j < features[i].values.size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                features[i].values[j];
    }
    return x;
}

// Extract features for every sample; per-call timings land in the
// FeatureVector, so concurrent extraction needs no shared timing state.
std::vector<FeatureVector> extract_all(const BoundExtractor& extractor,
                                       const std::vector<Sample>& samples,
                                       int workers, const std::string& ds_id) {
    std::vector<FeatureVector> out(samples.size());
    std::exception_ptr first_error;
    std::mutex error_mutex;
    parallel_for(static_cast<int>(samples.size()), workers, [&](int i) {
        try {
            FeatureVector fv = extractor.extract(samples[static_cast<size_t>(i)].patch);
            fv.dataset_id = ds_id;
            out[static_cast<size_t>(i)] = std::move(fv);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<int> labels_of(const std::vector<Sample>& samples) {
    std::vector<int> y(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) y[i] = samples[i].label;
    return y;
}

void check_finite(const Eigen::MatrixXd& x, const std::string& extractor) {
    if (!x.allFinite())
        throw std::runtime_error("extractor " + extractor +
                                 " produced non-finite feature values");
}

}  // namespace

std::vector<ExtractorSpec> parse_extractors(const std::string& text) {
    std::vector<ExtractorSpec> specs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        ExtractorSpec spec;
        size_t colon = item.find(':');
        if (colon == std::string::npos) {
            spec.name = item;
        } else {
            spec.name = trim(item.substr(0, colon));
            spec.modes = std::stoi(item.substr(colon + 1));
            if (spec.modes < 1)
                throw std::invalid_argument("extractor parameter must be positive: " + item);
        }
        specs.push_back(std::move(spec));
    }
    if (specs.empty()) throw std::invalid_argument("no extractors configured");
    return specs;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.split.seed = 42;
    cfg.extractors = parse_extractors(
        "fs_dmd:100, haralick, lbp, hog, filtering_dmd, dct3");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);

    ExperimentConfig cfg = default_config();
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "dataset") cfg.dataset = value;
            else if (key == "classes") cfg.classes = std::stoi(value);
            else if (key == "image_size") cfg.image_size = std::stoi(value);
            else if (key == "patches_per_class") cfg.split.patches_per_class = std::stoi(value);
            else if (key == "patch_size") cfg.split.patch_size = std::stoi(value);
            else if (key == "train_count") cfg.split.train_count = std::stoi(value);
            else if (key == "test_count") cfg.split.test_count = std::stoi(value);
            else if (key == "seed") cfg.split.seed = std::stoull(value);
            else if (key == "svm_c") cfg.svm_c = std::stod(value);
            else if (key == "svm_epochs") cfg.svm_epochs = std::stoi(value);
            else if (key == "extractors") cfg.extractors = parse_extractors(value);
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "basis_cache") cfg.basis_cache = value;
            else if (key == "dump_features") cfg.dump_features = value == "on" || value == "true" || value == "1";
            else if (key == "write_manifest") cfg.write_manifest = value == "on" || value == "true" || value == "1";
            else throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": bad value for '" + key + "'");
        }
    }
    if (cfg.split.train_count + cfg.split.test_count >
        cfg.split.patches_per_class)
        throw std::runtime_error(
            "train_count + test_count exceeds patches_per_class");
    return cfg;
}

std::vector<BoundExtractor> bind_extractors(const std::vector<ExtractorSpec>& specs,
                                            int patch_size,
                                            const std::string& basis_cache) {
    std::vector<BoundExtractor> bound;
    for (const ExtractorSpec& spec : specs) {
        BoundExtractor be;
        be.name = spec.name;
        if (spec.name == "fs_dmd") {
            GridSpec grid{patch_size, patch_size};
            ModalBasis full = load_or_build_basis(grid, grid.nodes(), basis_cache);
            if (full.group_count() < spec.modes)
                throw std::runtime_error(
                    "basis yields " + std::to_string(full.group_count()) +
                    " invariant amplitudes, fewer than requested " +
                    std::to_string(spec.modes));
            auto projector = std::make_shared<DualProjector>(
                truncate_to_groups(full, spec.modes));
            int n_features = spec.modes;
            be.feature_dim = n_features;
            be.extract = [projector, n_features](const ImageBuffer& img) {
                return full_scale_features(*projector, img, n_features);
            };
        } else if (spec.name == "filtering_dmd") {
            auto bank = std::make_shared<FilterBank>(dmd_filter_bank());
            be.name = "filtering_dmd";
            be.feature_dim = bank->count();
            be.extract = [bank](const ImageBuffer& img) {
                FeatureVector fv = filter_variance_features(img, *bank);
                fv.extractor = "filtering_dmd";
                return fv;
            };
        } else if (spec.name == "dct3") {
            auto bank = std::make_shared<FilterBank>(dct_filter_bank(3));
            be.feature_dim = bank->count();
            be.extract = [bank](const ImageBuffer& img) {
                return filter_variance_features(img, *bank);
            };
        } else if (spec.name == "haralick") {
            be.feature_dim = 13;
            be.extract = [](const ImageBuffer& img) {
                return haralick_feature_vector(img);
            };
        } else if (spec.name == "lbp") {
            be.feature_dim = 256;
            be.extract = [](const ImageBuffer& img) {
                return lbp_feature_vector(img);
            };
        } else if (spec.name == "hog") {
            int cells = (patch_size / 8) * (patch_size / 8);
            be.feature_dim = cells * 9;
            be.extract = [](const ImageBuffer& img) {
                return hog_feature_vector(img);
            };
        } else {
            throw std::invalid_argument("unknown extractor: " + spec.name);
        }
        bound.push_back(std::move(be));
    }
    return bound;
}

bool ExperimentReport::all_ok() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const ReportRow& r) { return r.ok; });
}

ExperimentReport run_benchmark(const ExperimentConfig& cfg) {
    auto wall0 = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.started_at = utc_now();
    report.config_echo = echo_config(cfg);

    std::vector<TextureClass> classes = load_dataset(cfg);
    DatasetSplit split = make_split(classes, cfg.split);
    const std::string ds_id = dataset_id(cfg);

    if (!cfg.output_dir.empty()) fs::create_directories(cfg.output_dir);
    if (cfg.write_manifest)
        write_patch_manifest(
            (fs::path(cfg.output_dir) / "manifest.csv").string(), split);

    std::vector<int> y_train = labels_of(split.train);
    std::vector<int> y_test = labels_of(split.test);

    for (const ExtractorSpec& spec : cfg.extractors) {
        ReportRow row;
        row.dataset = ds_id;
        row.extractor = spec.name;
        try {
            // Bound separately per extractor so one failure cannot leak into
            // the others' rows.
            std::vector<BoundExtractor> one =
                bind_extractors({spec}, cfg.split.patch_size, cfg.basis_cache);
            const BoundExtractor& ex = one.front();
            row.feature_dim = ex.feature_dim;

            std::vector<FeatureVector> train_features =
                extract_all(ex, split.train, cfg.workers, ds_id);
            std::vector<FeatureVector> test_features =
                extract_all(ex, split.test, cfg.workers, ds_id);

            std::vector<double> times;
            times.reserve(train_features.size() + test_features.size());
            for (const auto& f : train_features) times.push_back(f.extract_seconds);
            for (const auto& f : test_features) times.push_back(f.extract_seconds);
            row.mean_extract_seconds =
                std::accumulate(times.begin(), times.end(), 0.0) /
                static_cast<double>(times.size());
            row.median_extract_seconds = median(times);

            if (cfg.dump_features) {
                std::vector<FeatureVector> all = train_features;
                all.insert(all.end(), test_features.begin(), test_features.end());
                write_feature_csv((fs::path(cfg.output_dir) /
                                   ("features_" + ex.name + ".csv"))
                                      .string(),
                                  all);
            }

            Eigen::MatrixXd x_train = to_matrix(train_features);
            Eigen::MatrixXd x_test = to_matrix(test_features);
            check_finite(x_train, ex.name);
            check_finite(x_test, ex.name);

            Standardizer standardizer;
            standardizer.fit(x_train);

            SvmOptions opts;
            opts.c = cfg.svm_c;
            opts.epochs = cfg.svm_epochs;
            opts.seed = cfg.split.seed;
            OvrSvmModel model =
                fit_ovr_svm(standardizer.transform(x_train), y_train, opts);

            std::vector<int> predicted =
                predict(model, standardizer.transform(x_test));
            row.accuracy = accuracy(predicted, y_test);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
            .count();
    if (!cfg.output_dir.empty())
        write_report_csv((fs::path(cfg.output_dir) / "report.csv").string(),
                         report);
    return report;
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open report for write: " + path);
    os << "# modalfeat report v1\n";
    os << "# started_at = " << report.started_at << "\n";
    os << "# wall_seconds = " << report.wall_seconds << "\n";
    for (const auto& [k, v] : report.config_echo)
        os << "# config " << k << " = " << v << "\n";
    os << "dataset,extractor,feature_dim,accuracy,mean_extract_seconds,"
          "median_extract_seconds,status,error\n";
    char buf[64];
    for (const ReportRow& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6e,%.6e", row.accuracy,
                      row.mean_extract_seconds, row.median_extract_seconds);
        os << row.dataset << ',' << row.extractor << ',' << row.feature_dim << ','
           << buf << ',' << (row.ok ? "ok" : "error") << ',' << row.error << "\n";
    }
}

std::vector<int> parse_mode_range(const std::string& text) {
    std::vector<int> counts;
    std::string t = trim(text);
    size_t dots = t.find("..");
    if (dots != std::string::npos) {
        size_t colon = t.find(':', dots);
        int start = std::stoi(t.substr(0, dots));
        int stop = colon == std::string::npos
                       ? std::stoi(t.substr(dots + 2))
                       : std::stoi(t.substr(dots + 2, colon - dots - 2));
        int step = colon == std::string::npos ? 1 : std::stoi(t.substr(colon + 1));
        if (step < 1 || stop < start)
            throw std::invalid_argument("bad mode range: " + text);
        for (int m = start; m <= stop; m += step) counts.push_back(m);
    } else {
        std::stringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) counts.push_back(std::stoi(item));
        }
    }
    if (counts.empty()) throw std::invalid_argument("empty mode range: " + text);
    return counts;
}

std::vector<SweepPoint> run_mode_sweep(const ExperimentConfig& cfg,
                                       const std::vector<int>& mode_counts) {
    if (mode_counts.empty()) throw std::invalid_argument("no mode counts");
    int max_modes = *std::max_element(mode_counts.begin(), mode_counts.end());

    std::vector<TextureClass> classes = load_dataset(cfg);
    DatasetSplit split = make_split(classes, cfg.split);
    std::vector<int> y_train = labels_of(split.train);
    std::vector<int> y_test = labels_of(split.test);
    const std::string ds_id = dataset_id(cfg);

    GridSpec grid{cfg.split.patch_size, cfg.split.patch_size};
    ModalBasis full = load_or_build_basis(grid, grid.nodes(), cfg.basis_cache);
    if (full.group_count() < max_modes)
        throw std::runtime_error("basis yields only " +
                                 std::to_string(full.group_count()) +
                                 " amplitudes, sweep needs " +
                                 std::to_string(max_modes));

    std::vector<SweepPoint> sweep;
    for (int modes : mode_counts) {
        auto projector =
            std::make_shared<DualProjector>(truncate_to_groups(full, modes));
        BoundExtractor ex;
        ex.name = "fs_dmd";
        ex.feature_dim = modes;
        ex.extract = [projector, modes](const ImageBuffer& img) {
            return full_scale_features(*projector, img, modes);
        };

        Eigen::MatrixXd x_train =
            to_matrix(extract_all(ex, split.train, cfg.workers, ds_id));
        Eigen::MatrixXd x_test =
            to_matrix(extract_all(ex, split.test, cfg.workers, ds_id));

        Standardizer standardizer;
        standardizer.fit(x_train);
        SvmOptions opts;
        opts.c = cfg.svm_c;
        opts.epochs = cfg.svm_epochs;
        opts.seed = cfg.split.seed;
        OvrSvmModel model =
            fit_ovr_svm(standardizer.transform(x_train), y_train, opts);
        double acc = accuracy(predict(model, standardizer.transform(x_test)),
                              y_test);
        sweep.push_back({modes, acc});
    }
    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        write_sweep_dat((fs::path(cfg.output_dir) / "sweep.dat").string(), sweep);
    }
    return sweep;
}

void write_sweep_dat(const std::string& path,
                     const std::vector<SweepPoint>& sweep) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open sweep file for write: " + path);
    os << "# modes accuracy\n";
    for (const SweepPoint& p : sweep) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%d %.6f\n", p.modes, p.accuracy);
        os << buf;
    }
}

std::vector<TimingRow> run_timing(const ExperimentConfig& cfg, int repetitions) {
    if (repetitions < 30)
        throw std::invalid_argument("timing needs at least 30 repetitions");

    std::vector<TextureClass> classes = load_dataset(cfg);
    DatasetSplit split = make_split(classes, cfg.split);
    // Time over the training patches: a small warm set re-visited many times.
    const std::vector<Sample>& samples = split.train;

    std::vector<BoundExtractor> bound =
        bind_extractors(cfg.extractors, cfg.split.patch_size, cfg.basis_cache);

    std::vector<TimingRow> rows;
    for (const BoundExtractor& ex : bound) {
        // Warm pass, unrecorded.
        for (const Sample& s : samples) (void)ex.extract(s.patch);

        std::vector<double> times;
        times.reserve(samples.size() * static_cast<size_t>(repetitions));
        for (int rep = 0; rep < repetitions; ++rep)
            for (const Sample& s : samples)
                times.push_back(ex.extract(s.patch).extract_seconds);

        TimingRow row;
        row.extractor = ex.name;
        row.images = static_cast<int>(samples.size());
        row.reps = repetitions;
        row.median_seconds = median(times);
        row.mean_seconds = std::accumulate(times.begin(), times.end(), 0.0) /
                           static_cast<double>(times.size());
        rows.push_back(std::move(row));
    }
    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        write_timing_csv((fs::path(cfg.output_dir) / "timing.csv").string(), rows);
    }
    return rows;
}

void write_timing_csv(const std::string& path,
                      const std::vector<TimingRow>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open timing file for write: " + path);
    os << "# modalfeat timing v1\n";
    os << "extractor,images,reps,median_seconds_per_image,mean_seconds_per_image\n";
    char buf[64];
    for (const TimingRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.6e,%.6e", row.median_seconds,
                      row.mean_seconds);
        os << row.extractor << ',' << row.images << ',' << row.reps << ',' << buf
           << "\n";
    }
}

}  // namespace modalfeat
