#pragma once

#include <functional>
#include <string>
#include <vector>

#include "modalfeat/dataset.hpp"
#include "modalfeat/feature_vector.hpp"

namespace modalfeat {

struct ExtractorSpec {
    std::string name;  // fs_dmd | haralick | lbp | hog | filtering_dmd | dct3
    int modes = 100;   // fs_dmd feature count
};

// "fs_dmd:100, haralick, lbp" -> specs
std::vector<ExtractorSpec> parse_extractors(const std::string& text);

struct ExperimentConfig {
    std::string dataset = "synthetic";  // "synthetic" or a class-directory root
    int classes = 8;
    int image_size = 256;  // synthetic source image side
    SplitSpec split;
    double svm_c = 1.0;
    int svm_epochs = 200;
    std::vector<ExtractorSpec> extractors;
    std::string output_dir = ".";
    int workers = 0;  // 0 = hardware concurrency
    std::string basis_cache;
    bool dump_features = false;
    bool write_manifest = false;
};

ExperimentConfig default_config();

// Flat "key = value" text config; '#' starts a comment. Unknown keys are an
// error so typos do not silently fall back to defaults.
ExperimentConfig load_config(const std::string& path);

struct ReportRow {
    std::string dataset;
    std::string extractor;
    int feature_dim = 0;
    double accuracy = 0.0;
    double mean_extract_seconds = 0.0;
    double median_extract_seconds = 0.0;
    bool ok = true;
    std::string error;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::string started_at;  // UTC timestamp
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> config_echo;

    bool all_ok() const;
};

// Extract -> standardise -> fit one-versus-rest SVM on the train split ->
// score the test split, once per configured extractor. Extraction failures
// abort that extractor's row only.
ExperimentReport run_benchmark(const ExperimentConfig& config);
void write_report_csv(const std::string& path, const ExperimentReport& report);

struct SweepPoint {
    int modes = 0;
    double accuracy = 0.0;
};

// Full-scale DMD accuracy as a function of the invariant-feature count.
std::vector<SweepPoint> run_mode_sweep(const ExperimentConfig& config,
                                       const std::vector<int>& mode_counts);
void write_sweep_dat(const std::string& path, const std::vector<SweepPoint>& sweep);

// "10..100:10" -> {10, 20, ..., 100}; a comma list is also accepted.
std::vector<int> parse_mode_range(const std::string& text);

struct TimingRow {
    std::string extractor;
    int images = 0;
    int reps = 0;
    double median_seconds = 0.0;
    double mean_seconds = 0.0;
};

// Median per-image extraction time over warm repetitions, single worker,
// basis and bank construction excluded from the timed region.
std::vector<TimingRow> run_timing(const ExperimentConfig& config, int repetitions);
void write_timing_csv(const std::string& path, const std::vector<TimingRow>& rows);

// An extractor bound to its precomputed state (basis, dual matrix, banks);
// calling extract is pure and safe from concurrent threads.
struct BoundExtractor {
    std::string name;
    int feature_dim = 0;
    std::function<FeatureVector(const ImageBuffer&)> extract;
};

// Binds extractors for a given patch grid. Basis-backed extractors solve (or
// load) their modal basis here, outside any timed region.
std::vector<BoundExtractor> bind_extractors(const std::vector<ExtractorSpec>& specs,
                                            int patch_size,
                                            const std::string& basis_cache = {});

}  // namespace modalfeat
