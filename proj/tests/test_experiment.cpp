#include <doctest.h>

#include "test_util.hpp"

#include <filesystem>
#include <fstream>

#include "modalfeat/experiment.hpp"

using namespace modalfeat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Small synthetic setup that exercises the full pipeline in well under a
// second per extractor: 16x16 patches keep the fs_dmd eigensolve tiny.
ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig cfg = default_config();
    cfg.classes = 4;
    cfg.image_size = 96;
    cfg.split.patches_per_class = 40;
    cfg.split.patch_size = 16;
    cfg.split.train_count = 10;
    cfg.split.test_count = 30;
    cfg.split.seed = 99;
    cfg.svm_epochs = 250;
    cfg.extractors = parse_extractors("fs_dmd:30, haralick, lbp, hog, filtering_dmd, dct3");
    cfg.output_dir = out_dir;
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST_CASE("extractor lists parse with parameters") {
    std::vector<ExtractorSpec> specs =
        parse_extractors("fs_dmd:100, haralick, lbp,hog , filtering_dmd, dct3");
    REQUIRE(specs.size() == 6);
    CHECK(specs[0].name == "fs_dmd");
    CHECK(specs[0].modes == 100);
    CHECK(specs[1].name == "haralick");
    CHECK(specs[5].name == "dct3");
    CHECK_THROWS_AS(parse_extractors(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_extractors("fs_dmd:0"), std::invalid_argument);
}

TEST_CASE("mode ranges parse both syntaxes") {
    std::vector<int> range = parse_mode_range("10..100:10");
    REQUIRE(range.size() == 10);
    CHECK(range.front() == 10);
    CHECK(range.back() == 100);
    CHECK(parse_mode_range("5,7,9") == std::vector<int>{5, 7, 9});
    CHECK(parse_mode_range("3..5") == std::vector<int>{3, 4, 5});
    CHECK_THROWS_AS(parse_mode_range("10..5:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mode_range(""), std::invalid_argument);
}

TEST_CASE("config files round-trip through the parser") {
    TempDir dir("modalfeat_config_test");
    std::string path = (dir.path / "bench.cfg").string();
    {
        std::ofstream os(path);
        os << "# synthetic smoke benchmark\n";
        os << "dataset = synthetic\n";
        os << "classes = 5\n";
        os << "image_size = 128\n";
        os << "patch_size = 32\n";
        os << "patches_per_class = 100   # includes train and test\n";
        os << "train_count = 20\n";
        os << "test_count = 80\n";
        os << "seed = 1234\n";
        os << "svm_c = 2.5\n";
        os << "extractors = fs_dmd:60, dct3\n";
        os << "output_dir = " << (dir.path / "out").string() << "\n";
        os << "workers = 1\n";
    }
    ExperimentConfig cfg = load_config(path);
    CHECK(cfg.classes == 5);
    CHECK(cfg.image_size == 128);
    CHECK(cfg.split.patches_per_class == 100);
    CHECK(cfg.split.seed == 1234);
    CHECK(cfg.svm_c == doctest::Approx(2.5));
    CHECK(cfg.extractors.size() == 2);
    CHECK(cfg.extractors[0].modes == 60);

    std::string bad = (dir.path / "bad.cfg").string();
    {
        std::ofstream os(bad);
        os << "no_such_key = 7\n";
    }
    CHECK_THROWS_AS(load_config(bad), std::runtime_error);

    std::string overfull = (dir.path / "overfull.cfg").string();
    {
        std::ofstream os(overfull);
        os << "patches_per_class = 10\ntrain_count = 8\ntest_count = 8\n";
    }
    CHECK_THROWS_AS(load_config(overfull), std::runtime_error);
    CHECK_THROWS_AS(load_config((dir.path / "absent.cfg").string()),
                    std::runtime_error);
}

TEST_CASE("benchmark produces one row per extractor") {
    TempDir dir("modalfeat_bench_test");
    ExperimentConfig cfg = tiny_config((dir.path / "out").string());

    ExperimentReport report = run_benchmark(cfg);
    REQUIRE(report.rows.size() == 6);
    CHECK(report.all_ok());
    for (const ReportRow& row : report.rows) {
        CHECK(row.accuracy >= 0.0);
        CHECK(row.accuracy <= 1.0);
        CHECK(row.mean_extract_seconds > 0.0);
        CHECK(row.feature_dim > 0);
        CHECK(row.dataset == "synthetic");
    }

    write_report_csv((dir.path / "report.csv").string(), report);
    std::ifstream is(dir.path / "report.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "# modalfeat report v1");
    bool has_echo = false, has_header = false;
    while (std::getline(is, line)) {
        if (line.find("# config seed = 99") != std::string::npos) has_echo = true;
        if (line.find("dataset,extractor,") == 0) has_header = true;
    }
    CHECK(has_echo);
    CHECK(has_header);
}

TEST_CASE("benchmark accuracy is reproducible and order-independent") {
    TempDir dir("modalfeat_repro_test");
    ExperimentConfig cfg = tiny_config((dir.path / "out").string());
    cfg.extractors = parse_extractors("dct3, lbp");

    ExperimentReport first = run_benchmark(cfg);

    ExperimentConfig swapped = cfg;
    swapped.extractors = parse_extractors("lbp, dct3");
    swapped.workers = 1;
    ExperimentReport second = run_benchmark(swapped);

    REQUIRE(first.rows.size() == 2);
    REQUIRE(second.rows.size() == 2);
    CHECK(first.rows[0].extractor == "dct3");
    CHECK(second.rows[1].extractor == "dct3");
    CHECK(first.rows[0].accuracy == second.rows[1].accuracy);
    CHECK(first.rows[1].accuracy == second.rows[0].accuracy);
}

TEST_CASE("a failing extractor only poisons its own row") {
    TempDir dir("modalfeat_failrow_test");
    ExperimentConfig cfg = tiny_config((dir.path / "out").string());
    cfg.split.patch_size = 6;  // too small for the 8-pixel HOG cell
    cfg.split.patches_per_class = 30;
    cfg.split.train_count = 8;
    cfg.split.test_count = 20;
    cfg.extractors = parse_extractors("lbp, hog");

    ExperimentReport report = run_benchmark(cfg);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].ok);
    CHECK_FALSE(report.rows[1].ok);
    CHECK_FALSE(report.rows[1].error.empty());
    CHECK_FALSE(report.all_ok());
}

TEST_CASE("feature dumps use the csv row schema") {
    TempDir dir("modalfeat_dump_test");
    ExperimentConfig cfg = tiny_config((dir.path / "out").string());
    cfg.extractors = parse_extractors("dct3");
    cfg.dump_features = true;
    cfg.write_manifest = true;

    ExperimentReport report = run_benchmark(cfg);
    REQUIRE(report.all_ok());
    std::ifstream is(dir.path / "out" / "features_dct3.csv");
    REQUIRE(is.good());
    std::string line;
    std::getline(is, line);
    // dataset id, image id, extractor, seconds, then 9 values
    size_t commas = 0;
    for (char c : line)
        if (c == ',') ++commas;
    CHECK(commas == 3 + 9);
    CHECK(line.find("synthetic,") == 0);
    CHECK(line.find(",dct3,") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "manifest.csv"));
}

TEST_CASE("mode sweep rises to a plateau on easy data") {
    TempDir dir("modalfeat_sweep_test");
    ExperimentConfig cfg = tiny_config((dir.path / "out").string());

    std::vector<SweepPoint> sweep = run_mode_sweep(cfg, {5, 20});
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].modes == 5);
    CHECK(sweep[1].modes == 20);
    for (const SweepPoint& p : sweep) {
        CHECK(p.accuracy >= 0.0);
        CHECK(p.accuracy <= 1.0);
    }

    write_sweep_dat((dir.path / "sweep.dat").string(), sweep);
    std::ifstream is(dir.path / "sweep.dat");
    std::string line;
    std::getline(is, line);
    CHECK(line == "# modes accuracy");
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("timing requires warm repetitions and excludes setup") {
    TempDir dir("modalfeat_timing_test");
    ExperimentConfig cfg = tiny_config((dir.path / "out").string());
    cfg.extractors = parse_extractors("dct3, lbp");
    cfg.split.patches_per_class = 20;
    cfg.split.train_count = 5;
    cfg.split.test_count = 15;

    CHECK_THROWS_AS(run_timing(cfg, 10), std::invalid_argument);

    std::vector<TimingRow> rows = run_timing(cfg, 30);
    REQUIRE(rows.size() == 2);
    for (const TimingRow& row : rows) {
        CHECK(row.median_seconds > 0.0);
        CHECK(row.mean_seconds > 0.0);
        CHECK(row.images == 5 * cfg.classes);  // train patches across classes
        CHECK(row.reps == 30);
    }

    write_timing_csv((dir.path / "timing.csv").string(), rows);
    std::ifstream is(dir.path / "timing.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "# modalfeat timing v1");
    std::getline(is, line);
    CHECK(line ==
          "extractor,images,reps,median_seconds_per_image,mean_seconds_per_image");
}

TEST_CASE("unknown extractors are rejected at binding time") {
    CHECK_THROWS_AS(bind_extractors(std::vector<ExtractorSpec>{{"gabor", 0}}, 32),
                    std::invalid_argument);
}

TEST_CASE("class directories run the same protocol as synthetic data") {
    TempDir dir("modalfeat_extdata_test");

    // Two obviously separable "textures" saved as binary PGM files.
    auto write_pgm = [&](const fs::path& p, int dark, int bright, int period) {
        std::ofstream os(p, std::ios::binary);
        os << "P5\n48 48\n255\n";
        for (int r = 0; r < 48; ++r)
            for (int c = 0; c < 48; ++c)
                os.put(static_cast<char>((c / period) % 2 ? bright : dark));
    };
    fs::create_directories(dir.path / "data" / "coarse");
    fs::create_directories(dir.path / "data" / "fine");
    write_pgm(dir.path / "data" / "coarse" / "img.pgm", 40, 200, 8);
    write_pgm(dir.path / "data" / "fine" / "img.pgm", 40, 200, 2);

    ExperimentConfig cfg = default_config();
    cfg.dataset = (dir.path / "data").string();
    cfg.split.patches_per_class = 40;
    cfg.split.patch_size = 16;
    cfg.split.train_count = 10;
    cfg.split.test_count = 30;
    cfg.split.seed = 12;
    cfg.extractors = parse_extractors("dct3");
    cfg.output_dir = (dir.path / "out").string();
    cfg.workers = 1;

    ExperimentReport report = run_benchmark(cfg);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].ok);
    CHECK(report.rows[0].dataset == "data");
    CHECK(report.rows[0].accuracy > 0.9);  // stripe periods differ 4x
}
