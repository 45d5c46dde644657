// modalbench: texture feature extraction benchmark runner.
//
//   modalbench bench run <config>            accuracy + timing report
//   modalbench bench sweep <config> --modes 10..100:10
//   modalbench bench time <config> --reps 50
//   modalbench bank dump <dct3|dmd3> [--out file]
//   modalbench basis build <RxC> --nq N [--cache file]

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "modalfeat/dmd_features.hpp"
#include "modalfeat/experiment.hpp"
#include "modalfeat/filter_features.hpp"
#include "modalfeat/modal_basis.hpp"

namespace fs = std::filesystem;
using namespace modalfeat;

namespace {

int cmd_run(const std::string& config_path) {
    ExperimentConfig cfg = load_config(config_path);
    ExperimentReport report = run_benchmark(cfg);
    std::string out = (fs::path(cfg.output_dir) / "report.csv").string();

    std::printf("%-16s %-14s %9s %14s\n", "extractor", "dataset", "accuracy",
                "median s/img");
    for (const ReportRow& row : report.rows) {
        if (row.ok)
            std::printf("%-16s %-14s %9.4f %14.3e\n", row.extractor.c_str(),
                        row.dataset.c_str(), row.accuracy,
                        row.median_extract_seconds);
        else
            std::printf("%-16s %-14s %9s %14s  %s\n", row.extractor.c_str(),
                        row.dataset.c_str(), "error", "-", row.error.c_str());
    }
    std::printf("report written to %s (%.1f s)\n", out.c_str(),
                report.wall_seconds);
    return report.all_ok() ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& modes) {
    ExperimentConfig cfg = load_config(config_path);
    std::vector<int> counts = parse_mode_range(modes);
    std::vector<SweepPoint> sweep = run_mode_sweep(cfg, counts);
    std::string out = (fs::path(cfg.output_dir) / "sweep.dat").string();
    for (const SweepPoint& p : sweep)
        std::printf("%4d modes  accuracy %.4f\n", p.modes, p.accuracy);
    std::printf("sweep written to %s\n", out.c_str());
    return 0;
}

int cmd_time(const std::string& config_path, int reps) {
    ExperimentConfig cfg = load_config(config_path);
    std::vector<TimingRow> rows = run_timing(cfg, reps);
    std::string out = (fs::path(cfg.output_dir) / "timing.csv").string();
    for (const TimingRow& row : rows)
        std::printf("%-16s median %.3e s/img over %d images x %d reps\n",
                    row.extractor.c_str(), row.median_seconds, row.images,
                    row.reps);
    std::printf("timing written to %s\n", out.c_str());
    return 0;
}

int cmd_bank_dump(const std::string& which, const std::string& out_path) {
    FilterBank bank;
    if (which == "dct3")
        bank = dct_filter_bank(3);
    else if (which == "dmd3")
        bank = dmd_filter_bank();
    else {
        std::fprintf(stderr, "unknown bank '%s' (expected dct3 or dmd3)\n",
                     which.c_str());
        return 2;
    }
    if (out_path.empty()) {
        dump_bank(std::cout, bank);
    } else {
        std::ofstream os(out_path, std::ios::trunc);
        if (!os) {
            std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
            return 1;
        }
        dump_bank(os, bank);
        std::printf("bank written to %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_basis_build(const std::string& geometry, int n_q, std::string cache) {
    GridSpec grid;
    if (std::sscanf(geometry.c_str(), "%dx%d", &grid.rows, &grid.cols) != 2) {
        std::fprintf(stderr, "geometry must look like 16x16, got %s\n",
                     geometry.c_str());
        return 2;
    }
    if (n_q <= 0) n_q = grid.nodes();
    if (cache.empty())
        cache = "basis_" + std::to_string(grid.rows) + "x" +
                std::to_string(grid.cols) + "_nq" + std::to_string(n_q) + ".bin";

    ModalBasis basis = load_or_build_basis(grid, n_q, cache);
    std::printf("basis %dx%d, %d modes in %d groups, eigenvalues [%g, %g]\n",
                grid.rows, grid.cols, basis.mode_count(), basis.group_count(),
                basis.eigenvalues.minCoeff(), basis.eigenvalues.maxCoeff());
    std::printf("cache: %s\n", cache.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"texture feature extraction benchmark"};
    app.require_subcommand(1);

    std::string config_path, modes = "10..100:10", bank_name, bank_out;
    std::string geometry, cache;
    int reps = 50, n_q = 0;

    CLI::App* bench = app.add_subcommand("bench", "run experiments");
    bench->require_subcommand(1);
    CLI::App* bench_run = bench->add_subcommand("run", "accuracy benchmark");
    bench_run->add_option("config", config_path, "config file")->required();
    CLI::App* bench_sweep =
        bench->add_subcommand("sweep", "full-scale DMD mode-count sweep");
    bench_sweep->add_option("config", config_path, "config file")->required();
    bench_sweep->add_option("--modes", modes, "counts, e.g. 10..100:10");
    CLI::App* bench_time = bench->add_subcommand("time", "extraction timing");
    bench_time->add_option("config", config_path, "config file")->required();
    bench_time->add_option("--reps", reps, "repetitions (>= 30)");

    CLI::App* bank = app.add_subcommand("bank", "filter banks");
    bank->require_subcommand(1);
    CLI::App* bank_dump = bank->add_subcommand("dump", "write kernels as text");
    bank_dump->add_option("name", bank_name, "dct3 or dmd3")->required();
    bank_dump->add_option("--out", bank_out, "output file (default stdout)");

    CLI::App* basis = app.add_subcommand("basis", "modal bases");
    basis->require_subcommand(1);
    CLI::App* basis_build = basis->add_subcommand("build", "solve and cache");
    basis_build->add_option("geometry", geometry, "grid, e.g. 32x32")->required();
    basis_build->add_option("--nq", n_q, "mode count (default rows*cols)");
    basis_build->add_option("--cache", cache, "cache file path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench_run->parsed()) return cmd_run(config_path);
        if (bench_sweep->parsed()) return cmd_sweep(config_path, modes);
        if (bench_time->parsed()) return cmd_time(config_path, reps);
        if (bank_dump->parsed()) return cmd_bank_dump(bank_name, bank_out);
        if (basis_build->parsed()) return cmd_basis_build(geometry, n_q, cache);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
