// Exercises the shared-library surface through ptycho.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ptycho.h"

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ptycho_capi_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("version and error reporting") {
    CHECK(std::string(ptycho_version()).size() > 0);
    ptycho_grid* g = nullptr;
    CHECK(ptycho_grid_read("/nonexistent/file.ptyg", &g) == PTYCHO_ERR_IO);
    CHECK(std::string(ptycho_last_error()).size() > 0);
    CHECK(ptycho_grid_create(1, 4, nullptr, nullptr, &g) == PTYCHO_ERR_INVALID);
    CHECK(ptycho_window_exponential(8, 20, 4.0, nullptr) == PTYCHO_ERR_INVALID);
    ptycho_window* w = nullptr;
    CHECK(ptycho_window_exponential(8, 20, 4.0, &w) == PTYCHO_ERR_INVALID);
}

TEST_CASE("windows through the C surface") {
    ptycho_window* w = nullptr;
    REQUIRE(ptycho_window_gaussian(16, 8, 0.99, 1.0, 0, &w) == PTYCHO_OK);
    ptycho_grid* coeffs = nullptr;
    REQUIRE(ptycho_window_coeffs(w, &coeffs) == PTYCHO_OK);
    int64_t size = 0;
    CHECK(ptycho_grid_size(coeffs, &size) == PTYCHO_OK);
    CHECK(size == 16);
    std::vector<double> re(16), im(16);
    CHECK(ptycho_grid_values(coeffs, re.data(), im.data()) == PTYCHO_OK);
    double sq = 0.0;
    for (int i = 0; i < 16; ++i) sq += re[i] * re[i] + im[i] * im[i];
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    ptycho_grid_destroy(coeffs);
    ptycho_window_destroy(w);

    ptycho_window* spec = nullptr;
    REQUIRE(ptycho_window_from_spec("ew:s=4,a=4", 16, &spec) == PTYCHO_OK);
    ptycho_window_destroy(spec);
    CHECK(ptycho_window_from_spec("bogus", 16, &spec) == PTYCHO_ERR_INVALID);
}

TEST_CASE("full pipeline over the shared library") {
    TempDir tmp;
    ptycho_grid* truth = nullptr;
    REQUIRE(ptycho_phantom(16, 7, &truth) == PTYCHO_OK);

    const std::string truth_path = tmp.file("truth.ptyg");
    REQUIRE(ptycho_grid_write(truth, truth_path.c_str()) == PTYCHO_OK);
    ptycho_grid* reread = nullptr;
    REQUIRE(ptycho_grid_read(truth_path.c_str(), &reread) == PTYCHO_OK);
    double t0 = -1;
    CHECK(ptycho_metrics(truth, reread, &t0, nullptr, nullptr, nullptr) == PTYCHO_OK);
    CHECK(t0 == 0.0);
    ptycho_grid_destroy(reread);

    ptycho_window* w = nullptr;
    REQUIRE(ptycho_window_exponential(16, 4, 4.0, &w) == PTYCHO_OK);
    ptycho_measurements* ms = nullptr;
    REQUIRE(ptycho_simulate(truth, w, 6, 1, PTYCHO_MODE_CIRCULANT, &ms) == PTYCHO_OK);

    int32_t ndims = 0;
    int64_t extent = 0, support = 0, max_freq = 0, count = 0;
    CHECK(ptycho_measurements_info(ms, &ndims, &extent, &support, &max_freq, &count) ==
          PTYCHO_OK);
    CHECK(ndims == 2);
    CHECK(extent == 16);
    CHECK(support == 4);
    CHECK(max_freq == 6);
    CHECK(count == 16 * 7 * 16 * 7);

    const std::string meas_path = tmp.file("meas.ptym");
    REQUIRE(ptycho_measurements_write(ms, meas_path.c_str()) == PTYCHO_OK);
    ptycho_measurements* ms2 = nullptr;
    REQUIRE(ptycho_measurements_read(meas_path.c_str(), &ms2) == PTYCHO_OK);

    ptycho_result* res = nullptr;
    REQUIRE(ptycho_reconstruct(ms2, w, PTYCHO_PROJECTOR_TIGHT, PTYCHO_DEGREE_NORM_AUTO, &res) ==
            PTYCHO_OK);
    int64_t components = 0;
    CHECK(ptycho_result_components(res, &components) == PTYCHO_OK);
    CHECK(components == 1);
    int64_t iterations = 0;
    CHECK(ptycho_result_iterations(res, &iterations) == PTYCHO_OK);
    CHECK(iterations > 0);
    double residual = -1;
    CHECK(ptycho_result_residual(res, &residual) == PTYCHO_OK);
    CHECK(residual < 1e-8);

    ptycho_grid* estimate = nullptr;
    REQUIRE(ptycho_result_estimate(res, &estimate) == PTYCHO_OK);
    double total = -1, amp = -1, phase = -1, theta = 0;
    CHECK(ptycho_metrics(truth, estimate, &total, &amp, &phase, &theta) == PTYCHO_OK);
    CHECK(total < 1e-10);

    CHECK(ptycho_grid_export_pgm(estimate, PTYCHO_PGM_AMPLITUDE, tmp.file("a.pgm").c_str()) ==
          PTYCHO_OK);
    CHECK(ptycho_grid_export_pgm(estimate, PTYCHO_PGM_PHASE, tmp.file("p.pgm").c_str()) ==
          PTYCHO_OK);

    ptycho_grid_destroy(estimate);
    ptycho_result_destroy(res);
    ptycho_measurements_destroy(ms2);
    ptycho_measurements_destroy(ms);
    ptycho_window_destroy(w);
    ptycho_grid_destroy(truth);
}

TEST_CASE("sweep through the C surface") {
    TempDir tmp;
    const std::string cfg = tmp.file("sweep.json");
    {
        std::ofstream os(cfg);
        os << R"({"N":16,"s":4,"K":6,"kappa":[1],"projectors":["tight"],
                  "windows":[{"kind":"ew","a":4.0}],"mode":"circulant","seed":3})";
    }
    const std::string out = tmp.file("sweep.csv");
    REQUIRE(ptycho_sweep(cfg.c_str(), out.c_str()) == PTYCHO_OK);
    std::ifstream is(out);
    std::string header, row;
    REQUIRE(std::getline(is, header));
    CHECK(header == "kappa,projector,window,mse_total,mse_phase,mse_amp,components,seconds");
    REQUIRE(std::getline(is, row));
    CHECK(row.rfind("1,tight,ew(a=4),", 0) == 0);
    CHECK(ptycho_sweep(tmp.file("missing.json").c_str(), out.c_str()) == PTYCHO_ERR_IO);
}
