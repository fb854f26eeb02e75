// Command-line front end. Talks to the solver exclusively through the C API
// in ptycho.h; exit code 2 for usage errors, 1 for runtime failures.

#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "ptycho.h"

namespace {

struct GridDeleter {
    void operator()(ptycho_grid* g) const { ptycho_grid_destroy(g); }
};
struct WindowDeleter {
    void operator()(ptycho_window* w) const { ptycho_window_destroy(w); }
};
struct MeasurementsDeleter {
    void operator()(ptycho_measurements* m) const { ptycho_measurements_destroy(m); }
};
struct ResultDeleter {
    void operator()(ptycho_result* r) const { ptycho_result_destroy(r); }
};

using GridPtr = std::unique_ptr<ptycho_grid, GridDeleter>;
using WindowPtr = std::unique_ptr<ptycho_window, WindowDeleter>;
using MeasurementsPtr = std::unique_ptr<ptycho_measurements, MeasurementsDeleter>;
using ResultPtr = std::unique_ptr<ptycho_result, ResultDeleter>;

[[noreturn]] void die(const char* context) {
    std::fprintf(stderr, "ptycho: %s: %s\n", context, ptycho_last_error());
    std::exit(1);
}

void check(ptycho_status st, const char* context) {
    if (st != PTYCHO_OK) die(context);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Direct ptychographic phase retrieval: lifted inversion plus angular "
                 "synchronization"};
    app.require_subcommand(1);

    // window
    auto* cmd_window = app.add_subcommand("window", "Generate a window coefficient file (PTYG)");
    std::string w_kind;
    std::int64_t w_n = 0, w_s = 0;
    double w_a = 4.0, w_alpha = 0.99, w_photons = 1.0;
    bool w_one_sided = false;
    std::string w_out;
    cmd_window->add_option("--kind", w_kind, "ew or gw")->required()
        ->check(CLI::IsMember({"ew", "gw"}));
    cmd_window->add_option("--N", w_n, "ambient length")->required();
    cmd_window->add_option("--s", w_s, "support")->required();
    cmd_window->add_option("--a", w_a, "exponential decay (ew)");
    cmd_window->add_option("--alpha", w_alpha, "coverage in (0,1) (gw)");
    cmd_window->add_option("--photons", w_photons, "squared-norm normalization (gw)");
    cmd_window->add_flag("--one-sided", w_one_sided, "one-sided quantile convention (gw)");
    cmd_window->add_option("--out", w_out, "output PTYG path")->required();

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "Simulate squared-modulus measurements");
    std::string s_object, s_window, s_mode = "interior", s_out;
    std::int64_t s_k = 0, s_kappa = 1;
    int s_dims = 0;
    cmd_sim->add_option("--object", s_object, "object grid (PTYG or CSV)")->required();
    cmd_sim->add_option("--window-spec", s_window,
                        "ew:s=..,a=.. | gw:s=..,alpha=.. | file:w.ptyg")->required();
    cmd_sim->add_option("--K", s_k, "max frequency index per dimension")->required();
    cmd_sim->add_option("--kappa", s_kappa, "shift stride");
    cmd_sim->add_option("--mode", s_mode, "interior or circulant")
        ->check(CLI::IsMember({"interior", "circulant"}));
    cmd_sim->add_option("--dims", s_dims, "expected object dimension (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    cmd_sim->add_option("--out", s_out, "output PTYM path")->required();

    // reconstruct
    auto* cmd_rec = app.add_subcommand("reconstruct", "Reconstruct an object from measurements");
    std::string r_meas, r_window, r_projector = "tight", r_out, r_pgm;
    bool r_no_degree = false;
    cmd_rec->add_option("--measurements", r_meas, "PTYM path")->required();
    cmd_rec->add_option("--window-spec", r_window, "window used for the inversion")->required();
    cmd_rec->add_option("--projector", r_projector, "tight or pattern")
        ->check(CLI::IsMember({"tight", "pattern"}));
    cmd_rec->add_flag("--no-degree-norm", r_no_degree,
                      "disable the degree normalization of the synchronization matrix");
    cmd_rec->add_option("--out", r_out, "output estimate (PTYG)")->required();
    cmd_rec->add_option("--pgm-prefix", r_pgm,
                        "also write <prefix>_amp.pgm and <prefix>_phase.pgm");

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "Print error metrics for an estimate");
    std::string e_truth, e_est;
    cmd_eval->add_option("--truth", e_truth, "ground-truth grid")->required();
    cmd_eval->add_option("--estimate", e_est, "estimate grid")->required();

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
    std::string p_config, p_out;
    cmd_sweep->add_option("--config", p_config, "JSON config path")->required();
    cmd_sweep->add_option("--out", p_out, "output CSV path")->required();

    // phantom
    auto* cmd_phantom = app.add_subcommand("phantom", "Generate a seeded 2D test object");
    std::int64_t ph_n = 64;
    std::uint64_t ph_seed = 7;
    std::string ph_out;
    cmd_phantom->add_option("--N", ph_n, "image size")->required();
    cmd_phantom->add_option("--seed", ph_seed, "RNG seed");
    cmd_phantom->add_option("--out", ph_out, "output PTYG path")->required();

    CLI11_PARSE(app, argc, argv);

    if (*cmd_window) {
        ptycho_window* w = nullptr;
        if (w_kind == "ew")
            check(ptycho_window_exponential(w_n, w_s, w_a, &w), "window");
        else
            check(ptycho_window_gaussian(w_n, w_s, w_alpha, w_photons, w_one_sided ? 1 : 0, &w),
                  "window");
        WindowPtr wp(w);
        ptycho_grid* coeffs = nullptr;
        check(ptycho_window_coeffs(w, &coeffs), "window");
        GridPtr cp(coeffs);
        check(ptycho_grid_write(coeffs, w_out.c_str()), "window");
        return 0;
    }

    if (*cmd_sim) {
        ptycho_grid* object = nullptr;
        check(ptycho_grid_read(s_object.c_str(), &object), "simulate");
        GridPtr op(object);
        int32_t ndims = 0;
        check(ptycho_grid_ndims(object, &ndims), "simulate");
        if (s_dims != 0 && s_dims != ndims) {
            std::fprintf(stderr, "ptycho: simulate: object is %dD but --dims %d was given\n",
                         ndims, s_dims);
            return 1;
        }
        int64_t n = 0;
        check(ptycho_grid_extent(object, &n), "simulate");
        ptycho_window* w = nullptr;
        check(ptycho_window_from_spec(s_window.c_str(), n, &w), "simulate");
        WindowPtr wp(w);
        ptycho_measurements* ms = nullptr;
        const int32_t mode =
            s_mode == "circulant" ? PTYCHO_MODE_CIRCULANT : PTYCHO_MODE_INTERIOR;
        check(ptycho_simulate(object, w, s_k, s_kappa, mode, &ms), "simulate");
        MeasurementsPtr mp(ms);
        check(ptycho_measurements_write(ms, s_out.c_str()), "simulate");
        return 0;
    }

    if (*cmd_rec) {
        ptycho_measurements* ms = nullptr;
        check(ptycho_measurements_read(r_meas.c_str(), &ms), "reconstruct");
        MeasurementsPtr mp(ms);
        int64_t n = 0;
        check(ptycho_measurements_info(ms, nullptr, &n, nullptr, nullptr, nullptr),
              "reconstruct");
        ptycho_window* w = nullptr;
        check(ptycho_window_from_spec(r_window.c_str(), n, &w), "reconstruct");
        WindowPtr wp(w);
        ptycho_result* res = nullptr;
        const int32_t projector =
            r_projector == "pattern" ? PTYCHO_PROJECTOR_PATTERN : PTYCHO_PROJECTOR_TIGHT;
        const int32_t degree = r_no_degree ? PTYCHO_DEGREE_NORM_OFF : PTYCHO_DEGREE_NORM_AUTO;
        check(ptycho_reconstruct(ms, w, projector, degree, &res), "reconstruct");
        ResultPtr rp(res);
        ptycho_grid* est = nullptr;
        check(ptycho_result_estimate(res, &est), "reconstruct");
        GridPtr ep(est);
        check(ptycho_grid_write(est, r_out.c_str()), "reconstruct");
        int64_t components = 0;
        check(ptycho_result_components(res, &components), "reconstruct");
        std::printf("components=%lld\n", static_cast<long long>(components));
        if (!r_pgm.empty()) {
            int32_t ndims = 0;
            check(ptycho_grid_ndims(est, &ndims), "reconstruct");
            if (ndims == 2) {
                check(ptycho_grid_export_pgm(est, PTYCHO_PGM_AMPLITUDE,
                                             (r_pgm + "_amp.pgm").c_str()),
                      "reconstruct");
                check(ptycho_grid_export_pgm(est, PTYCHO_PGM_PHASE,
                                             (r_pgm + "_phase.pgm").c_str()),
                      "reconstruct");
            } else {
                std::fprintf(stderr, "ptycho: reconstruct: --pgm-prefix needs a 2D estimate\n");
                return 1;
            }
        }
        return 0;
    }

    if (*cmd_eval) {
        ptycho_grid* truth = nullptr;
        check(ptycho_grid_read(e_truth.c_str(), &truth), "eval");
        GridPtr tp(truth);
        ptycho_grid* est = nullptr;
        check(ptycho_grid_read(e_est.c_str(), &est), "eval");
        GridPtr ep(est);
        double total = 0, amp = 0, phase = 0;
        check(ptycho_metrics(truth, est, &total, &amp, &phase, nullptr), "eval");
        std::printf("mse_total,mse_phase,mse_amp\n%.12g,%.12g,%.12g\n", total, phase, amp);
        return 0;
    }

    if (*cmd_sweep) {
        check(ptycho_sweep(p_config.c_str(), p_out.c_str()), "sweep");
        return 0;
    }

    if (*cmd_phantom) {
        ptycho_grid* g = nullptr;
        check(ptycho_phantom(ph_n, ph_seed, &g), "phantom");
        GridPtr gp(g);
        check(ptycho_grid_write(g, ph_out.c_str()), "phantom");
        return 0;
    }

    return 2;
}
