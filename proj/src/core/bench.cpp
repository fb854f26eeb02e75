#include "core/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "core/forward.hpp"
#include "core/solver2d.hpp"

namespace ptycho {

namespace {

// portable uniform in [0,1): 53 random bits, independent of library
// distribution internals
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// low-pass filter by truncating the centered DFT at |xi| <= n/8 per axis;
// direct sums keep this dependency-free at bench scales
Eigen::MatrixXd smooth_field(std::int64_t n, std::mt19937_64& rng) {
    Eigen::MatrixXd noise(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) noise(i, j) = next_uniform(rng);

    const std::int64_t cut = std::max<std::int64_t>(1, n / 8);
    const std::int64_t width = 2 * cut + 1;
    Eigen::MatrixXcd spec(width, width);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::int64_t a = -cut; a <= cut; ++a)
        for (std::int64_t b = -cut; b <= cut; ++b) {
            cdouble acc(0.0, 0.0);
            for (std::int64_t i = 0; i < n; ++i)
                for (std::int64_t j = 0; j < n; ++j) {
                    const double phase = -two_pi *
                                         (static_cast<double>(a * i) + static_cast<double>(b * j)) /
                                         static_cast<double>(n);
                    acc += noise(i, j) * cdouble(std::cos(phase), std::sin(phase));
                }
            spec(a + cut, b + cut) = acc;
        }
    Eigen::MatrixXd field(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            cdouble acc(0.0, 0.0);
            for (std::int64_t a = -cut; a <= cut; ++a)
                for (std::int64_t b = -cut; b <= cut; ++b) {
                    const double phase = two_pi *
                                         (static_cast<double>(a * i) + static_cast<double>(b * j)) /
                                         static_cast<double>(n);
                    acc += spec(a + cut, b + cut) * cdouble(std::cos(phase), std::sin(phase));
                }
            field(i, j) = acc.real() / static_cast<double>(n * n);
        }
    const double lo = field.minCoeff();
    const double hi = field.maxCoeff();
    if (hi > lo) field = (field.array() - lo) / (hi - lo);
    return field;
}

} // namespace

ComplexGrid phantom(std::int64_t n, std::uint64_t seed, double amp_lo, double amp_hi,
                    double phase_lo, double phase_hi) {
    if (n < 8) throw Error(ErrorKind::invalid_argument, "phantom needs N >= 8");
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd amp = smooth_field(n, rng);
    const Eigen::MatrixXd phs = smooth_field(n, rng);
    VectorXcd values(n * n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            const double a = amp_lo + (amp_hi - amp_lo) * amp(i, j);
            const double p = phase_lo + (phase_hi - phase_lo) * phs(i, j);
            values[i * n + j] = a * cdouble(std::cos(p), std::sin(p));
        }
    return make_grid_2d(n, std::move(values));
}

Alignment align_global_phase(const ComplexGrid& truth, const ComplexGrid& estimate) {
    if (truth.ndims != estimate.ndims || truth.extent != estimate.extent)
        throw Error(ErrorKind::invalid_argument, "grids must share the shape for alignment");
    const cdouble ip = estimate.values.dot(truth.values); // sum conj(est) * truth
    Alignment out;
    out.aligned = estimate;
    if (ip == cdouble(0.0, 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.theta = std::arg(ip);
    const cdouble rot(std::cos(out.theta), std::sin(out.theta));
    out.aligned.values *= rot;
    return out;
}

MseMetrics mse_metrics(const ComplexGrid& truth, const ComplexGrid& estimate) {
    const Alignment al = align_global_phase(truth, estimate);
    const auto n = static_cast<double>(truth.values.size());
    MseMetrics m;
    m.total = (truth.values - al.aligned.values).squaredNorm() / n;
    m.amplitude =
        (truth.values.cwiseAbs() - al.aligned.values.cwiseAbs()).squaredNorm() / n;
    const double lit = 0.05 * truth.values.cwiseAbs().maxCoeff();
    double acc = 0.0;
    std::int64_t count = 0;
    for (Eigen::Index i = 0; i < truth.values.size(); ++i) {
        if (std::abs(truth.values[i]) <= lit) continue;
        const double d = std::remainder(
            std::arg(truth.values[i]) - std::arg(al.aligned.values[i]), 2.0 * std::numbers::pi);
        acc += d * d;
        ++count;
    }
    m.phase = count > 0 ? acc / static_cast<double>(count) : 0.0;
    return m;
}

SweepConfig parse_sweep_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::io, std::string("sweep config: ") + e.what());
    }
    auto window_from_json = [](const nlohmann::json& w) {
        WindowSpec ws;
        const std::string kind = w.at("kind").get<std::string>();
        if (kind == "ew") {
            ws.kind = WindowKind::exponential;
            ws.a = w.value("a", 4.0);
        } else if (kind == "gw") {
            ws.kind = WindowKind::gaussian;
            ws.alpha = w.value("alpha", 0.99);
            ws.photons = w.value("photons", 1.0);
            ws.one_sided = w.value("one_sided", false);
        } else if (kind == "file") {
            ws.kind = WindowKind::custom;
            ws.path = w.at("path").get<std::string>();
        } else {
            throw Error(ErrorKind::invalid_argument, "unknown window kind '" + kind + "'");
        }
        if (w.contains("s")) ws.support = w["s"].get<std::int64_t>();
        return ws;
    };
    try {
        SweepConfig cfg;
        cfg.n = j.at("N").get<std::int64_t>();
        cfg.support = j.at("s").get<std::int64_t>();
        cfg.max_freq = j.at("K").get<std::int64_t>();
        cfg.strides = j.at("kappa").get<std::vector<std::int64_t>>();
        cfg.projectors = j.at("projectors").get<std::vector<std::string>>();
        for (const auto& w : j.at("windows")) {
            WindowSpec ws = window_from_json(w);
            if (ws.kind != WindowKind::custom && ws.support == 0) ws.support = cfg.support;
            cfg.windows.push_back(std::move(ws));
        }
        if (j.contains("probe")) {
            WindowSpec ws = window_from_json(j["probe"]);
            if (ws.kind != WindowKind::custom && ws.support == 0) ws.support = cfg.support;
            cfg.probe = std::move(ws);
        }
        if (j.contains("mode")) {
            const std::string mode = j["mode"].get<std::string>();
            if (mode == "interior")
                cfg.mode = ShiftMode::interior;
            else if (mode == "circulant")
                cfg.mode = ShiftMode::circulant;
            else
                throw Error(ErrorKind::invalid_argument, "unknown shift mode '" + mode + "'");
        }
        cfg.seed = j.value("seed", std::uint64_t{7});
        if (cfg.strides.empty() || cfg.projectors.empty() || cfg.windows.empty())
            throw Error(ErrorKind::invalid_argument,
                        "sweep config needs kappa, projectors and windows entries");
        for (const auto& p : cfg.projectors)
            if (p != "tight" && p != "pattern")
                throw Error(ErrorKind::invalid_argument, "unknown projector '" + p + "'");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::io, std::string("sweep config: ") + e.what());
    }
}

SweepConfig read_sweep_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_sweep_config(buf.str());
}

std::vector<SweepRow> sweep(const SweepConfig& config) {
    const ComplexGrid truth = phantom(config.n, config.seed);
    std::vector<SweepRow> rows;
    for (const WindowSpec& wspec : config.windows) {
        const WindowSpec& probe_spec = config.probe ? *config.probe : wspec;
        for (const std::string& projector : config.projectors) {
            for (std::int64_t stride : config.strides) {
                SweepRow row;
                row.stride = stride;
                row.projector = projector;
                row.window = wspec.label();
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    const ShiftSet shifts =
                        make_shift_set(config.n, config.support, stride, config.mode);
                    const Window probe_w = realize_window(probe_spec, config.n);
                    const Window rec_w = realize_window(wspec, config.n);
                    const MeasurementSet ms =
                        simulate_2d(truth, Window2D{probe_w, probe_w}, shifts, config.max_freq);
                    ReconstructOptions opts;
                    opts.projector =
                        projector == "tight" ? Projector::tight : Projector::pattern;
                    const ReconstructionResult res =
                        reconstruct_2d(ms, Window2D{rec_w, rec_w}, opts);
                    row.mse = mse_metrics(truth, res.estimate);
                    row.components = res.sync.components;
                } catch (const std::exception& e) {
                    row.error = e.what();
                    row.mse = {std::nan(""), std::nan(""), std::nan("")};
                }
                row.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot write " + path);
    os << "kappa,projector,window,mse_total,mse_phase,mse_amp,components,seconds\n";
    os.precision(12);
    for (const SweepRow& r : rows) {
        os << r.stride << "," << r.projector << "," << r.window << "," << r.mse.total << ","
           << r.mse.phase << "," << r.mse.amplitude << "," << r.components << "," << r.seconds
           << "\n";
    }
    if (!os) throw Error(ErrorKind::io, "failed writing " + path);
}

} // namespace ptycho
