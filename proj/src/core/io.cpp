#include "core/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ptycho {

namespace {

// Serialized integers and doubles are little-endian; this code targets
// little-endian hosts and traps elsewhere.
static_assert(std::endian::native == std::endian::little,
              "PTYG/PTYM serialization assumes a little-endian host");

template <typename T>
void write_raw(std::ofstream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& is, const char* what) {
    T value;
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw Error(ErrorKind::io, std::string("unexpected end of ") + what + " stream");
    return value;
}

void check_writable(std::ofstream& os, const std::string& path) {
    if (!os) throw Error(ErrorKind::io, "cannot write " + path);
}

std::uint32_t mode_code(ShiftMode mode) { return mode == ShiftMode::interior ? 0u : 1u; }

ShiftMode mode_from_code(std::uint32_t code) {
    if (code == 0u) return ShiftMode::interior;
    if (code == 1u) return ShiftMode::circulant;
    throw Error(ErrorKind::io, "unknown shift mode code " + std::to_string(code));
}

} // namespace

GridFormat grid_format_for_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".csv") return GridFormat::csv;
    return GridFormat::ptyg;
}

ComplexGrid read_grid(const std::string& path) {
    return read_grid(path, grid_format_for_path(path));
}

void write_grid(const ComplexGrid& grid, const std::string& path) {
    write_grid(grid, path, grid_format_for_path(path));
}

static ComplexGrid read_grid_ptyg(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || std::memcmp(magic.data(), "PTYG", 4) != 0)
        throw Error(ErrorKind::io, "bad PTYG magic in " + path);
    const auto version = read_raw<std::uint32_t>(is, "PTYG");
    if (version != 1u) throw Error(ErrorKind::io, "unsupported PTYG version " + std::to_string(version));
    const auto ndims = read_raw<std::uint32_t>(is, "PTYG");
    if (ndims != 1u && ndims != 2u)
        throw Error(ErrorKind::io, "PTYG ndims must be 1 or 2, got " + std::to_string(ndims));
    std::int64_t extent = 0;
    std::int64_t count = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
        const auto dim = read_raw<std::uint32_t>(is, "PTYG");
        if (dim == 0) throw Error(ErrorKind::io, "zero dimension in " + path);
        if (d == 0)
            extent = dim;
        else if (static_cast<std::int64_t>(dim) != extent)
            throw Error(ErrorKind::io, "2D PTYG grids must be square");
        count *= dim;
    }
    VectorXcd values(count);
    for (std::int64_t i = 0; i < count; ++i) {
        const double re = read_raw<double>(is, "PTYG");
        const double im = read_raw<double>(is, "PTYG");
        values[i] = cdouble(re, im);
    }
    return ndims == 1 ? make_grid_1d(std::move(values)) : make_grid_2d(extent, std::move(values));
}

static void write_grid_ptyg(const ComplexGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    check_writable(os, path);
    os.write("PTYG", 4);
    write_raw<std::uint32_t>(os, 1u);
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(grid.ndims));
    for (int d = 0; d < grid.ndims; ++d)
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(grid.extent));
    for (Eigen::Index i = 0; i < grid.values.size(); ++i) {
        if (!std::isfinite(grid.values[i].real()) || !std::isfinite(grid.values[i].imag()))
            throw Error(ErrorKind::invalid_argument, "refusing to write non-finite grid values");
        write_raw<double>(os, grid.values[i].real());
        write_raw<double>(os, grid.values[i].imag());
    }
    if (!os) throw Error(ErrorKind::io, "failed writing " + path);
}

static ComplexGrid read_grid_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    std::string line;
    std::int64_t lineno = 0;
    int ndims = 0;
    std::int64_t extent = 0;

    auto parse_error = [&](const std::string& what) {
        return Error(ErrorKind::io, path + ":" + std::to_string(lineno) + ": " + what);
    };

    if (!std::getline(is, line)) throw Error(ErrorKind::io, "empty CSV file " + path);
    ++lineno;
    if (line.rfind("# dims=", 0) != 0) throw parse_error("expected '# dims=' header");
    {
        std::string dims = line.substr(7);
        const auto comma = dims.find(',');
        try {
            if (comma == std::string::npos) {
                ndims = 1;
                extent = std::stoll(dims);
            } else {
                ndims = 2;
                extent = std::stoll(dims.substr(0, comma));
                if (std::stoll(dims.substr(comma + 1)) != extent)
                    throw parse_error("2D CSV grids must be square");
            }
        } catch (const std::invalid_argument&) {
            throw parse_error("malformed dims header");
        }
    }
    if (!std::getline(is, line)) throw Error(ErrorKind::io, "missing CSV column header in " + path);
    ++lineno;
    if (line != "re,im") throw parse_error("expected header 're,im'");

    const std::int64_t count = ndims == 1 ? extent : extent * extent;
    VectorXcd values(count);
    for (std::int64_t i = 0; i < count; ++i) {
        if (!std::getline(is, line)) {
            ++lineno;
            throw parse_error("unexpected end of file, expected " + std::to_string(count) + " rows");
        }
        ++lineno;
        std::istringstream row(line);
        std::string a, b, extra;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw parse_error("expected two comma-separated values");
        if (std::getline(row, extra, ','))
            throw parse_error("expected two comma-separated values, got more");
        try {
            values[i] = cdouble(std::stod(a), std::stod(b));
        } catch (const std::exception&) {
            throw parse_error("malformed number");
        }
    }
    return ndims == 1 ? make_grid_1d(std::move(values)) : make_grid_2d(extent, std::move(values));
}

static void write_grid_csv(const ComplexGrid& grid, const std::string& path) {
    std::ofstream os(path);
    check_writable(os, path);
    os << "# dims=" << grid.extent;
    if (grid.ndims == 2) os << "," << grid.extent;
    os << "\n";
    os << "re,im\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < grid.values.size(); ++i) {
        if (!std::isfinite(grid.values[i].real()) || !std::isfinite(grid.values[i].imag()))
            throw Error(ErrorKind::invalid_argument, "refusing to write non-finite grid values");
        os << grid.values[i].real() << "," << grid.values[i].imag() << "\n";
    }
    if (!os) throw Error(ErrorKind::io, "failed writing " + path);
}

ComplexGrid read_grid(const std::string& path, GridFormat format) {
    return format == GridFormat::ptyg ? read_grid_ptyg(path) : read_grid_csv(path);
}

void write_grid(const ComplexGrid& grid, const std::string& path, GridFormat format) {
    if (format == GridFormat::ptyg)
        write_grid_ptyg(grid, path);
    else
        write_grid_csv(grid, path);
}

MeasurementSet read_measurements(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || std::memcmp(magic.data(), "PTYM", 4) != 0)
        throw Error(ErrorKind::io, "bad PTYM magic in " + path);
    const auto version = read_raw<std::uint32_t>(is, "PTYM");
    if (version != 1u) throw Error(ErrorKind::io, "unsupported PTYM version " + std::to_string(version));
    const auto ndims = read_raw<std::uint32_t>(is, "PTYM");
    if (ndims != 1u && ndims != 2u)
        throw Error(ErrorKind::io, "PTYM ndims must be 1 or 2, got " + std::to_string(ndims));

    MeasurementSet ms;
    ms.ndims = static_cast<int>(ndims);
    for (std::uint32_t d = 0; d < ndims; ++d) {
        ShiftSet set;
        set.ambient_n = read_raw<std::uint32_t>(is, "PTYM");
        set.support = read_raw<std::uint32_t>(is, "PTYM");
        ms.max_freq[d] = read_raw<std::uint32_t>(is, "PTYM");
        set.mode = mode_from_code(read_raw<std::uint32_t>(is, "PTYM"));
        set.stride = read_raw<std::uint32_t>(is, "PTYM");
        const auto card = read_raw<std::uint64_t>(is, "PTYM");
        if (card == 0) throw Error(ErrorKind::io, "empty shift set in " + path);
        set.offsets.resize(card);
        std::int64_t prev = -1;
        for (std::uint64_t i = 0; i < card; ++i) {
            const auto off = static_cast<std::int64_t>(read_raw<std::uint64_t>(is, "PTYM"));
            if (off <= prev || off >= set.ambient_n)
                throw Error(ErrorKind::io, "invalid shift offsets in " + path);
            if (set.mode == ShiftMode::interior && off + set.support > set.ambient_n)
                throw Error(ErrorKind::io, "interior shift exceeds the grid in " + path);
            set.offsets[i] = off;
            prev = off;
        }
        if (set.support < 1 || set.support > set.ambient_n || ms.max_freq[d] >= set.ambient_n)
            throw Error(ErrorKind::io, "inconsistent PTYM geometry in " + path);
        ms.shifts[d] = std::move(set);
    }
    const std::int64_t count = ms.expected_size();
    ms.values.resize(count);
    for (std::int64_t i = 0; i < count; ++i) ms.values[i] = read_raw<double>(is, "PTYM");
    char probe = 0;
    if (is.read(&probe, 1))
        throw Error(ErrorKind::io, "trailing bytes after " + std::to_string(count) +
                                       " values in " + path);
    validate_intensities(ms.values);
    return ms;
}

void write_measurements(const MeasurementSet& ms, const std::string& path) {
    if (ms.values.size() != ms.expected_size())
        throw Error(ErrorKind::invalid_argument, "measurement count does not match the geometry");
    std::ofstream os(path, std::ios::binary);
    check_writable(os, path);
    os.write("PTYM", 4);
    write_raw<std::uint32_t>(os, 1u);
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(ms.ndims));
    for (int d = 0; d < ms.ndims; ++d) {
        const ShiftSet& set = ms.shifts[d];
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(set.ambient_n));
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(set.support));
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(ms.max_freq[d]));
        write_raw<std::uint32_t>(os, mode_code(set.mode));
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(set.stride));
        write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(set.offsets.size()));
        for (std::int64_t off : set.offsets)
            write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(off));
    }
    for (Eigen::Index i = 0; i < ms.values.size(); ++i) write_raw<double>(os, ms.values[i]);
    if (!os) throw Error(ErrorKind::io, "failed writing " + path);
}

void export_pgm(const ComplexGrid& grid, PgmChannel channel, const std::string& path) {
    if (grid.ndims != 2)
        throw Error(ErrorKind::invalid_argument, "PGM export needs a 2D grid");
    std::ofstream os(path, std::ios::binary);
    check_writable(os, path);
    const std::int64_t n = grid.extent;
    os << "P5\n" << n << " " << n << "\n65535\n";
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            double t;
            if (channel == PgmChannel::amplitude) {
                t = std::clamp(std::abs(grid.at(i, j)), 0.0, 1.0);
            } else {
                t = (std::arg(grid.at(i, j)) + std::numbers::pi) / (2.0 * std::numbers::pi);
            }
            const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            // PGM samples above 255 are big-endian per the format
            const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                            static_cast<unsigned char>(v & 0xff)};
            os.write(reinterpret_cast<const char*>(bytes), 2);
        }
    if (!os) throw Error(ErrorKind::io, "failed writing " + path);
}

WindowSpec parse_window_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorKind::invalid_argument,
                    "window spec must look like 'ew:s=8,a=4', 'gw:s=8,alpha=0.99' or 'file:path'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);

    WindowSpec ws;
    if (kind == "file") {
        if (rest.empty()) throw Error(ErrorKind::invalid_argument, "window file path missing");
        ws.kind = WindowKind::custom;
        ws.path = rest;
        return ws;
    }
    if (kind == "ew")
        ws.kind = WindowKind::exponential;
    else if (kind == "gw")
        ws.kind = WindowKind::gaussian;
    else
        throw Error(ErrorKind::invalid_argument, "unknown window kind '" + kind + "'");

    std::istringstream fields(rest);
    std::string field;
    bool have_support = false;
    while (std::getline(fields, field, ',')) {
        if (field == "onesided") {
            ws.one_sided = true;
            continue;
        }
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::invalid_argument, "malformed window parameter '" + field + "'");
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        try {
            if (key == "s") {
                ws.support = std::stoll(value);
                have_support = true;
            } else if (key == "a" && ws.kind == WindowKind::exponential) {
                ws.a = std::stod(value);
            } else if (key == "alpha" && ws.kind == WindowKind::gaussian) {
                ws.alpha = std::stod(value);
            } else if (key == "photons" && ws.kind == WindowKind::gaussian) {
                ws.photons = std::stod(value);
            } else {
                throw Error(ErrorKind::invalid_argument,
                            "unknown window parameter '" + key + "' for kind '" + kind + "'");
            }
        } catch (const std::invalid_argument&) {
            throw Error(ErrorKind::invalid_argument, "malformed number in window spec: " + field);
        }
    }
    if (!have_support)
        throw Error(ErrorKind::invalid_argument, "window spec needs the support, e.g. '" + kind +
                                                     ":s=8,...'");
    return ws;
}

} // namespace ptycho
