#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kvn/wigner.hpp"

namespace kvn {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

// Binary field container: magic "KVNFLD01", rank, dtype, per-axis
// (name, count, min, max), then row-major little-endian payload.
struct AxisSpec {
    std::string name;
    uint64_t count = 0;
    double min = 0, max = 0;
};

struct FieldData {
    enum class DType : uint32_t { f64 = 0, c128 = 1 };
    DType dtype = DType::f64;
    std::vector<AxisSpec> axes;
    std::vector<double> payload;  // interleaved re,im for c128

    uint64_t points() const {
        uint64_t n = 1;
        for (const auto& a : axes) n *= a.count;
        return n;
    }
    uint64_t doubles_expected() const {
        return points() * (dtype == DType::c128 ? 2 : 1);
    }
};

namespace detail {

inline constexpr char kFieldMagic[8] = {'K', 'V', 'N', 'F', 'L', 'D', '0', '1'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw error(errc::corrupt_header, "truncated field file");
    return v;
}

}  // namespace detail

inline void write_field(const std::filesystem::path& path, const FieldData& f) {
    if (f.payload.size() != f.doubles_expected())
        throw error(errc::io_failure, "payload size does not match axes");
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw error(errc::io_failure, "cannot open " + tmp.string());
        os.write(detail::kFieldMagic, 8);
        detail::put<uint32_t>(os, static_cast<uint32_t>(f.axes.size()));
        detail::put<uint32_t>(os, static_cast<uint32_t>(f.dtype));
        for (const auto& a : f.axes) {
            detail::put<uint32_t>(os, static_cast<uint32_t>(a.name.size()));
            os.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
            detail::put<uint64_t>(os, a.count);
            detail::put<double>(os, a.min);
            detail::put<double>(os, a.max);
        }
        os.write(reinterpret_cast<const char*>(f.payload.data()),
                 static_cast<std::streamsize>(f.payload.size() * sizeof(double)));
        if (!os) throw error(errc::io_failure, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline FieldData read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw error(errc::io_failure, "cannot open " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, detail::kFieldMagic, 8) != 0)
        throw error(errc::corrupt_header, "bad magic in " + path.string());
    FieldData f;
    const uint32_t rank = detail::get<uint32_t>(is);
    if (rank == 0 || rank > 8) throw error(errc::corrupt_header, "implausible rank");
    const uint32_t dt = detail::get<uint32_t>(is);
    if (dt > 1) throw error(errc::corrupt_header, "unknown dtype");
    f.dtype = static_cast<FieldData::DType>(dt);
    for (uint32_t i = 0; i < rank; ++i) {
        AxisSpec a;
        const uint32_t len = detail::get<uint32_t>(is);
        if (len > 256) throw error(errc::corrupt_header, "implausible axis name");
        a.name.resize(len);
        is.read(a.name.data(), len);
        if (!is) throw error(errc::corrupt_header, "truncated axis name");
        a.count = detail::get<uint64_t>(is);
        a.min = detail::get<double>(is);
        a.max = detail::get<double>(is);
        if (a.count == 0 || a.count > (1ull << 32))
            throw error(errc::corrupt_header, "implausible axis count");
        f.axes.push_back(std::move(a));
    }
    f.payload.resize(f.doubles_expected());
    is.read(reinterpret_cast<char*>(f.payload.data()),
            static_cast<std::streamsize>(f.payload.size() * sizeof(double)));
    if (!is) throw error(errc::corrupt_header, "truncated payload");
    return f;
}

// ---- converters -------------------------------------------------------------

inline FieldData to_field_data(const RealField& f) {
    FieldData d;
    d.dtype = FieldData::DType::f64;
    d.axes = {{"q", static_cast<uint64_t>(f.grid.n_q), f.grid.q_min, f.grid.q_max},
              {"p", static_cast<uint64_t>(f.grid.n_p), f.grid.p_min, f.grid.p_max}};
    d.payload = f.v;
    return d;
}

inline FieldData to_field_data(const ComplexField& f) {
    FieldData d;
    d.dtype = FieldData::DType::c128;
    d.axes = {{"q", static_cast<uint64_t>(f.grid.n_q), f.grid.q_min, f.grid.q_max},
              {"p", static_cast<uint64_t>(f.grid.n_p), f.grid.p_min, f.grid.p_max}};
    d.payload.reserve(f.v.size() * 2);
    for (const auto& z : f.v) {
        d.payload.push_back(z.real());
        d.payload.push_back(z.imag());
    }
    return d;
}

inline FieldData to_field_data(const WignerField& w) {
    FieldData d;
    d.dtype = FieldData::DType::f64;
    const auto& g = w.grid;
    d.axes = {{"q", static_cast<uint64_t>(g.n_q), g.q_min, g.q_max},
              {"ptilde", static_cast<uint64_t>(w.nq()), w.ptilde(0), -w.ptilde(0)},
              {"qtilde", static_cast<uint64_t>(w.np()), w.qtilde(0), -w.qtilde(0)},
              {"p", static_cast<uint64_t>(g.n_p), g.p_min, g.p_max}};
    d.payload = w.v;
    return d;
}

inline ComplexField to_complex_field(const FieldData& d, double hbar = 1.0) {
    if (d.dtype != FieldData::DType::c128 || d.axes.size() != 2)
        throw error(errc::corrupt_header, "expected a rank-2 c128 field");
    PhaseGrid g = make_grid(static_cast<int>(d.axes[0].count), static_cast<int>(d.axes[1].count),
                            d.axes[0].min, d.axes[0].max, d.axes[1].min, d.axes[1].max, hbar);
    ComplexField f(g);
    for (size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = cplx(d.payload[2 * i], d.payload[2 * i + 1]);
    return f;
}

inline RealField to_real_field(const FieldData& d, double hbar = 1.0) {
    if (d.dtype != FieldData::DType::f64 || d.axes.size() != 2)
        throw error(errc::corrupt_header, "expected a rank-2 f64 field");
    PhaseGrid g = make_grid(static_cast<int>(d.axes[0].count), static_cast<int>(d.axes[1].count),
                            d.axes[0].min, d.axes[0].max, d.axes[1].min, d.axes[1].max, hbar);
    RealField f(g);
    f.v = d.payload;
    return f;
}

// CSV emitters for human-facing 1D/2D data.
inline void write_csv(const std::filesystem::path& path, const RealField& f,
                      const std::string& value_name = "value") {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw error(errc::io_failure, "cannot open " + tmp.string());
        os << "q,p," << value_name << "\n";
        os.precision(17);
        for (int j = 0; j < f.grid.n_q; ++j)
            for (int k = 0; k < f.grid.n_p; ++k)
                os << f.grid.q(j) << "," << f.grid.p(k) << "," << f(j, k) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

inline void write_csv(const std::filesystem::path& path, const PartialWignerField& w) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw error(errc::io_failure, "cannot open " + tmp.string());
        os << (w.which == 1 ? "q,ptilde,value\n" : "qtilde,p,value\n");
        os.precision(17);
        for (int a = 0; a < (w.which == 1 ? w.n_x : w.n_c); ++a)
            for (int b = 0; b < (w.which == 1 ? w.n_c : w.n_x); ++b) {
                double x, c;
                if (w.which == 1) {
                    x = w.x_lo + a * w.x_d;
                    c = (b - w.n_c / 2) * w.c_d;
                    os << x << "," << c << "," << w.at(a, b) << "\n";
                } else {
                    c = (a - w.n_c / 2) * w.c_d;
                    x = w.x_lo + b * w.x_d;
                    os << c << "," << x << "," << w.at(a, b) << "\n";
                }
            }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace kvn
