#include "absim/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace absim {

namespace {

static_assert(std::endian::native == std::endian::little,
              "ABSF writes little-endian words directly");

constexpr char kMagic[4] = {'A', 'B', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

struct Reader {
    std::ifstream is;
    std::size_t offset = 0;
    explicit Reader(const std::string& path) : is(path, std::ios::binary) {
        if (!is) throw FormatError("cannot open file", 0);
    }
    void read(void* dst, std::size_t n, const char* what) {
        is.read(reinterpret_cast<char*>(dst), std::streamsize(n));
        if (std::size_t(is.gcount()) != n)
            throw FormatError(std::string("truncated while reading ") + what, offset);
        offset += n;
    }
    std::uint32_t u32(const char* what) {
        std::uint32_t v;
        read(&v, 4, what);
        return v;
    }
    double f64(const char* what) {
        double v;
        read(&v, 8, what);
        return v;
    }
};

}  // namespace

void write_field(const std::string& path, const WaveField& field) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open file for writing", 0);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    const GridSpec& g = field.grid();
    for (int k = 0; k < 3; ++k) put_u32(os, g.n[k]);
    for (int k = 0; k < 3; ++k) put_f64(os, g.extents[k]);
    for (int k = 0; k < 3; ++k) put_f64(os, g.origin[k]);
    os.write(reinterpret_cast<const char*>(field.data().data()),
             std::streamsize(field.size() * sizeof(cplx)));
    if (!os) throw FormatError("write failure", 0);
}

WaveField read_field(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic bytes", 0);
    std::uint32_t version = r.u32("version");
    if (version != kVersion) throw FormatError("unsupported version", 4);
    GridSpec g;
    for (int k = 0; k < 3; ++k) g.n[k] = r.u32("dims");
    for (int k = 0; k < 3; ++k) g.extents[k] = r.f64("extents");
    for (int k = 0; k < 3; ++k) g.origin[k] = r.f64("origin");
    if (g.size() == 0 || g.size() > (std::size_t(1) << 33))
        throw FormatError("implausible dimensions", 8);
    WaveField f(g);
    r.read(f.data().data(), f.size() * sizeof(cplx), "samples");
    // trailing bytes would make the dump ambiguous
    char extra;
    r.is.read(&extra, 1);
    if (r.is.gcount() != 0) throw FormatError("trailing bytes after samples", r.offset);
    return f;
}

std::string format_full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot open file for writing", 0);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_full_precision(row[i]);
        os << "\n";
    }
    if (!os) throw FormatError("write failure", 0);
}

}  // namespace absim
