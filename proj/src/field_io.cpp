#include "sns/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sns {
namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw io_error("snapshot: truncated file");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const SpectralField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("snapshot: cannot open " + path + " for writing");
    os.write("SNS2", 4);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n_modes));
    put<double>(os, f.grid.box_length);
    for (size_t i = 0; i < f.u1.size(); ++i) {
        put<double>(os, f.u1[i].real());
        put<double>(os, f.u1[i].imag());
        put<double>(os, f.u2[i].real());
        put<double>(os, f.u2[i].imag());
    }
    if (!os) throw io_error("snapshot: write failed for " + path);
}

SpectralField read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("snapshot: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SNS2", 4) != 0) throw io_error("snapshot: bad magic in " + path);
    const auto n = get<std::uint32_t>(is);
    const double box = get<double>(is);
    SpectralField f(make_grid(static_cast<int>(n), box));
    for (size_t i = 0; i < f.u1.size(); ++i) {
        const double r1 = get<double>(is), i1 = get<double>(is);
        const double r2 = get<double>(is), i2 = get<double>(is);
        f.u1[i] = {r1, i1};
        f.u2[i] = {r2, i2};
    }
    return f;
}

}  // namespace sns
