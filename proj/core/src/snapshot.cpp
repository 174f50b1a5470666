#include "ksfluid/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts unsupported");

namespace ksfluid {

namespace {
constexpr char kMagic[4] = {'K', 'S', 'F', '1'};
constexpr std::size_t kHeaderSize = 32;
}  // namespace

void write_snapshot(const std::string& path, const ScalarField& f, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);

    unsigned char header[kHeaderSize] = {0};
    std::memcpy(header, kMagic, 4);
    std::uint32_t n = static_cast<std::uint32_t>(f.grid.n);
    std::memcpy(header + 4, &n, 4);
    std::memcpy(header + 8, &f.grid.half_width, 8);
    std::memcpy(header + 16, &time, 8);
    out.write(reinterpret_cast<const char*>(header), kHeaderSize);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);

    unsigned char header[kHeaderSize];
    in.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (in.gcount() != kHeaderSize)
        throw std::runtime_error("read_snapshot: truncated header in " + path);
    if (std::memcmp(header, kMagic, 4) != 0)
        throw std::runtime_error("read_snapshot: bad magic in " + path);

    std::uint32_t n = 0;
    double half_width = 0.0, time = 0.0;
    std::memcpy(&n, header + 4, 4);
    std::memcpy(&half_width, header + 8, 8);
    std::memcpy(&time, header + 16, 8);

    Snapshot snap;
    snap.time = time;
    snap.field = ScalarField(make_grid(half_width, static_cast<int>(n)));
    in.read(reinterpret_cast<char*>(snap.field.values.data()),
            static_cast<std::streamsize>(snap.field.values.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != snap.field.values.size() * sizeof(double))
        throw std::runtime_error("read_snapshot: truncated payload in " + path);
    return snap;
}

}  // namespace ksfluid
