#include "hccepose/cmap_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "hccepose/errors.hpp"

namespace hcce {

namespace {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

constexpr std::uint32_t kCmapVersion = 1;
constexpr std::uint32_t kCsetVersion = 1;

template <typename T>
void write_raw(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const char* section) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(std::string("truncated file while reading ") + section);
    return value;
}

void read_bytes(std::istream& in, char* dst, std::streamsize n, const char* section) {
    in.read(dst, n);
    if (!in) throw IoError(std::string("truncated file while reading ") + section);
}

void check_magic(std::istream& in, const char* magic, const char* kind) {
    char buf[4];
    read_bytes(in, buf, 4, "magic");
    if (std::memcmp(buf, magic, 4) != 0) {
        throw IoError(std::string("bad magic, not a ") + kind + " file");
    }
}

void check_version(std::uint32_t version, std::uint32_t expected, const char* kind) {
    if (version != expected) {
        throw IoError(std::string(kind) + " version " + std::to_string(version) +
                      " unsupported (expected " + std::to_string(expected) + ")");
    }
}

void write_coords_f32(std::ostream& out, const std::vector<Eigen::Vector3d>& coords,
                      const std::vector<std::uint8_t>& mask) {
    // Canonical quiet NaN for unmasked pixels, independent of stored values.
    const float nan = std::numeric_limits<float>::quiet_NaN();
    for (std::size_t i = 0; i < coords.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const float v = mask[i] ? static_cast<float>(coords[i][c]) : nan;
            write_raw(out, v);
        }
    }
}

void read_coords_f32(std::istream& in, std::vector<Eigen::Vector3d>& coords, std::size_t n,
                     const char* section) {
    coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            coords[i][c] = static_cast<double>(read_raw<float>(in, section));
        }
    }
}

}  // namespace

void save_coordinate_map(const CoordinateMap& map, std::ostream& out) {
    map.validate();
    out.write("CMAP", 4);
    write_raw(out, kCmapVersion);
    write_raw(out, static_cast<std::uint32_t>(map.width));
    write_raw(out, static_cast<std::uint32_t>(map.height));
    out.write(reinterpret_cast<const char*>(map.mask.data()),
              static_cast<std::streamsize>(map.mask.size()));
    write_coords_f32(out, map.front, map.mask);
    write_coords_f32(out, map.back, map.mask);
    if (!out) throw IoError("write failure while saving coordinate map");
}

void save_coordinate_map(const CoordinateMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    save_coordinate_map(map, out);
}

CoordinateMap load_coordinate_map(std::istream& in) {
    check_magic(in, "CMAP", "CMAP");
    check_version(read_raw<std::uint32_t>(in, "version"), kCmapVersion, "CMAP");
    const auto width = read_raw<std::uint32_t>(in, "width");
    const auto height = read_raw<std::uint32_t>(in, "height");
    if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20)) {
        throw IoError("CMAP dimensions out of range: " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
    CoordinateMap map;
    map.width = static_cast<int>(width);
    map.height = static_cast<int>(height);
    const std::size_t n = static_cast<std::size_t>(width) * height;
    map.mask.resize(n);
    read_bytes(in, reinterpret_cast<char*>(map.mask.data()),
               static_cast<std::streamsize>(n), "mask");
    read_coords_f32(in, map.front, n, "front coordinates");
    read_coords_f32(in, map.back, n, "back coordinates");
    map.validate();
    return map;
}

CoordinateMap load_coordinate_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return load_coordinate_map(in);
}

void save_correspondence_set(const CorrespondenceSet& set, std::ostream& out) {
    out.write("CSET", 4);
    write_raw(out, kCsetVersion);
    write_raw(out, static_cast<std::uint64_t>(set.records.size()));
    write_raw(out, set.d_bar);
    for (const auto& rec : set.records) {
        write_raw(out, static_cast<std::uint32_t>(rec.group));
        write_raw(out, static_cast<std::uint8_t>(rec.source));
        write_raw(out, rec.pixel.x());
        write_raw(out, rec.pixel.y());
        write_raw(out, rec.point.x());
        write_raw(out, rec.point.y());
        write_raw(out, rec.point.z());
    }
    if (!out) throw IoError("write failure while saving correspondence set");
}

void save_correspondence_set(const CorrespondenceSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    save_correspondence_set(set, out);
}

CorrespondenceSet load_correspondence_set(std::istream& in) {
    check_magic(in, "CSET", "CSET");
    check_version(read_raw<std::uint32_t>(in, "version"), kCsetVersion, "CSET");
    const auto count = read_raw<std::uint64_t>(in, "record count");
    CorrespondenceSet set;
    set.d_bar = read_raw<double>(in, "d_bar");
    set.records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        CorrespondenceRecord rec;
        rec.group = static_cast<std::int32_t>(read_raw<std::uint32_t>(in, "records"));
        const auto source = read_raw<std::uint8_t>(in, "records");
        if (source > 2) throw IoError("CSET record has invalid source tag");
        rec.source = static_cast<SurfaceSource>(source);
        rec.pixel.x() = read_raw<double>(in, "records");
        rec.pixel.y() = read_raw<double>(in, "records");
        rec.point.x() = read_raw<double>(in, "records");
        rec.point.y() = read_raw<double>(in, "records");
        rec.point.z() = read_raw<double>(in, "records");
        set.records.push_back(rec);
    }
    return set;
}

CorrespondenceSet load_correspondence_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return load_correspondence_set(in);
}

}  // namespace hcce
