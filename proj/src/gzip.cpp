#include "byrd/gzip.hpp"

#include <fstream>
#include <stdexcept>
#include <zlib.h>

namespace byrd {

namespace {

std::vector<std::uint8_t> inflate_gzip(const std::vector<std::uint8_t>& in,
                                       const std::string& path) {
    z_stream zs{};
    // 15 window bits + 16 selects gzip framing.
    if (inflateInit2(&zs, 15 + 16) != Z_OK)
        throw std::runtime_error("zlib init failed for " + path);
    std::vector<std::uint8_t> out;
    out.reserve(in.size() * 4);
    std::uint8_t buf[1 << 16];
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw std::runtime_error("corrupt gzip stream: " + path);
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
}

} // namespace

std::vector<std::uint8_t> read_file_maybe_gzip(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
        return inflate_gzip(bytes, path);
    return bytes;
}

} // namespace byrd
