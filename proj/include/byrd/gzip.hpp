#ifndef BYRD_GZIP_HPP
#define BYRD_GZIP_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace byrd {

// Reads a whole file into memory; files starting with the gzip magic are
// inflated transparently (the official MNIST archives ship gzipped).
std::vector<std::uint8_t> read_file_maybe_gzip(const std::string& path);

} // namespace byrd

#endif
