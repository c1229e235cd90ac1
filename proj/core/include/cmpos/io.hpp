#ifndef CMPOS_IO_HPP
#define CMPOS_IO_HPP

#include <string>

namespace cmpos {

/// Reads a whole file as bytes. Throws std::runtime_error on I/O failure.
std::string read_file(const std::string& path);

/// Writes `content` to `path`, replacing any existing file.
void write_file(const std::string& path, const std::string& content);

}  // namespace cmpos

#endif  // CMPOS_IO_HPP
