#pragma once

#include <string>
#include <string_view>

namespace gaia {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

std::string read_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file(const std::string& path, std::string_view bytes);

}  // namespace gaia
