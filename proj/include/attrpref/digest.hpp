#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace attrpref {

// Hex-encoded SHA-256. Used for manifest digests and data-file provenance.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);

std::vector<std::byte> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const void* data, std::size_t len);

std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

}  // namespace attrpref
