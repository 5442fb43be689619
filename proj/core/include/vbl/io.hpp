#ifndef VBL_IO_HPP
#define VBL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace vbl {

/// Writes columns as CSV with 17 significant digits (round-trip exact for
/// doubles). All columns must have equal length.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Reads a CSV written by write_csv (header line + numeric rows).
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// FNV-1a 64-bit content hash (hex), used for manifest reproducibility checks.
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const std::string& path);

}  // namespace vbl

#endif
