#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace cgpt {

/// Comma-separated artifact writer: header row first, LF line endings,
/// reals in scientific notation with 17 significant digits, and a final
/// comment line carrying the resolved config hash and seed.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(const std::vector<std::string>& cells);
  void finish(std::uint64_t config_hash, std::uint64_t seed);

  static std::string num(double v);
  static std::string num(long long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }
  static std::string num(std::uint64_t v) { return std::to_string(v); }

 private:
  std::ofstream out_;
  std::string path_;
  bool finished_ = false;
};

/// FNV-1a 64-bit hash of a string (used for config fingerprints).
std::uint64_t fnv1a64(const std::string& text);

}  // namespace cgpt
