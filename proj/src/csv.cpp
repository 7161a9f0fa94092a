#include "cgpt/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace cgpt {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw std::runtime_error("cannot open artifact for writing: " + path);
  write_row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (finished_) throw std::logic_error("CsvWriter: row after footer");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::finish(std::uint64_t config_hash, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
  out_ << "# config_hash=" << buf << " seed=" << seed << '\n';
  finished_ = true;
  out_.close();
  if (!out_) throw std::runtime_error("failed to write artifact: " + path_);
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cgpt
