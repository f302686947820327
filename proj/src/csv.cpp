#include "qot/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qot::csv {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Writer::Writer(std::string path) : path_(std::move(path)) {}

Writer::~Writer() {
  if (open_) close();
}

void Writer::header(const std::vector<std::string>& cols) { row(cols); }

void Writer::row(const std::vector<std::string>& cells) {
  for (size_t k = 0; k < cells.size(); ++k) {
    if (k) buf_ += ',';
    buf_ += cells[k];
  }
  buf_ += '\n';
}

void Writer::close() {
  // Write-then-rename so partially written files never appear under the
  // final name.
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << buf_;
  }
  if (std::rename(tmp.c_str(), path_.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " -> " + path_);
  open_ = false;
}

KeyValueWriter::KeyValueWriter(std::string path) : path_(std::move(path)) {}

void KeyValueWriter::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void KeyValueWriter::set(const std::string& key, double value) {
  entries_.emplace_back(key, fmt(value));
}

void KeyValueWriter::set(const std::string& key, long value) {
  entries_.emplace_back(key, std::to_string(value));
}

void KeyValueWriter::write() const {
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path_);
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

}  // namespace qot::csv
