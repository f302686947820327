#pragma once

#include <string>
#include <vector>

namespace qot::csv {

// Round-trip-safe, locale-independent double formatting. All CSV and
// key-value emitters go through this so identical runs produce identical
// bytes.
std::string fmt(double x);

class Writer {
public:
  explicit Writer(std::string path);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  void close();

private:
  std::string path_;
  std::string buf_;
  bool open_ = true;
};

// Flat `key = value` file, one entry per line, written in insertion order.
class KeyValueWriter {
public:
  explicit KeyValueWriter(std::string path);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  void write() const;

private:
  std::string path_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace qot::csv
