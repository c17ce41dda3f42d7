#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbmhedge {

// %.17g round-trips doubles exactly and is byte-stable for bitwise-equal
// inputs, which is what the reproducibility guarantee rides on.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) {
    append_strings(header);
  }

  template <class... Cells>
  void add_row(const Cells&... cells) {
    std::vector<std::string> formatted;
    formatted.reserve(sizeof...(cells));
    (formatted.push_back(format_cell(cells)), ...);
    append_strings(formatted);
  }

  const std::string& str() const { return text_; }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot open output file: " + path);
    out << text_;
    if (!out)
      throw std::runtime_error("failed writing output file: " + path);
  }

 private:
  static std::string format_cell(double v) { return format_double(v); }
  static std::string format_cell(int v) { return std::to_string(v); }
  static std::string format_cell(long v) { return std::to_string(v); }
  static std::string format_cell(unsigned v) { return std::to_string(v); }
  static std::string format_cell(unsigned long v) { return std::to_string(v); }
  static std::string format_cell(unsigned long long v) { return std::to_string(v); }
  static std::string format_cell(const std::string& v) { return v; }
  static std::string format_cell(const char* v) { return v; }

  void append_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::string text_;
};

}  // namespace fbmhedge
