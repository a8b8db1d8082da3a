#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

namespace covert {

// RFC-4180 quoting; numbers render with %.12g so identical doubles always
// produce identical bytes.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_num(uint64_t v) { return std::to_string(v); }

class CsvRow {
 public:
  explicit CsvRow(std::ostream& os) : os_(os) {}
  CsvRow& field(const std::string& s) {
    if (!first_) os_ << ',';
    first_ = false;
    os_ << csv_escape(s);
    return *this;
  }
  CsvRow& field(double v) { return field(csv_num(v)); }
  CsvRow& field(uint64_t v) { return field(csv_num(v)); }
  ~CsvRow() { os_ << '\n'; }

 private:
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace covert
