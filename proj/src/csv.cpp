#include "psurr/csv.hpp"

#include <charconv>
#include <cmath>

namespace psurr {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(std::string_view(n));
  end_row();
}

void CsvWriter::sep() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

void CsvWriter::field(double v) {
  sep();
  out_ << format_double(v);
}

void CsvWriter::field(long long v) {
  sep();
  out_ << v;
}

void CsvWriter::field(std::string_view v) {
  sep();
  out_ << v;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace psurr
