#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace psurr {

/// Shortest round-trip decimal form of a double ("nan"/"inf" for specials).
std::string format_double(double v);

/// Minimal CSV emitter: ',' separator, '.' decimal point, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  void field(double v);
  void field(long long v);
  void field(std::string_view v);
  void end_row();

 private:
  void sep();

  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace psurr
