#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sipdyn::cli {

// 17 significant digits, shortest general form, "nan"/"inf" for non-finite.
std::string format_number(double v);
// Shortest form that reads back to the same double.
std::string format_short(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::string_view s);
  CsvWriter& cell(const char* s) { return cell(std::string_view(s)); }
  CsvWriter& cell(int v);
  CsvWriter& cell(bool v);
  void end_row();

  const std::string& text() const noexcept { return buf_; }

 private:
  void sep();

  std::string buf_;
  bool row_open_ = false;
};

}  // namespace sipdyn::cli
