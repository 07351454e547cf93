#include "cli/csv.hpp"

#include <charconv>
#include <cmath>

namespace sipdyn::cli {

namespace {

std::string non_finite(double v) {
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return non_finite(v);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, end};
}

std::string format_short(double v) {
  if (!std::isfinite(v)) return non_finite(v);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, end};
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(std::string_view(h));
  end_row();
}

void CsvWriter::sep() {
  if (row_open_) buf_ += ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  buf_ += format_number(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  sep();
  buf_ += s;
  return *this;
}

CsvWriter& CsvWriter::cell(int v) {
  sep();
  buf_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(bool v) {
  sep();
  buf_ += v ? '1' : '0';
  return *this;
}

void CsvWriter::end_row() {
  buf_ += '\n';
  row_open_ = false;
}

}  // namespace sipdyn::cli
