#include "nsdwav_cli/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nsdwav_cli/key_value.hpp"

namespace nsdwav::cli {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw DataError(context + ": '" + t + "' is not a number");
  }
  return value;
}

XYColumns read_xy_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open input file");
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw DataError(path + ": malformed input, file is empty (expected header 'x,y')");
  }
  if (line.find(',') == std::string::npos) {
    throw DataError(path + ": malformed input, header must have two comma-separated columns");
  }
  XYColumns data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed input, expected 2 columns");
    }
    const std::string where = path + ":" + std::to_string(line_no);
    const double x = parse_double(line.substr(0, comma), where);
    const double y = parse_double(line.substr(comma + 1), where);
    if (!data.x.empty() && !(x > data.x.back())) {
      throw DataError(where + ": malformed input, x must be strictly increasing");
    }
    data.x.push_back(x);
    data.y.push_back(y);
  }
  if (data.x.empty()) throw DataError(path + ": malformed input, no data rows");
  return data;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open output file");
  out << content;
  if (!out) throw DataError(path + ": write failed");
}

void write_xy_csv(const std::string& path, const std::string& value_header,
                  std::span<const double> x, std::span<const double> values) {
  std::string text = "x," + value_header + "\n";
  for (std::size_t m = 0; m < x.size(); ++m) {
    text += format_double(x[m]);
    text += ',';
    text += format_double(values[m]);
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace nsdwav::cli
