#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsdwav::cli {

// Malformed input data (exit status 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct XYColumns {
  std::vector<double> x;
  std::vector<double> y;
};

// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_double(double value);
double parse_double(const std::string& text, const std::string& context);

// Two-column CSV with a header row. Requires at least one record and
// strictly increasing x. The header names are not checked beyond having two
// columns.
XYColumns read_xy_csv(const std::string& path);
void write_xy_csv(const std::string& path, const std::string& value_header,
                  std::span<const double> x, std::span<const double> values);
// Writes `content` verbatim ('\n' line endings, binary mode).
void write_text_file(const std::string& path, const std::string& content);

}  // namespace nsdwav::cli
