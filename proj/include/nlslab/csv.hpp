#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace nlslab {

/// Fixed-column CSV writer. Floats use %.17g so values round-trip exactly
/// and identical runs give identical bytes.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::string& path, std::vector<std::string> columns);
  void row(const std::vector<Cell>& cells);
  /// Free-form line starting with '#', for fit summaries after the table.
  void comment(const std::string& text);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t width_;
};

std::string format_double(double v);

}  // namespace nlslab
