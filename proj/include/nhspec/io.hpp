#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nhspec {

/// Evenly spaced grid with `steps` points including both ends; steps = 1
/// degenerates to {lo}.
std::vector<double> linspace(double lo, double hi, int steps);

/// Parses "lo:hi:steps" into a grid; requires lo <= hi and steps >= 1.
std::vector<double> parse_grid(const std::string& text);

/// Parses a comma-separated list of positive integers, e.g. "8,16,32".
std::vector<int> parse_size_list(const std::string& text);

/// 17 significant digits: doubles survive a text round trip losslessly.
std::string format_double(double value);

/// Minimal CSV emitter: mandatory header, one record per line, '.' decimal
/// separator, no quoting (fields never contain commas here).
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string_view>& names);

  CsvWriter& field(double value);
  CsvWriter& field(int value);
  CsvWriter& field(bool value);
  CsvWriter& field(std::string_view value);
  void end_row();

  template <typename... Fields>
  void row(Fields&&... fields) {
    (field(std::forward<Fields>(fields)), ...);
    end_row();
  }

 private:
  void separator();
  std::ostream& out_;
  bool row_open_ = false;
};

}  // namespace nhspec
