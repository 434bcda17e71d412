#include "nhspec/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace nhspec {

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one point");
  if (!(lo <= hi)) throw std::invalid_argument("grid needs lo <= hi");
  std::vector<double> grid(steps);
  if (steps == 1) {
    grid[0] = lo;
    return grid;
  }
  const double span = (hi - lo) / (steps - 1);
  for (int i = 0; i < steps; ++i) grid[i] = lo + span * i;
  grid.back() = hi;
  return grid;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw std::invalid_argument("grid must have the form lo:hi:steps, got '" +
                                text + "'");
  }
  const auto parse_number = [&text](const std::string& token) {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) {
      throw std::invalid_argument("bad number '" + token + "' in grid '" +
                                  text + "'");
    }
    return value;
  };
  try {
    const double lo = parse_number(text.substr(0, first));
    const double hi = parse_number(text.substr(first + 1, second - first - 1));
    const std::string steps_token = text.substr(second + 1);
    std::size_t used = 0;
    const int steps = std::stoi(steps_token, &used);
    if (used != steps_token.size()) {
      throw std::invalid_argument("bad step count '" + steps_token +
                                  "' in grid '" + text + "'");
    }
    return linspace(lo, hi, steps);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("could not parse grid '" + text + "'");
  }
}

std::vector<int> parse_size_list(const std::string& text) {
  std::vector<int> sizes;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (token.empty()) {
      throw std::invalid_argument("empty entry in size list '" + text + "'");
    }
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad size '" + token + "' in list");
    }
    if (value < 2) {
      throw std::invalid_argument("sizes must be at least 2, got " + token);
    }
    sizes.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (sizes.empty()) throw std::invalid_argument("size list is empty");
  return sizes;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void CsvWriter::header(const std::vector<std::string_view>& names) {
  bool first = true;
  for (const std::string_view name : names) {
    if (!first) out_ << ',';
    out_ << name;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::separator() {
  if (row_open_) out_ << ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::field(int value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(bool value) {
  separator();
  out_ << (value ? 1 : 0);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_open_ = false;
}

}  // namespace nhspec
