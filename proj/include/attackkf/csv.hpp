#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "attackkf/errors.hpp"

namespace attackkf {

/// Shortest-exact decimal would vary in width across values; golden-file
/// stability wants one rule. 17 significant digits round-trips any double,
/// locale independent, '.' decimal point.
inline std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& cell, long line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw DataFormatError("cell '" + cell + "' is not a number", line);
  }
  return v;
}

inline long parse_long(const std::string& cell, long line) {
  long v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw DataFormatError("cell '" + cell + "' is not an integer", line);
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

/// Line-oriented CSV writer with LF endings regardless of platform.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw DataFormatError("cannot open '" + path + "' for writing");
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw DataFormatError("write to '" + path_ + "' failed");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

/// Measurement file: a header row, then rows (step, y_1..y_nz) with step
/// indices running 1, 2, ... contiguously.
struct MeasurementFile {
  std::vector<std::string> column_names;
  std::vector<Eigen::VectorXd> measurements;  // one per step, in step order
};

inline MeasurementFile read_measurement_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open '" + path + "'");

  MeasurementFile file;
  std::string line;
  long line_no = 0;
  long expected_step = 1;
  Eigen::Index width = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      file.column_names = split_csv_line(line);
      if (file.column_names.size() < 2) {
        throw DataFormatError("header must name a step column and at least one "
                              "measurement column", line_no);
      }
      width = static_cast<Eigen::Index>(file.column_names.size()) - 1;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != width + 1) {
      throw DataFormatError("expected " + std::to_string(width + 1) +
                                " cells, found " + std::to_string(cells.size()),
                            line_no);
    }
    const long step = parse_long(cells[0], line_no);
    if (step != expected_step) {
      throw DataFormatError("step index " + std::to_string(step) +
                                ", expected " + std::to_string(expected_step),
                            line_no);
    }
    ++expected_step;
    Eigen::VectorXd y(width);
    for (Eigen::Index j = 0; j < width; ++j) {
      y[j] = parse_double(cells[static_cast<std::size_t>(j) + 1], line_no);
    }
    file.measurements.push_back(std::move(y));
  }
  if (file.measurements.empty()) {
    throw DataFormatError("no data rows in '" + path + "'");
  }
  return file;
}

}  // namespace attackkf
