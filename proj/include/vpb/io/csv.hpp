#pragma once

#include <string>
#include <vector>

namespace vpb::io {

// Column-labelled table; the first label is always "t".
struct TimeSeries {
  std::vector<std::string> labels{"t"};
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void validate() const;
};

// Shortest round-trip decimal ('.' separator regardless of locale).
std::string format_double(double x);

// Throws std::runtime_error carrying the OS message on I/O failure.
void write_timeseries(const TimeSeries& series, const std::string& path);
TimeSeries read_timeseries(const std::string& path);

}  // namespace vpb::io
