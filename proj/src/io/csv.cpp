#include "vpb/io/csv.hpp"

#include "vpb/common.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vpb::io {

void TimeSeries::add_row(std::vector<double> row) {
  if (row.size() != labels.size())
    throw PreconditionError("row has " + std::to_string(row.size()) + " values for " +
                            std::to_string(labels.size()) + " columns");
  rows.push_back(std::move(row));
}

void TimeSeries::validate() const {
  if (labels.empty() || labels.front() != "t") throw PreconditionError("first column must be labelled t");
  for (const auto& l : labels)
    if (l.empty() || l.find_first_of(",\n\r\"") != std::string::npos)
      throw PreconditionError("invalid column label '" + l + "'");
  for (const auto& r : rows)
    if (r.size() != labels.size()) throw PreconditionError("ragged time series");
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_timeseries(const TimeSeries& series, const std::string& path) {
  series.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  std::string text;
  for (std::size_t j = 0; j < series.labels.size(); ++j) text += (j ? "," : "") + series.labels[j];
  text += '\n';
  for (const auto& r : series.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) text += (j ? "," : "") + format_double(r[j]);
    text += '\n';
  }
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed: " + std::strerror(errno));
}

TimeSeries read_timeseries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  TimeSeries ts;
  ts.labels.clear();
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) ts.labels.push_back(cell);
  }
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double x;
      auto [q, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number");
      row.push_back(x);
      if (q == end) break;
      if (*q != ',') throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected ','");
      p = q + 1;
    }
    ts.add_row(std::move(row));
  }
  ts.validate();
  return ts;
}

}  // namespace vpb::io
