#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "bnpspec/types.hpp"

namespace bnpspec {

/// Series CSV: `# key: value` comment lines, a `value` header, one value per line.
struct SeriesFile {
  TimeSeries series;
  std::map<std::string, std::string> meta;
};

void write_series_csv(std::ostream& out, const TimeSeries& x,
                      const std::map<std::string, std::string>& meta = {});
/// Comment lines are collected into `meta`; a non-numeric first row is taken as
/// the header; in multi-column rows the last field is used. Throws InvalidInput
/// naming the offending line.
SeriesFile read_series_csv(std::istream& in);
SeriesFile read_series_csv_file(const std::string& path);

}  // namespace bnpspec
