#include "bnpspec/series_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "bnpspec/errors.hpp"

namespace bnpspec {

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}
}  // namespace

void write_series_csv(std::ostream& out, const TimeSeries& x,
                      const std::map<std::string, std::string>& meta) {
  out << "# generator: " << x.generator() << '\n';
  out << "# seed: " << x.seed() << '\n';
  out << "# n: " << x.size() << '\n';
  out << "# mean_centered: " << (x.mean_centered() ? "true" : "false") << '\n';
  for (const auto& [k, v] : meta) {
    if (k == "generator" || k == "seed" || k == "n" || k == "mean_centered") continue;
    out << "# " << k << ": " << v << '\n';
  }
  out << "value\n";
  const auto old = out.precision(17);
  for (double v : x.values()) out << v << '\n';
  out.precision(old);
}

SeriesFile read_series_csv(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto body = trim(t.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) meta[trim(body.substr(0, colon))] = trim(body.substr(colon + 1));
      continue;
    }
    const auto comma = t.rfind(',');
    const auto field = trim(comma == std::string::npos ? t : t.substr(comma + 1));
    double v = 0.0;
    if (!parse_double(field, v)) {
      if (!header_seen && values.empty()) {
        header_seen = true;
        continue;
      }
      throw InvalidInput("series CSV line " + std::to_string(lineno) + ": '" + field +
                         "' is not a number");
    }
    values.push_back(v);
  }
  std::uint64_t seed = 0;
  if (auto it = meta.find("seed"); it != meta.end()) {
    try {
      seed = std::stoull(it->second);
    } catch (...) {
      seed = 0;
    }
  }
  const bool centered = meta.count("mean_centered") && meta["mean_centered"] == "true";
  const std::string gen = meta.count("generator") ? meta["generator"] : "external";
  return {TimeSeries(std::move(values), centered, seed, gen), std::move(meta)};
}

SeriesFile read_series_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open series file '" + path + "'");
  return read_series_csv(f);
}

}  // namespace bnpspec
