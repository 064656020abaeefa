#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace torspec {

/// 17 significant digits ("%.17g"), which round-trips a double.
std::string fmt17(double v);

/// Plain delimited text: '# key = value' header lines, one tab-separated
/// line of column names, then numeric rows.
struct DelimitedTable {
  std::map<std::string, std::string> headers;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool hasHeader(const std::string& key) const { return headers.count(key) != 0; }
  /// Throws IoError when the key is absent.
  const std::string& header(const std::string& key) const;
  double headerDouble(const std::string& key) const;
  /// Index of a named column; throws IoError when absent.
  std::size_t column(const std::string& name) const;
};

DelimitedTable readDelimited(std::istream& in);
DelimitedTable loadDelimited(const std::string& path);

void writeHeader(std::ostream& out, const std::string& key, const std::string& value);
void writeHeader(std::ostream& out, const std::string& key, double value);
void writeColumns(std::ostream& out, const std::vector<std::string>& names);
void writeRow(std::ostream& out, const std::vector<double>& values);

}  // namespace torspec
