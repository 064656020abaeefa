#include "torspec/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "torspec/error.hpp"

namespace torspec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> splitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, '\t')) out.push_back(trim(cell));
  return out;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::string& DelimitedTable::header(const std::string& key) const {
  const auto it = headers.find(key);
  if (it == headers.end()) fail(ErrorKind::IoError, "missing header '" + key + "'");
  return it->second;
}

double DelimitedTable::headerDouble(const std::string& key) const {
  const std::string& v = header(key);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str()) fail(ErrorKind::IoError, "header '" + key + "' is not numeric: " + v);
  return d;
}

std::size_t DelimitedTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(ErrorKind::IoError, "missing column '" + name + "'");
}

DelimitedTable readDelimited(std::istream& in) {
  DelimitedTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos)
        t.headers[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
      continue;
    }
    const auto cells = splitTabs(line);
    if (t.columns.empty()) {
      t.columns = cells;
      continue;
    }
    if (cells.size() != t.columns.size())
      fail(ErrorKind::IoError, "line " + std::to_string(lineno) + ": expected " +
                                   std::to_string(t.columns.size()) + " fields, found " +
                                   std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double d = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0')
        fail(ErrorKind::IoError, "line " + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(d);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

DelimitedTable loadDelimited(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::MissingInput, "cannot open '" + path + "'");
  return readDelimited(in);
}

void writeHeader(std::ostream& out, const std::string& key, const std::string& value) {
  out << "# " << key << " = " << value << "\n";
}

void writeHeader(std::ostream& out, const std::string& key, double value) {
  writeHeader(out, key, fmt17(value));
}

void writeColumns(std::ostream& out, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "\t" : "") << names[i];
  out << "\n";
}

void writeRow(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "\t" : "") << fmt17(values[i]);
  out << "\n";
}

}  // namespace torspec
