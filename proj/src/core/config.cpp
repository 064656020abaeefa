#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "torspec/pipeline.hpp"

namespace torspec {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void configFail(const std::string& source, int line, const std::string& what) {
  fail(ErrorKind::ConfigError, source + ":" + std::to_string(line) + ": " + what);
}

bool parsePlain(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parseNumber(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parsePlain(s, out);
  double num = 0.0, den = 0.0;
  if (!parsePlain(trim(s.substr(0, slash)), num) || !parsePlain(trim(s.substr(slash + 1)), den) ||
      den == 0.0)
    return false;
  out = num / den;
  return true;
}

bool parseScaled(const std::string& raw, ScaledValue& out) {
  std::string s = trim(raw);
  const auto pos = s.find('h');
  if (pos == std::string::npos) {
    out.relative_to_h = false;
    return parseNumber(s, out.coefficient);
  }
  out.relative_to_h = true;
  std::string before = trim(s.substr(0, pos));
  std::string after = trim(s.substr(pos + 1));
  if (!before.empty() && before.back() == '*') before = trim(before.substr(0, before.size() - 1));
  double factor = 1.0;
  if (!before.empty() && !parseNumber(before, factor)) return false;
  if (!after.empty()) {
    if (after[0] != '/') return false;
    double den = 0.0;
    if (!parsePlain(trim(after.substr(1)), den) || den == 0.0) return false;
    factor /= den;
  }
  out.coefficient = factor;
  return true;
}

class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  void allowSection(const std::string& section, std::set<std::string> keys) {
    allowed_[section] = std::move(keys);
  }

  void checkKeys() const {
    for (const auto& [section, keys] : doc_.sections) {
      const auto it = allowed_.find(section);
      if (it == allowed_.end())
        configFail(doc_.source, doc_.section_lines.at(section), "unknown section [" + section + "]");
      for (const auto& [key, entries] : keys) {
        if (!it->second.count(key))
          configFail(doc_.source, entries.front().line,
                     "unknown key '" + key + "' in section [" + section + "]");
        if (entries.size() > 1 && key != "coeff")
          configFail(doc_.source, entries[1].line,
                     "duplicate key '" + key + "' (first set on line " +
                         std::to_string(entries.front().line) + ")");
      }
    }
  }

  const ConfigEntry* find(const std::string& section, const std::string& key) const {
    const auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second.front();
  }

  std::vector<ConfigEntry> all(const std::string& section, const std::string& key) const {
    const auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return {};
    const auto k = s->second.find(key);
    return k == s->second.end() ? std::vector<ConfigEntry>{} : k->second;
  }

  void number(const std::string& section, const std::string& key, double& out) const {
    if (const ConfigEntry* e = find(section, key))
      if (!parseNumber(e->value, out))
        configFail(doc_.source, e->line, "'" + key + "' expects a number, got '" + e->value + "'");
  }

  void positive(const std::string& section, const std::string& key, double& out) const {
    number(section, key, out);
    if (const ConfigEntry* e = find(section, key); e && !(out > 0.0))
      configFail(doc_.source, e->line, "'" + key + "' must be positive");
  }

  void integer(const std::string& section, const std::string& key, int& out, int lo) const {
    const ConfigEntry* e = find(section, key);
    if (!e) return;
    double v = 0.0;
    if (!parseNumber(e->value, v) || v != std::floor(v) || v < lo || v > 1e9)
      configFail(doc_.source, e->line,
                 "'" + key + "' expects an integer >= " + std::to_string(lo) + ", got '" + e->value + "'");
    out = static_cast<int>(v);
  }

  std::vector<double> numberList(const ConfigEntry& e, const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(e.value, ',')) {
      double v = 0.0;
      if (!parseNumber(item, v))
        configFail(doc_.source, e.line, "'" + key + "' expects numbers, got '" + item + "'");
      out.push_back(v);
    }
    if (out.empty()) configFail(doc_.source, e.line, "'" + key + "' must not be empty");
    return out;
  }

  std::vector<ScaledValue> scaledList(const ConfigEntry& e, const std::string& key) const {
    std::vector<ScaledValue> out;
    for (const std::string& item : split(e.value, ',')) {
      ScaledValue v;
      if (!parseScaled(item, v))
        configFail(doc_.source, e.line,
                   "'" + key + "' expects numbers or multiples of h, got '" + item + "'");
      if (!(v.coefficient >= 0.0))
        configFail(doc_.source, e.line, "'" + key + "' values must be nonnegative");
      out.push_back(v);
    }
    if (out.empty()) configFail(doc_.source, e.line, "'" + key + "' must not be empty");
    return out;
  }

  const std::string& source() const { return doc_.source; }

 private:
  const ConfigDocument& doc_;
  std::map<std::string, std::set<std::string>> allowed_;
};

}  // namespace

ConfigDocument parseConfigDocument(std::istream& in, const std::string& source) {
  ConfigDocument doc;
  doc.source = source;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) configFail(source, line, "malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      doc.sections[section];
      doc.section_lines.emplace(section, line);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) configFail(source, line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) configFail(source, line, "missing key before '='");
    if (value.empty()) configFail(source, line, "missing value for '" + key + "'");
    if (section.empty()) configFail(source, line, "'" + key + "' appears before any [section]");
    doc.sections[section][key].push_back({value, line});
  }
  return doc;
}

std::vector<double> ExperimentConfig::epsilonsFor(double h) const {
  std::vector<double> out;
  for (const ScaledValue& v : epsilon) out.push_back(v.resolve(h));
  return out;
}

ExperimentConfig buildConfig(const ConfigDocument& doc) {
  Reader r(doc);
  r.allowSection("experiment", {"h", "epsilon", "E1", "E2", "output", "dimension_cap", "backend"});
  r.allowSection("symbol", {"source", "F", "kappa", "seed", "file", "coeff"});
  r.allowSection("classical", {"energy", "samples", "curve_grid"});
  r.allowSection("predict", {"directions", "k_max", "j_range", "energy"});
  r.allowSection("compare", {"c0"});
  r.allowSection("model1d", {"h", "epsilon", "amplitude", "theta", "count"});
  r.allowSection("rescheck", {"h", "epsilon", "amplitude", "re_min_over_h_tilde", "re_max", "n_re",
                              "im_over_h_tilde", "c_cutoff", "c_im", "smallness"});
  r.checkKeys();

  ExperimentConfig c;
  c.source = doc.source;

  if (const ConfigEntry* e = r.find("experiment", "h")) {
    c.h_values = r.numberList(*e, "h");
    for (double h : c.h_values)
      if (!(h > 0.0)) configFail(doc.source, e->line, "'h' values must be positive");
  }
  if (const ConfigEntry* e = r.find("experiment", "epsilon")) c.epsilon = r.scaledList(*e, "epsilon");
  r.positive("experiment", "E1", c.e1);
  r.positive("experiment", "E2", c.e2);
  if (!(c.e1 < c.e2)) {
    const ConfigEntry* e = r.find("experiment", "E2");
    if (!e) e = r.find("experiment", "E1");
    configFail(doc.source, e ? e->line : 0, "E1 must be smaller than E2");
  }
  if (const ConfigEntry* e = r.find("experiment", "output")) c.output_dir = e->value;
  int cap = static_cast<int>(c.dimension_cap);
  r.integer("experiment", "dimension_cap", cap, 1);
  c.dimension_cap = static_cast<std::size_t>(cap);
  if (const ConfigEntry* e = r.find("experiment", "backend")) {
    if (e->value == "auto") c.backend = EigBackend::Auto;
    else if (e->value == "inhouse") c.backend = EigBackend::InHouse;
    else if (e->value == "lapack") c.backend = EigBackend::Lapack;
    else configFail(doc.source, e->line, "backend must be auto, inhouse or lapack");
  }

  if (const ConfigEntry* e = r.find("symbol", "source")) {
    if (e->value == "generate") c.symbol_source = SymbolSource::Generate;
    else if (e->value == "file") c.symbol_source = SymbolSource::File;
    else if (e->value == "inline") c.symbol_source = SymbolSource::Inline;
    else configFail(doc.source, e->line, "source must be generate, file or inline");
  }
  r.integer("symbol", "F", c.degree, 0);
  if (c.degree > kMaxSymbolDegree)
    configFail(doc.source, r.find("symbol", "F")->line,
               "F must not exceed " + std::to_string(kMaxSymbolDegree));
  r.positive("symbol", "kappa", c.kappa);
  if (const ConfigEntry* e = r.find("symbol", "seed")) {
    if (e->value == "none") {
      c.seed.reset();
    } else {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
      if (e->value.empty() || end != e->value.c_str() + e->value.size() || e->value[0] == '-')
        configFail(doc.source, e->line, "seed must be a nonnegative integer or 'none'");
      c.seed = v;
    }
  }
  if (c.symbol_source == SymbolSource::Generate && !c.seed) {
    const ConfigEntry* e = r.find("symbol", "seed");
    configFail(doc.source, e ? e->line : 0, "generated symbols need a seed");
  }
  if (const ConfigEntry* e = r.find("symbol", "file")) c.symbol_file = e->value;
  if (c.symbol_source == SymbolSource::File && c.symbol_file.empty()) {
    const ConfigEntry* e = r.find("symbol", "source");
    configFail(doc.source, e ? e->line : 0, "source = file needs a 'file' key");
  }
  for (const ConfigEntry& e : r.all("symbol", "coeff")) {
    std::istringstream in(e.value);
    InlineCoefficient ic;
    double re = 0.0, im = 0.0;
    std::string extra;
    if (!(in >> ic.ell >> ic.j >> ic.k >> re >> im) || (in >> extra))
      configFail(doc.source, e.line, "coeff expects 'ell j k re im'");
    if (ic.ell < 0 || ic.ell > 2 || std::abs(ic.j) > c.degree || std::abs(ic.k) > c.degree)
      configFail(doc.source, e.line, "coeff index outside ell in 0..2, |j|, |k| <= F");
    if (ic.j == 0 && ic.k == 0 && im != 0.0)
      configFail(doc.source, e.line, "the (0, 0) coefficient must be real");
    ic.value = {re, im};
    c.inline_coefficients.push_back(ic);
  }
  if (c.symbol_source != SymbolSource::Inline && !c.inline_coefficients.empty())
    configFail(doc.source, r.all("symbol", "coeff").front().line, "coeff lines need source = inline");

  r.positive("classical", "energy", c.classical_energy);
  r.integer("classical", "samples", c.classical_samples, 64);
  r.integer("classical", "curve_grid", c.curve_grid, 8);

  if (const ConfigEntry* e = r.find("predict", "directions")) {
    if (e->value != "all") {
      for (const std::string& item : split(e->value, ';')) {
        std::istringstream in(item);
        int m = 0, n = 0;
        std::string extra;
        if (!(in >> m >> n) || (in >> extra))
          configFail(doc.source, e->line, "directions expects 'all' or 'm n; m n; ...'");
        try {
          c.directions.push_back(RationalDirection::make(m, n));
        } catch (const Error& err) {
          configFail(doc.source, e->line, err.what());
        }
      }
    }
  }
  r.integer("predict", "k_max", c.k_max, 0);
  r.integer("predict", "j_range", c.j_range, 0);
  if (r.find("predict", "energy")) {
    double v = 0.0;
    r.positive("predict", "energy", v);
    c.predict_energy = v;
  }
  r.positive("compare", "c0", c.c0);

  r.positive("model1d", "h", c.model1d.h);
  r.positive("model1d", "epsilon", c.model1d.epsilon);
  r.positive("model1d", "amplitude", c.model1d.amplitude);
  r.number("model1d", "theta", c.model1d.theta);
  if (!(c.model1d.theta >= 0.0 && c.model1d.theta < 1.0))
    configFail(doc.source, r.find("model1d", "theta")->line, "theta must lie in [0, 1)");
  r.integer("model1d", "count", c.model1d.count, 1);

  ResCheckSettings& rc = c.rescheck;
  if (const ConfigEntry* e = r.find("rescheck", "h")) {
    rc.h_values = r.numberList(*e, "h");
    for (double h : rc.h_values)
      if (!(h > 0.0)) configFail(doc.source, e->line, "'h' values must be positive");
  }
  if (const ConfigEntry* e = r.find("rescheck", "epsilon")) rc.epsilon = r.scaledList(*e, "epsilon");
  r.positive("rescheck", "amplitude", rc.amplitude);
  r.positive("rescheck", "re_min_over_h_tilde", rc.re_min_over_h_tilde);
  if (const ConfigEntry* e = r.find("rescheck", "re_max"); e && e->value != "auto") {
    double v = 0.0;
    r.positive("rescheck", "re_max", v);
    rc.re_max = v;
  }
  r.integer("rescheck", "n_re", rc.n_re, 1);
  if (const ConfigEntry* e = r.find("rescheck", "im_over_h_tilde"))
    rc.im_over_h_tilde = r.numberList(*e, "im_over_h_tilde");
  r.positive("rescheck", "c_cutoff", rc.c_cutoff);
  r.positive("rescheck", "c_im", rc.c_im);
  r.positive("rescheck", "smallness", rc.smallness);
  return c;
}

ExperimentConfig parseConfig(std::istream& in, const std::string& source) {
  return buildConfig(parseConfigDocument(in, source));
}

ExperimentConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::MissingInput, "cannot open config file '" + path + "'");
  ExperimentConfig c = parseConfig(in, path);
  const auto parent = std::filesystem::path(path).parent_path();
  c.base_dir = parent.empty() ? "." : parent.string();
  return c;
}

SymbolCoefficients resolveSymbol(const ExperimentConfig& config) {
  switch (config.symbol_source) {
    case SymbolSource::Generate:
      return generateRandomSymbol(config.degree, config.kappa, config.seed.value_or(0));
    case SymbolSource::File: {
      std::filesystem::path p(config.symbol_file);
      if (p.is_relative()) p = std::filesystem::path(config.base_dir) / p;
      return loadSymbol(p.string());
    }
    case SymbolSource::Inline: {
      SymbolCoefficients q(config.degree, config.kappa, config.seed);
      for (const InlineCoefficient& c : config.inline_coefficients)
        q = q.withCoefficient(c.ell, c.j, c.k, c.value);
      return q;
    }
  }
  fail(ErrorKind::ConfigError, "unknown symbol source");
}

std::string resolveOutputDir(const ExperimentConfig& config) {
  std::filesystem::path p(config.output_dir);
  if (p.is_relative())
    if (const char* root = std::getenv(kOutputRootVariable); root && *root)
      p = std::filesystem::path(root) / p;
  return p.string();
}

}  // namespace torspec
