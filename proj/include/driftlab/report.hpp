#pragma once

// Key-value experiment reports (diffable plain text, lossless numeric
// round-trip) and the config-file parser backing the command line tool.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/common.hpp"

namespace driftlab {

struct Report {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> items;  // insertion order kept

  explicit Report(std::string name = "") : experiment(std::move(name)) {}

  void set_text(const std::string& key, const std::string& value) {
    require(!key.empty() && key.find_first_of(" \t\n") == std::string::npos,
            "Report: keys must be nonempty and whitespace-free");
    require(value.find('\n') == std::string::npos, "Report: values must be single-line");
    for (auto& kv : items) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    items.emplace_back(key, value);
  }

  void set(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    set_text(key, buf);
  }

  void set_int(const std::string& key, long long value) {
    set_text(key, std::to_string(value));
  }

  void set_flag(const std::string& key, bool pass) { set_text(key, pass ? "1" : "0"); }

  bool has(const std::string& key) const {
    for (const auto& kv : items)
      if (kv.first == key) return true;
    return false;
  }

  const std::string& text(const std::string& key) const {
    for (const auto& kv : items)
      if (kv.first == key) return kv.second;
    throw std::invalid_argument("Report: missing key " + key);
  }

  double value(const std::string& key) const {
    const std::string& s = text(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw std::invalid_argument("Report: key " + key + " is not numeric: " + s);
    return v;
  }

  bool flag(const std::string& key) const { return text(key) == "1"; }

  // every "flag.*" entry equals 1
  bool all_flags_pass() const {
    for (const auto& kv : items)
      if (kv.first.rfind("flag.", 0) == 0 && kv.second != "1") return false;
    return true;
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "experiment " << experiment << "\n";
    for (const auto& kv : items) out << kv.first << " " << kv.second << "\n";
    return out.str();
  }

  static Report parse(const std::string& text) {
    Report rep;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto sp = line.find(' ');
      const std::string key = line.substr(0, sp);
      const std::string val = sp == std::string::npos ? "" : line.substr(sp + 1);
      if (first) {
        require(key == "experiment", "Report::parse: first line must name the experiment");
        rep.experiment = val;
        first = false;
      } else {
        rep.items.emplace_back(key, val);
      }
    }
    require(!first, "Report::parse: empty document");
    return rep;
  }

  void save(const std::string& path) const {
    std::ofstream f(path);
    require(static_cast<bool>(f), "Report: cannot write " + path);
    f << serialize();
  }

  static Report load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("Report: cannot read " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
  }
};

// Config files are "key value" lines; '#' starts a comment, blank lines are
// skipped. Values keep any internal spaces (useful for paths).
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto sp = line.find_first_of(" \t");
    if (sp == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key value'");
    const std::string key = line.substr(0, sp);
    const auto vb = line.find_first_not_of(" \t", sp);
    cfg[key] = line.substr(vb);
  }
  return cfg;
}

inline std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot read " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

inline double config_number(const std::map<std::string, std::string>& cfg,
                            const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw std::invalid_argument("config: key " + key + " is not numeric: " + it->second);
  return v;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace driftlab
