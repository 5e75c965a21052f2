#include "ljsr/keyval.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ljsr {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

KeyVal parse_keyval_text(const std::string& text) {
  KeyVal kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("keyval: missing '=' on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("keyval: empty key on line " + std::to_string(lineno));
    kv[key] = value;
  }
  return kv;
}

KeyVal read_keyval_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("keyval: cannot open " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_keyval_text(ss.str());
}

void write_keyval_file(const std::filesystem::path& file, const KeyVal& kv) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("keyval: cannot open " + file.string() + " for writing");
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  if (!os) throw std::runtime_error("keyval: write failed for " + file.string());
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace ljsr
