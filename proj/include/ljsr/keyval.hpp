#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace ljsr {

// Flat string map used for config, meta and summary files.
// File format: one `key = value` per line, '#' starts a comment,
// blank lines ignored. Keys are written in sorted order.
using KeyVal = std::map<std::string, std::string>;

KeyVal parse_keyval_text(const std::string& text);
KeyVal read_keyval_file(const std::filesystem::path& file);
void write_keyval_file(const std::filesystem::path& file, const KeyVal& kv);

std::string trim(const std::string& s);

/// Shortest decimal form that round-trips a double ("%.17g").
std::string format_double(double x);

}  // namespace ljsr
