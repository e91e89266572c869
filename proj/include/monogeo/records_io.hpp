#pragma once

// CSV exchange of GeometryRecords and the key-value config format used by
// the CLI.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monogeo/geodepth.hpp"

namespace monogeo {

/// Writes `# `-prefixed metadata lines, the header row, then one row per
/// record with shortest round-trip number formatting.
void write_geometry_csv(std::ostream& os, const std::vector<GeometryRecord>& records,
                        const std::vector<std::string>& metadata = {});

/// Reads CSV produced by write_geometry_csv; `#` lines are skipped and
/// columns are matched by header name so extra columns are tolerated.
std::vector<GeometryRecord> read_geometry_csv(std::string_view text);

/// `key = value` lines; `#` starts a comment. Later keys override earlier.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  // Keys not in `known`, for rejecting typos.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace monogeo
