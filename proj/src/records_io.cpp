#include "monogeo/records_io.hpp"

#include <algorithm>
#include <array>
#include <ostream>

#include "text_util.hpp"

namespace monogeo {

namespace {

constexpr std::array<const char*, 9> kColumns{"f", "H", "h_bbox", "h_c", "Z_gt", "Z_geo", "Z_err", "H_err", "h_err"};

std::array<double*, 9> fields(GeometryRecord& r) {
  return {&r.f, &r.H, &r.h_bbox, &r.h_c, &r.Z_gt, &r.Z_geo, &r.Z_err, &r.H_err, &r.h_err};
}

}  // namespace

void write_geometry_csv(std::ostream& os, const std::vector<GeometryRecord>& records,
                        const std::vector<std::string>& metadata) {
  for (const auto& m : metadata) os << "# " << m << '\n';
  os << kGeometryRecordColumns << '\n';
  for (GeometryRecord r : records) {
    const auto f = fields(r);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) os << ',';
      os << text_util::format_exact(*f[i]);
    }
    os << '\n';
  }
}

std::vector<GeometryRecord> read_geometry_csv(std::string_view text) {
  std::vector<GeometryRecord> out;
  std::array<int, 9> col{};
  col.fill(-1);
  bool have_header = false;
  int line_no = 0;
  for (std::string_view line : text_util::split_lines(text)) {
    ++line_no;
    const auto t = text_util::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = text_util::split_char(t, ',');
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto name = text_util::trim(cells[c]);
        for (std::size_t k = 0; k < kColumns.size(); ++k) {
          if (name == kColumns[k]) col[k] = static_cast<int>(c);
        }
      }
      for (std::size_t k = 0; k < kColumns.size(); ++k) {
        if (col[k] < 0) throw FormatError(std::string("geometry csv: missing column '") + kColumns[k] + "'");
      }
      have_header = true;
      continue;
    }
    GeometryRecord r;
    auto f = fields(r);
    for (std::size_t k = 0; k < kColumns.size(); ++k) {
      const auto c = static_cast<std::size_t>(col[k]);
      if (c >= cells.size()) {
        throw FormatError("geometry csv: line " + std::to_string(line_no) + " has too few columns");
      }
      const auto v = text_util::parse_double(text_util::trim(cells[c]));
      if (!v) {
        throw FormatError("geometry csv: line " + std::to_string(line_no) + " column '" + kColumns[k] +
                          "' is not a number");
      }
      *f[k] = *v;
    }
    out.push_back(r);
  }
  if (!have_header) throw FormatError("geometry csv: no header row");
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  int line_no = 0;
  for (std::string_view line : text_util::split_lines(text)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text_util::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const auto key = text_util::trim(line.substr(0, eq));
    const auto value = text_util::trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError("config: line " + std::to_string(line_no) + " has an empty key");
    cfg.values_[std::string(key)] = std::string(value);
  }
  return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto s = get(key);
  if (!s) return std::nullopt;
  const auto v = text_util::parse_double(*s);
  if (!v) throw FormatError("config: value of '" + key + "' is not a number: '" + *s + "'");
  return v;
}

std::vector<std::string> KeyValueConfig::unknown_keys(const std::vector<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) out.push_back(k);
  }
  return out;
}

}  // namespace monogeo
