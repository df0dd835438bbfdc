#pragma once

// Run configuration in a flat `key = value` text format:
//
//   # comments run to end of line
//   wavelength       = 650e-9      # lengths in SI metres; an optional "m" suffix is accepted
//   slit_separation  = 250e-6 m
//   wire_count       = 6
//   gamma_abs        = 0.5
//   gamma_phase_rad  = 0
//   formats          = csv,json
//   profiles         = wires,image
//
// Absent keys take their defaults; unknown keys are rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fringeworks/errors.hpp"
#include "fringeworks/experiment.hpp"

namespace fringeworks {

enum class OutputFormat { kCsv, kJson };

inline const std::vector<std::string>& profile_planes() {
  static const std::vector<std::string> planes{"slit", "wires", "lens", "image"};
  return planes;
}

struct RunConfig {
  ApparatusConfig apparatus;
  std::filesystem::path output_dir = "fringeworks-out";
  std::set<OutputFormat> formats{OutputFormat::kCsv, OutputFormat::kJson};
  std::vector<std::string> profiles_requested{"wires"};
};

/// A configuration problem tied to a key and (when known) a 1-based line.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string key, int line, const std::string& message)
      : ValidationError(describe(key, line, message)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string describe(const std::string& key, int line, const std::string& message) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += ", key '" + key + "'";
    return out + ": " + message;
  }

  std::string key_;
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

class ConfigParser {
 public:
  ConfigParser(const std::string& key, int line, std::string_view value)
      : key_(key), line_(line), value_(value) {}

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(key_, line_, message); }

  double number() const {
    double v = 0.0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail("expected a finite number, got '" + std::string(value_) + "'");
    return v;
  }

  /// A length in metres: a bare number or a number followed by "m".
  double length() const {
    std::string_view digits = value_;
    if (const auto unit = digits.find_first_not_of("0123456789.eE+-"); unit != std::string_view::npos) {
      const auto suffix = trim(digits.substr(unit));
      if (suffix != "m") fail("lengths must be given in SI metres, got unit '" + std::string(suffix) + "'");
      digits = trim(digits.substr(0, unit));
    }
    const double v = ConfigParser(key_, line_, digits).number();
    if (v <= 0.0) fail("length must be positive");
    return v;
  }

  long integer() const {
    long v = 0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, v);
    if (ec != std::errc() || ptr != end) fail("expected an integer, got '" + std::string(value_) + "'");
    return v;
  }

  bool boolean() const {
    if (value_ == "true" || value_ == "1" || value_ == "yes") return true;
    if (value_ == "false" || value_ == "0" || value_ == "no") return false;
    fail("expected true or false, got '" + std::string(value_) + "'");
  }

  std::string_view text() const { return value_; }

 private:
  const std::string& key_;
  int line_;
  std::string_view value_;
};

inline std::set<OutputFormat> parse_formats(const ConfigParser& p, std::string_view text) {
  std::set<OutputFormat> out;
  for (const auto& item : split_list(text)) {
    if (item == "csv") {
      out.insert(OutputFormat::kCsv);
    } else if (item == "json") {
      out.insert(OutputFormat::kJson);
    } else {
      p.fail("unknown format '" + item + "' (expected csv, json)");
    }
  }
  if (out.empty()) p.fail("at least one output format is required");
  return out;
}

inline std::vector<std::string> parse_profiles(const ConfigParser& p, std::string_view text) {
  std::vector<std::string> out;
  for (const auto& item : split_list(text)) {
    if (std::ranges::find(profile_planes(), item) == profile_planes().end()) {
      p.fail("unknown plane '" + item + "' (expected slit, wires, lens, image)");
    }
    if (std::ranges::find(out, item) == out.end()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

/// Output formats from a comma-separated list such as "csv,json".
inline std::set<OutputFormat> parse_formats(std::string_view text) {
  const std::string key = "formats";
  return detail::parse_formats(detail::ConfigParser(key, 0, text), text);
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig run;
  ApparatusConfig& a = run.apparatus;
  double gamma_abs = a.marker_gamma.magnitude();
  double gamma_phase = a.marker_gamma.phase();
  bool auto_image_given = false;
  bool image_distance_given = false;
  std::map<std::string, int> seen;

  using Setter = std::function<void(const detail::ConfigParser&)>;
  const std::map<std::string, Setter> setters{
      {"wavelength", [&](const auto& p) { a.wavelength = p.length(); }},
      {"slit_separation", [&](const auto& p) { a.slit_separation = p.length(); }},
      {"slit_width", [&](const auto& p) { a.slit_width = p.length(); }},
      {"dist_slit_to_wires", [&](const auto& p) { a.dist_slit_to_wires = p.length(); }},
      {"dist_wires_to_lens", [&](const auto& p) { a.dist_wires_to_lens = p.length(); }},
      {"focal_length", [&](const auto& p) { a.focal_length = p.length(); }},
      {"dist_lens_to_image",
       [&](const auto& p) {
         a.dist_lens_to_image = p.length();
         image_distance_given = true;
       }},
      {"auto_image",
       [&](const auto& p) {
         a.auto_image = p.boolean();
         auto_image_given = true;
       }},
      {"wire_count",
       [&](const auto& p) {
         const long v = p.integer();
         if (v < 0) p.fail("must be >= 0");
         if (v > 10000) p.fail("unreasonably large");
         a.wire_count = static_cast<int>(v);
       }},
      {"wire_width", [&](const auto& p) { a.wire_width = p.length(); }},
      {"detector_halfwidth", [&](const auto& p) { a.detector_halfwidth = p.length(); }},
      {"lens_aperture_halfwidth", [&](const auto& p) { a.lens_aperture_halfwidth = p.length(); }},
      {"gamma_abs",
       [&](const auto& p) {
         gamma_abs = p.number();
         if (gamma_abs < 0.0 || gamma_abs > 1.0) p.fail("must lie in [0, 1]");
       }},
      {"gamma_phase_rad", [&](const auto& p) { gamma_phase = p.number(); }},
      {"grid_n",
       [&](const auto& p) {
         const long v = p.integer();
         if (v < 2 || (v & (v - 1)) != 0) p.fail("must be a power of two >= 2");
         a.grid.n = static_cast<std::size_t>(v);
       }},
      {"grid_extent", [&](const auto& p) { a.grid.extent = p.length(); }},
      {"output_dir",
       [&](const auto& p) {
         if (p.text().empty()) p.fail("must not be empty");
         run.output_dir = std::string(p.text());
       }},
      {"formats", [&](const auto& p) { run.formats = detail::parse_formats(p, p.text()); }},
      {"profiles", [&](const auto& p) { run.profiles_requested = detail::parse_profiles(p, p.text()); }},
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, line_no, "unknown key");
    if (const auto [prev, inserted] = seen.emplace(key, line_no); !inserted) {
      throw ConfigError(key, line_no, "duplicate key (first set on line " + std::to_string(prev->second) + ")");
    }
    it->second(detail::ConfigParser(key, line_no, value));
  }

  if (image_distance_given && !auto_image_given) a.auto_image = false;
  a.marker_gamma = MarkerOverlap::from_polar(gamma_abs, gamma_phase);
  try {
    a.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("", 0, e.what());
  }
  if (!a.auto_image && !a.imaging_condition_holds()) {
    const int line = seen.contains("dist_lens_to_image") ? seen["dist_lens_to_image"] : 0;
    throw ConfigError("dist_lens_to_image", line, "does not satisfy 1/(z1+z2) + 1/z3 = 1/f within 1e-6");
  }
  return run;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fringeworks
