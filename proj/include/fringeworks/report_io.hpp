#pragma once

// File output: intensity profiles and the gamma sweep as CSV, the Afshar
// report as JSON (or a flat CSV table).

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fringeworks/config.hpp"
#include "fringeworks/errors.hpp"
#include "fringeworks/experiment.hpp"
#include "fringeworks/profile.hpp"
#include "fringeworks/version.hpp"

namespace fringeworks {

using nlohmann::json;

/// Raised when an output file cannot be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Scientific notation with nine digits after the point, e.g.
/// "-1.283857840e-03": rounding stays below 5e-10 relative, so positions read
/// back agree to 1e-9.
inline std::string format_position(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific, 9);
  return std::string(buf.data(), res.ptr);
}

/// Shortest text that parses back to exactly the same double.
inline std::string format_exact(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw OutputError("failed writing " + path.string());
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

}  // namespace detail

// ---- profiles ---------------------------------------------------------------

inline void write_profile_csv(const IntensityProfile& profile, std::ostream& out) {
  out << "x_m,intensity\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << detail::format_position(profile.positions()[i]) << ',' << detail::format_exact(profile.values()[i])
        << '\n';
  }
}

inline IntensityProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x_m,intensity") {
    throw ValidationError("profile CSV: missing 'x_m,intensity' header");
  }
  std::vector<double> xs;
  std::vector<double> vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("profile CSV: malformed row '" + line + "'");
    xs.push_back(detail::parse_double(std::string_view(line).substr(0, comma)));
    vs.push_back(detail::parse_double(std::string_view(line).substr(comma + 1)));
  }
  return IntensityProfile(std::move(xs), std::move(vs));
}

/// Writes `profile_<plane>.csv` into `dir` and returns its path.
inline std::filesystem::path emit_profile(const IntensityProfile& profile, const std::string& plane,
                                          const std::filesystem::path& dir) {
  detail::require(std::ranges::find(profile_planes(), plane) != profile_planes().end(),
                  "emit_profile: unknown plane '" + plane + "'");
  const auto path = dir / ("profile_" + plane + ".csv");
  auto out = detail::open_output(path);
  write_profile_csv(profile, out);
  detail::finish_output(out, path);
  return path;
}

// ---- gamma sweep -------------------------------------------------------------

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "gamma_abs,visibility,distinguishability,duality_sum\n";
  for (const auto& r : rows) {
    out << detail::format_exact(r.gamma_abs) << ',' << detail::format_exact(r.visibility) << ','
        << detail::format_exact(r.distinguishability) << ',' << detail::format_exact(r.duality_sum) << '\n';
  }
}

inline json sweep_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"gamma_abs", r.gamma_abs},
                   {"visibility", r.visibility},
                   {"distinguishability", r.distinguishability},
                   {"duality_sum", r.duality_sum}});
  }
  return json{{"tool", "fringeworks"}, {"version", kVersion}, {"sweep", arr}};
}

inline std::filesystem::path emit_sweep(const std::vector<SweepRow>& rows, OutputFormat format,
                                        const std::filesystem::path& dir) {
  const auto path = dir / (format == OutputFormat::kCsv ? "sweep.csv" : "sweep.json");
  auto out = detail::open_output(path);
  if (format == OutputFormat::kCsv) {
    write_sweep_csv(rows, out);
  } else {
    out << sweep_to_json(rows).dump(2) << '\n';
  }
  detail::finish_output(out, path);
  return path;
}

// ---- Afshar report -----------------------------------------------------------

struct ReportDocument {
  AfsharReport report;
  std::string tool_version = kVersion;
  std::string timestamp;
};

inline ReportDocument make_report_document(AfsharReport report) {
  return ReportDocument{std::move(report), kVersion, detail::utc_timestamp()};
}

namespace detail {

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline json apparatus_to_json(const ApparatusConfig& a) {
  return json{
      {"wavelength", a.wavelength},
      {"slit_separation", a.slit_separation},
      {"slit_width", a.slit_width},
      {"dist_slit_to_wires", a.dist_slit_to_wires},
      {"dist_wires_to_lens", a.dist_wires_to_lens},
      {"focal_length", a.focal_length},
      {"auto_image", a.auto_image},
      {"dist_lens_to_image", a.dist_lens_to_image},
      {"wire_count", a.wire_count},
      {"wire_width", optional_json(a.wire_width)},
      {"detector_halfwidth", optional_json(a.detector_halfwidth)},
      {"lens_aperture_halfwidth", optional_json(a.lens_aperture_halfwidth)},
      {"gamma_re", a.marker_gamma.value().real()},
      {"gamma_im", a.marker_gamma.value().imag()},
      {"grid_n", a.grid.n},
      {"grid_extent", a.grid.extent},
      {"derived",
       {{"image_distance", a.image_distance()},
        {"magnification", a.magnification()},
        {"fringe_period", a.fringe_period()},
        {"wire_width", a.effective_wire_width()},
        {"detector_halfwidth", a.effective_detector_halfwidth()},
        {"lens_aperture_halfwidth", a.effective_lens_aperture()},
        {"gamma_abs", a.marker_gamma.magnitude()},
        {"gamma_phase_rad", a.marker_gamma.phase()}}},
  };
}

inline ApparatusConfig apparatus_from_json(const json& j) {
  ApparatusConfig a;
  a.wavelength = j.at("wavelength").get<double>();
  a.slit_separation = j.at("slit_separation").get<double>();
  a.slit_width = j.at("slit_width").get<double>();
  a.dist_slit_to_wires = j.at("dist_slit_to_wires").get<double>();
  a.dist_wires_to_lens = j.at("dist_wires_to_lens").get<double>();
  a.focal_length = j.at("focal_length").get<double>();
  a.auto_image = j.at("auto_image").get<bool>();
  a.dist_lens_to_image = j.at("dist_lens_to_image").get<double>();
  a.wire_count = j.at("wire_count").get<int>();
  a.wire_width = optional_from(j.at("wire_width"));
  a.detector_halfwidth = optional_from(j.at("detector_halfwidth"));
  a.lens_aperture_halfwidth = optional_from(j.at("lens_aperture_halfwidth"));
  a.marker_gamma = MarkerOverlap(Complex(j.at("gamma_re").get<double>(), j.at("gamma_im").get<double>()));
  a.grid = GridGeometry{j.at("grid_n").get<std::size_t>(), j.at("grid_extent").get<double>()};
  return a;
}

inline Scenario scenario_from_key(const std::string& key, const MarkerOverlap& gamma) {
  for (const auto& s : afshar_scenarios(gamma)) {
    if (s.key() == key) return s;
  }
  throw ValidationError("report: unknown scenario key '" + key + "'");
}

}  // namespace detail

inline json report_to_json(const ReportDocument& doc) {
  const auto& r = doc.report;
  json scenarios = json::object();
  for (const auto& e : r.entries) {
    const auto& s = e.result;
    scenarios[e.scenario.key()] = {
        {"power_DA", s.power_DA},
        {"power_DB", s.power_DB},
        {"power_intercepted_by_wires", s.power_intercepted_by_wires},
        {"power_total_at_image", s.power_total_at_image},
        {"power_input", s.power_input},
        {"wire_plane_visibility", s.wire_plane_visibility},
        {"relative_loss", e.relative_loss},
    };
  }
  return json{
      {"tool", "fringeworks"},
      {"version", doc.tool_version},
      {"timestamp", doc.timestamp},
      {"config", detail::apparatus_to_json(r.config)},
      {"wire_positions_m", r.wire_positions},
      {"scenarios", scenarios},
      {"duality",
       {{"visibility", r.duality.visibility},
        {"distinguishability", r.duality.distinguishability},
        {"duality_sum", r.duality.duality_sum}}},
  };
}

inline ReportDocument report_from_json(const json& j) {
  ReportDocument doc;
  doc.tool_version = j.at("version").get<std::string>();
  doc.timestamp = j.at("timestamp").get<std::string>();
  AfsharReport& r = doc.report;
  r.config = detail::apparatus_from_json(j.at("config"));
  r.wire_positions = j.at("wire_positions_m").get<std::vector<double>>();
  // Keep the canonical scenario order rather than the document's key order.
  for (const auto& s : afshar_scenarios(r.config.marker_gamma)) {
    const auto& e = j.at("scenarios").at(s.key());
    ScenarioEntry entry{detail::scenario_from_key(s.key(), r.config.marker_gamma), {}, 0.0};
    entry.result.power_DA = e.at("power_DA").get<double>();
    entry.result.power_DB = e.at("power_DB").get<double>();
    entry.result.power_intercepted_by_wires = e.at("power_intercepted_by_wires").get<double>();
    entry.result.power_total_at_image = e.at("power_total_at_image").get<double>();
    entry.result.power_input = e.at("power_input").get<double>();
    entry.result.wire_plane_visibility = e.at("wire_plane_visibility").get<double>();
    entry.relative_loss = e.at("relative_loss").get<double>();
    r.entries.push_back(entry);
  }
  const auto& d = j.at("duality");
  r.duality = DualityReport{d.at("visibility").get<double>(), d.at("distinguishability").get<double>(),
                            d.at("duality_sum").get<double>()};
  return doc;
}

inline void write_report_csv(const AfsharReport& r, std::ostream& out) {
  out << "scenario,power_DA,power_DB,power_intercepted_by_wires,power_total_at_image,power_input,"
         "wire_plane_visibility,relative_loss\n";
  for (const auto& e : r.entries) {
    const auto& s = e.result;
    out << '"' << e.scenario.key() << '"';
    for (double v : {s.power_DA, s.power_DB, s.power_intercepted_by_wires, s.power_total_at_image, s.power_input,
                     s.wire_plane_visibility, e.relative_loss}) {
      out << ',' << detail::format_exact(v);
    }
    out << '\n';
  }
}

/// Writes report.json or report.csv into `dir` and returns its path.
inline std::filesystem::path emit_report(const ReportDocument& doc, OutputFormat format,
                                         const std::filesystem::path& dir) {
  const auto path = dir / (format == OutputFormat::kJson ? "report.json" : "report.csv");
  auto out = detail::open_output(path);
  if (format == OutputFormat::kJson) {
    out << report_to_json(doc).dump(2) << '\n';
  } else {
    write_report_csv(doc.report, out);
  }
  detail::finish_output(out, path);
  return path;
}

}  // namespace fringeworks
