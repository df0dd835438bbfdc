#pragma once

// Command-line front end. `run_cli` holds everything `main` does so the
// subcommands can be driven from tests.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 runtime failure.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fringeworks/config.hpp"
#include "fringeworks/experiment.hpp"
#include "fringeworks/report_io.hpp"
#include "fringeworks/selftest.hpp"
#include "fringeworks/version.hpp"

namespace fringeworks {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

namespace detail {

struct CliOptions {
  std::string config = "default";
  std::string out;
  std::string format;
  int gamma_steps = 11;
  bool force = false;
};

inline RunConfig resolve_run_config(const CliOptions& opts) {
  RunConfig run = opts.config == "default" ? parse_config("") : load_config(opts.config);
  if (!opts.out.empty()) run.output_dir = opts.out;
  if (!opts.format.empty()) run.formats = fringeworks::parse_formats(opts.format);
  return run;
}

/// Creates the run directory; an existing non-empty one needs --force.
inline void prepare_output_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw ValidationError("output path " + dir.string() + " is not a directory");
    if (!fs::is_empty(dir, ec) && !force) {
      throw ValidationError("output directory " + dir.string() + " is not empty; pass --force to overwrite");
    }
  } else if (!fs::create_directories(dir, ec) || ec) {
    throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline int cmd_pattern(const CliOptions& opts, std::ostream& out) {
  const auto run = resolve_run_config(opts);
  prepare_output_dir(run.output_dir, opts.force);
  PlaneProfiles planes;
  const auto result = run_scenario(run.apparatus, Scenario{SlitSelection::kBoth, false, std::nullopt}, &planes);
  const auto path = emit_profile(planes.wires, "wires", run.output_dir);
  out << "fringe period  " << sci(run.apparatus.fringe_period()) << " m\n"
      << "visibility     " << fixed(result.wire_plane_visibility) << "\n"
      << "wrote " << path.string() << "\n";
  return kExitOk;
}

inline int cmd_afshar(const CliOptions& opts, std::ostream& out) {
  const auto run = resolve_run_config(opts);
  prepare_output_dir(run.output_dir, opts.force);
  const auto doc = make_report_document(run_afshar(run.apparatus));
  for (auto format : run.formats) out << "wrote " << emit_report(doc, format, run.output_dir).string() << "\n";

  if (!run.profiles_requested.empty()) {
    PlaneProfiles planes;
    run_scenario(run.apparatus, Scenario{SlitSelection::kBoth, true, std::nullopt}, &planes);
    for (const auto& plane : run.profiles_requested) {
      const IntensityProfile& p = plane == "slit" ? planes.slit
                                  : plane == "wires" ? planes.wires
                                  : plane == "lens" ? planes.lens
                                                    : planes.image;
      out << "wrote " << emit_profile(p, plane, run.output_dir).string() << "\n";
    }
  }

  out << "\nscenario                              D_A           D_B           loss      V(wires)\n";
  for (const auto& e : doc.report.entries) {
    std::string key = e.scenario.key();
    key.resize(36, ' ');
    out << key << "  " << sci(e.result.power_DA) << "  " << sci(e.result.power_DB) << "  "
        << fixed(e.relative_loss) << "  " << fixed(e.result.wire_plane_visibility) << "\n";
  }
  const auto& d = doc.report.duality;
  out << "\n|gamma| = " << fixed(run.apparatus.marker_gamma.magnitude()) << "  V = " << fixed(d.visibility)
      << "  D = " << fixed(d.distinguishability) << "  V^2+D^2 = " << fixed(d.duality_sum) << "\n";
  return kExitOk;
}

inline int cmd_sweep(const CliOptions& opts, std::ostream& out) {
  if (opts.gamma_steps < 2) throw ValidationError("--gamma-steps must be at least 2");
  const auto run = resolve_run_config(opts);
  prepare_output_dir(run.output_dir, opts.force);
  std::vector<double> gammas;
  for (int i = 0; i < opts.gamma_steps; ++i) gammas.push_back(static_cast<double>(i) / (opts.gamma_steps - 1));
  const auto rows = gamma_sweep(run.apparatus, gammas);
  for (auto format : run.formats) out << "wrote " << emit_sweep(rows, format, run.output_dir).string() << "\n";
  out << "\n|gamma|    V          D          V^2+D^2\n";
  for (const auto& r : rows) {
    out << fixed(r.gamma_abs, 4) << "     " << fixed(r.visibility) << "   " << fixed(r.distinguishability) << "   "
        << fixed(r.duality_sum) << "\n";
  }
  return kExitOk;
}

inline int cmd_selftest(const CliOptions& opts, std::ostream& out) {
  const auto run = resolve_run_config(opts);
  const auto results = run_selftest(run.apparatus);
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "  " << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitRuntime;
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fringeworks: two-slit interference with which-way markers and an Afshar-style wire grid",
               "fringeworks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  detail::CliOptions opts;
  auto add_common = [&](CLI::App* sub, bool writes_files) {
    sub->add_option("--config", opts.config, "Config file path, or 'default'");
    if (writes_files) {
      sub->add_option("--out", opts.out, "Output directory (one per run)");
      sub->add_option("--format", opts.format, "Comma-separated output formats: csv,json");
      sub->add_flag("--force", opts.force, "Write into a non-empty output directory");
    }
  };
  auto* pattern = app.add_subcommand("pattern", "Emit the coherent two-slit intensity at the wire plane");
  auto* afshar = app.add_subcommand("afshar", "Run the eight wire/marker scenarios and write a report");
  auto* sweep = app.add_subcommand("sweep", "Tabulate visibility and distinguishability against |gamma|");
  auto* selftest = app.add_subcommand("selftest", "Check the library's invariants and print a summary");
  add_common(pattern, true);
  add_common(afshar, true);
  add_common(sweep, true);
  add_common(selftest, false);
  sweep->add_option("--gamma-steps", opts.gamma_steps, "Number of |gamma| values from 0 to 1 inclusive");

  if (!args.empty() && !args.front().starts_with('-') && app.get_subcommand_no_throw(args.front()) == nullptr) {
    err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
    return kExitValidation;
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(kVersion) + "\n" : app.help());
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (pattern->parsed()) return detail::cmd_pattern(opts, out);
    if (afshar->parsed()) return detail::cmd_afshar(opts, out);
    if (sweep->parsed()) return detail::cmd_sweep(opts, out);
    return detail::cmd_selftest(opts, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace fringeworks
