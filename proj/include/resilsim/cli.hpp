#pragma once

// Command-line front end. Exit codes: 0 ok or complete, 1 incomplete
// solution or failed expectation, 2 input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "resilsim/engine.hpp"
#include "resilsim/scenarios.hpp"

namespace resilsim {

enum ExitCode : int { kExitOk = 0, kExitIncomplete = 1, kExitInput = 2 };

/// Inclusive seed range "A..B".
inline std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw Error(ErrorCode::InvalidArgument, "seed range must look like A..B");
  std::uint64_t a = 0, b = 0;
  const auto lo = text.substr(0, dots), hi = text.substr(dots + 2);
  auto parse = [](const std::string& s, std::uint64_t& v) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
  };
  if (!parse(lo, a) || !parse(hi, b) || a > b) throw Error(ErrorCode::InvalidArgument, "bad seed range '" + text + "'");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a;; ++s) {
    seeds.push_back(s);
    if (s == b) break;
  }
  return seeds;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

inline Json read_config(const std::string& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

inline std::string render_report(const SimReport& r, bool structured) {
  return structured ? report_to_json(r).dump(2) + "\n" : report_to_text(r);
}

inline std::string report_file(bool structured) { return structured ? "report.json" : "report.txt"; }

inline std::string summary_text(const std::vector<SimResult>& results) {
  std::ostringstream out;
  out << "seed availability mttf_h progress lost overhead failures\n";
  double a = 0.0, p = 0.0, l = 0.0, o = 0.0;
  for (const auto& r : results) {
    const auto& rep = r.report;
    out << rep.seed << ' ' << format_number(rep.availability) << ' ' << estimate_text(rep.mttf_h) << ' '
        << format_number(rep.accounting.progress) << ' ' << format_number(rep.accounting.lost) << ' '
        << format_number(rep.accounting.overhead) << ' ' << rep.chain.failures << '\n';
    a += rep.availability;
    p += rep.accounting.progress;
    l += rep.accounting.lost;
    o += rep.accounting.overhead;
  }
  const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
  out << "mean " << format_number(a / n) << " - " << format_number(p / n) << ' ' << format_number(l / n) << ' '
      << format_number(o / n) << " -\n";
  return out.str();
}

inline Json summary_json(const std::vector<SimResult>& results) {
  Json runs = Json::array();
  for (const auto& r : results) {
    runs.push_back(Json{{"seed", r.report.seed},
                        {"availability", r.report.availability},
                        {"mttf_h", r.report.mttf_h.value},
                        {"progress", r.report.accounting.progress},
                        {"lost", r.report.accounting.lost},
                        {"overhead", r.report.accounting.overhead},
                        {"failures", r.report.chain.failures}});
  }
  return Json{{"runs", runs}};
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  std::string format = "text";
};

inline std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("RESILSIM_SEED");
  if (!v || !*v) return std::nullopt;
  std::uint64_t s = 0;
  const std::string text(v);
  const auto r = std::from_chars(text.data(), text.data() + text.size(), s);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, "RESILSIM_SEED must be an unsigned integer");
  }
  return s;
}

inline void emit_single(const SimResult& r, const RunOptions& o, std::ostream& out, std::ostream& err) {
  const bool structured = o.format == "structured";
  const auto report = render_report(r.report, structured);
  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    write_file(dir / "trace.txt", render_trace(r.trace));
    write_file(dir / report_file(structured), report);
  }
  out << report;
  if (!r.verdict.complete) err << "warning: solution is incomplete\n";
}

/// Runs one config (single seed or a sweep) and writes or prints results.
inline int execute(SimConfig cfg, const RunOptions& o, std::ostream& out, std::ostream& err) {
  const bool structured = o.format == "structured";
  if (!o.seeds.empty()) {
    const auto seeds = parse_seed_range(o.seeds);
    const auto results = run_sweep(cfg, seeds);
    const auto summary = structured ? summary_json(results).dump(2) + "\n" : summary_text(results);
    if (!o.out.empty()) {
      const std::filesystem::path dir(o.out);
      std::filesystem::create_directories(dir);
      for (const auto& r : results) {
        const auto sub = dir / ("seed-" + std::to_string(r.report.seed));
        std::filesystem::create_directories(sub);
        write_file(sub / "trace.txt", render_trace(r.trace));
        write_file(sub / report_file(structured), render_report(r.report, structured));
      }
      write_file(dir / (structured ? "summary.json" : "summary.txt"), summary);
    }
    out << summary;
    if (!results.empty() && !results.front().verdict.complete) err << "warning: solution is incomplete\n";
    return kExitOk;
  }
  if (o.seed) cfg.seed = *o.seed;
  else if (auto s = env_seed()) cfg.seed = *s;
  emit_single(run(cfg), o, out, err);
  return kExitOk;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"resilsim: resilience design pattern simulator", "resilsim"};
  app.require_subcommand(1);

  detail::RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "simulate a config and write trace + report");
  run_cmd->add_option("--config", run_opts.config, "config document (JSON)")->required();
  run_cmd->add_option("--seed", run_opts.seed, "seed override");
  run_cmd->add_option("--seeds", run_opts.seeds, "inclusive seed sweep A..B");
  run_cmd->add_option("--out", run_opts.out, "output directory");
  run_cmd->add_option("--format", run_opts.format, "report format")->check(CLI::IsMember({"text", "structured"}));

  std::string validate_config, validate_format = "text";
  auto* validate_cmd = app.add_subcommand("validate", "check a solution against the design-space axes");
  validate_cmd->add_option("--config", validate_config, "config document (JSON)")->required();
  validate_cmd->add_option("--format", validate_format, "verdict format")->check(CLI::IsMember({"text", "structured"}));

  std::string metrics_trace, metrics_format = "text";
  auto* metrics_cmd = app.add_subcommand("metrics", "recompute the report from a stored trace");
  metrics_cmd->add_option("trace", metrics_trace, "trace file")->required();
  metrics_cmd->add_option("--format", metrics_format, "report format")->check(CLI::IsMember({"text", "structured"}));

  std::string catalog_format = "text";
  auto* catalog_cmd = app.add_subcommand("catalog", "list the pattern catalog");
  catalog_cmd->add_option("--format", catalog_format, "listing format")->check(CLI::IsMember({"text", "structured"}));

  detail::RunOptions scen_opts;
  std::string scen_name;
  bool scen_export = false;
  auto* scen_cmd = app.add_subcommand("scenario", "list, export or run a built-in scenario");
  scen_cmd->add_option("name", scen_name, "scenario name (omit to list)");
  scen_cmd->add_flag("--export", scen_export, "print the scenario's config document");
  scen_cmd->add_option("--seed", scen_opts.seed, "seed override");
  scen_cmd->add_option("--seeds", scen_opts.seeds, "inclusive seed sweep A..B");
  scen_cmd->add_option("--out", scen_opts.out, "output directory");
  scen_cmd->add_option("--format", scen_opts.format, "report format")->check(CLI::IsMember({"text", "structured"}));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*run_cmd) return detail::execute(parse_config(detail::read_config(run_opts.config)), run_opts, out, err);

    if (*validate_cmd) {
      const auto cfg = parse_config(detail::read_config(validate_config));
      const auto v = validate_solution(cfg.solution, cfg.model);
      out << (validate_format == "structured" ? verdict_to_json(v).dump(2) + "\n" : verdict_to_text(v));
      return v.complete ? kExitOk : kExitIncomplete;
    }

    if (*metrics_cmd) {
      const auto records = parse_trace(detail::read_file(metrics_trace));
      out << detail::render_report(compute_report(records), metrics_format == "structured");
      return kExitOk;
    }

    if (*catalog_cmd) {
      out << (catalog_format == "structured" ? catalog_json().dump(2) + "\n" : catalog_text());
      return kExitOk;
    }

    if (*scen_cmd) {
      if (scen_name.empty()) {
        for (const auto& s : builtin_scenarios()) out << s.name << "  " << s.summary << "\n";
        return kExitOk;
      }
      const auto s = find_scenario(scen_name);
      if (!s) {
        err << "error: unknown scenario '" << scen_name << "'\n";
        return kExitInput;
      }
      if (scen_export) {
        out << s->config.dump(2) << "\n";
        return kExitOk;
      }
      auto cfg = s->build();
      if (!scen_opts.seeds.empty()) return detail::execute(cfg, scen_opts, out, err);
      if (scen_opts.seed) cfg.seed = *scen_opts.seed;
      else if (auto e = detail::env_seed()) cfg.seed = *e;
      const auto r = run(cfg);
      detail::emit_single(r, scen_opts, out, err);
      bool all = true;
      for (const auto& o : check_expectations(*s, r)) {
        out << (o.pass ? "PASS " : "FAIL ") << o.description << (o.detail.empty() ? "" : ": " + o.detail) << "\n";
        all = all && o.pass;
      }
      return all ? kExitOk : kExitIncomplete;
    }
  } catch (const TraceParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args), std::cout, std::cerr);
}

}  // namespace resilsim
