#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ricci2d {

/// Where a command takes its scenario from, plus command-line overrides.
struct ScenarioSource
{
  std::optional<std::filesystem::path> config;
  std::optional<std::string> scenario; ///< built-in name when no config is given
  std::optional<double> t_end;
  std::optional<long> grid_n;
  std::optional<std::string> scheme;
};

struct RunCommand
{
  ScenarioSource source;
  std::filesystem::path out_dir;
  bool allow_extinction = false;
};

// Exit codes: 0 success or PASS, 1 error, 2 FAIL verdict.
int cmd_run(const RunCommand &cmd, std::ostream &out, std::ostream &err);
int cmd_aperture(const ScenarioSource &src, std::ostream &out, std::ostream &err);
int cmd_classify(const ScenarioSource &src, std::ostream &out, std::ostream &err);
int cmd_verify(const std::filesystem::path &out_dir, std::ostream &out, std::ostream &err);
int cmd_fit(const std::filesystem::path &out_dir, std::optional<double> t_min, std::optional<double> t_max,
            std::ostream &out, std::ostream &err);

/// Worker count for diagnostics: hardware threads capped by RICCI2D_THREADS.
unsigned diagnostics_threads();

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string &text);

} // namespace ricci2d
