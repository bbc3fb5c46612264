#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace ricci2d {

/// One recorded time of a run.
struct TimeSeriesRow
{
  double t = 0.0;
  double supR = 0.0;
  double supGradR2 = 0.0;  ///< sup |grad R|^2_g
  double supGrad2R2 = 0.0; ///< sup |grad^2 R|^2_g
  double supGradF2g = 0.0; ///< sup |grad f|^2_g
  double supF = 0.0;
  double area = 0.0;
  double u0 = 0.0;         ///< u at the origin
  double aperture = std::numeric_limits<double>::quiet_NaN();

  bool operator==(const TimeSeriesRow &o) const;
};

using TimeSeries = std::vector<TimeSeriesRow>;

extern const char *const timeseries_header;

void write_timeseries(const std::filesystem::path &path, const TimeSeries &series);
/// Throws Error("bad-csv") on a malformed file.
TimeSeries read_timeseries(const std::filesystem::path &path);

/// Two-column CSV with the given header, values at 17 significant digits.
void write_pairs(const std::filesystem::path &path, const std::string &header,
                 const std::vector<std::pair<double, double>> &rows);
std::vector<std::pair<double, double>> read_pairs(const std::filesystem::path &path);

/// Column k of the series by name: supR, supGradR2, ...
std::vector<double> column(const TimeSeries &series, const std::string &name);

} // namespace ricci2d
