#include "ricci2d/timeseries.hpp"
#include "ricci2d/error.hpp"
#include "ricci2d/snapshot.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ricci2d {

const char *const timeseries_header = "t,supR,supGradR2,supGrad2R2,supGradF2g,supF,area,u0,aperture";

namespace {

bool same(double a, double b)
{
  return a == b || (std::isnan(a) && std::isnan(b));
}

std::vector<double> split_numbers(const std::string &line, const std::filesystem::path &path)
{
  std::vector<double> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    char *end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0')
      throw Error("bad-csv", path.string() + ": bad value '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

std::ifstream open_csv(const std::filesystem::path &path, const std::string &header)
{
  std::ifstream in(path);
  if (!in)
    throw Error("io", "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || (!header.empty() && line != header))
    throw Error("bad-csv", path.string() + ": unexpected header");
  return in;
}

} // namespace

bool TimeSeriesRow::operator==(const TimeSeriesRow &o) const
{
  return same(t, o.t) && same(supR, o.supR) && same(supGradR2, o.supGradR2) && same(supGrad2R2, o.supGrad2R2) &&
         same(supGradF2g, o.supGradF2g) && same(supF, o.supF) && same(area, o.area) && same(u0, o.u0) &&
         same(aperture, o.aperture);
}

void write_timeseries(const std::filesystem::path &path, const TimeSeries &series)
{
  std::ofstream out(path);
  if (!out)
    throw Error("io", "cannot write " + path.string());
  out << timeseries_header << '\n';
  for (const auto &r : series)
    out << format_real(r.t) << ',' << format_real(r.supR) << ',' << format_real(r.supGradR2) << ','
        << format_real(r.supGrad2R2) << ',' << format_real(r.supGradF2g) << ',' << format_real(r.supF) << ','
        << format_real(r.area) << ',' << format_real(r.u0) << ',' << format_real(r.aperture) << '\n';
  if (!out)
    throw Error("io", "failed writing " + path.string());
}

TimeSeries read_timeseries(const std::filesystem::path &path)
{
  std::ifstream in = open_csv(path, timeseries_header);
  TimeSeries series;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto v = split_numbers(line, path);
    if (v.size() != 9)
      throw Error("bad-csv", path.string() + ": expected 9 columns");
    series.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  return series;
}

void write_pairs(const std::filesystem::path &path, const std::string &header,
                 const std::vector<std::pair<double, double>> &rows)
{
  std::ofstream out(path);
  if (!out)
    throw Error("io", "cannot write " + path.string());
  out << header << '\n';
  for (const auto &[a, b] : rows)
    out << format_real(a) << ',' << format_real(b) << '\n';
  if (!out)
    throw Error("io", "failed writing " + path.string());
}

std::vector<std::pair<double, double>> read_pairs(const std::filesystem::path &path)
{
  std::ifstream in = open_csv(path, "");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto v = split_numbers(line, path);
    if (v.size() != 2)
      throw Error("bad-csv", path.string() + ": expected 2 columns");
    rows.emplace_back(v[0], v[1]);
  }
  return rows;
}

std::vector<double> column(const TimeSeries &series, const std::string &name)
{
  double TimeSeriesRow::*member = nullptr;
  if (name == "t")
    member = &TimeSeriesRow::t;
  else if (name == "supR")
    member = &TimeSeriesRow::supR;
  else if (name == "supGradR2")
    member = &TimeSeriesRow::supGradR2;
  else if (name == "supGrad2R2")
    member = &TimeSeriesRow::supGrad2R2;
  else if (name == "supGradF2g")
    member = &TimeSeriesRow::supGradF2g;
  else if (name == "supF")
    member = &TimeSeriesRow::supF;
  else if (name == "area")
    member = &TimeSeriesRow::area;
  else if (name == "u0")
    member = &TimeSeriesRow::u0;
  else if (name == "aperture")
    member = &TimeSeriesRow::aperture;
  else
    throw Error("parameter-out-of-range", "unknown column '" + name + "'");
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto &r : series)
    out.push_back(r.*member);
  return out;
}

} // namespace ricci2d
