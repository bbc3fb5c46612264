#include "ricci2d/snapshot.hpp"
#include "ricci2d/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ricci2d {

std::string format_real(double value)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_snapshot(const std::filesystem::path &path, const ScalarField &w, double t, const std::string &name)
{
  if (!w.grid.uniform())
    throw Error("bad-snapshot", "snapshots store uniform grids only");
  std::ofstream out(path);
  if (!out)
    throw Error("io", "cannot write " + path.string());
  out << "# grid=" << to_string(w.grid.kind) << " n=" << w.grid.n << " L=" << format_real(w.grid.extent)
      << " t=" << format_real(t) << " field=" << name << '\n';
  for (Index k = 0; k < w.size(); ++k)
    out << format_real(w.values[k]) << '\n';
  if (!out)
    throw Error("io", "failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path &path, BoundaryModel boundary)
{
  std::ifstream in(path);
  if (!in)
    throw Error("bad-snapshot", "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string hash, kind, n, L, t, name;
  hs >> hash >> kind >> n >> L >> t >> name;
  auto value_of = [&](const std::string &token, const std::string &key) {
    if (token.rfind(key + "=", 0) != 0)
      throw Error("bad-snapshot", path.string() + ": expected '" + key + "=' in header");
    return token.substr(key.size() + 1);
  };
  if (hash != "#")
    throw Error("bad-snapshot", path.string() + ": missing header");
  GridSpec grid;
  try {
    grid.kind = parse_grid_kind(value_of(kind, "grid"));
    grid.n = std::stol(value_of(n, "n"));
    grid.extent = std::stod(value_of(L, "L"));
  } catch (const std::invalid_argument &) {
    throw Error("bad-snapshot", path.string() + ": malformed header");
  }
  grid.boundary = boundary;
  grid.validate();
  Snapshot snap;
  snap.t = std::stod(value_of(t, "t"));
  snap.name = value_of(name, "field");
  Eigen::VectorXd v(grid.node_count());
  std::string line;
  for (Index k = 0; k < v.size(); ++k) {
    if (!std::getline(in, line))
      throw Error("bad-snapshot", path.string() + ": truncated after " + std::to_string(k) + " values");
    v[k] = std::strtod(line.c_str(), nullptr);
  }
  snap.field = ScalarField(grid, std::move(v));
  return snap;
}

} // namespace ricci2d
