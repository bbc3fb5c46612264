#pragma once

#include "ricci2d/field.hpp"

#include <filesystem>
#include <string>

namespace ricci2d {

struct Snapshot
{
  ScalarField field;
  double t = 0.0;
  std::string name;
};

/// Text snapshot: `# grid=<kind> n=<n> L=<L> t=<t> field=<name>` followed by
/// one value per line at 17 significant digits, in node order.
void write_snapshot(const std::filesystem::path &path, const ScalarField &w, double t, const std::string &name);

/// Reads a snapshot; the boundary model is not stored and defaults to
/// DirichletInitial unless given. Throws Error("bad-snapshot").
Snapshot read_snapshot(const std::filesystem::path &path,
                       BoundaryModel boundary = BoundaryModel::DirichletInitial);

/// "%.17g" formatting shared by every text output.
std::string format_real(double value);

} // namespace ricci2d
