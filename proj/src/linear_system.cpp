#include "ricci2d/detail/linear_system.hpp"
#include "ricci2d/detail/tridiagonal.hpp"
#include "ricci2d/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace ricci2d::detail {

std::vector<char> fixed_rows(const GridSpec &grid)
{
  std::vector<char> fixed(static_cast<std::size_t>(grid.node_count()), 0);
  if (grid.boundary == BoundaryModel::Neumann0)
    return fixed;
  for (Index k = 0; k < grid.node_count(); ++k)
    fixed[k] = grid.on_boundary(k) ? 1 : 0;
  return fixed;
}

Eigen::VectorXd solve_shifted_laplacian(const LaplacianOperator &lap, const Eigen::VectorXd &d, double dt,
                                        const std::vector<char> &fixed, const Eigen::VectorXd &rhs)
{
  const GridSpec &grid = lap.grid();
  const Index size = grid.node_count();
  if (grid.radial()) {
    Eigen::VectorXd lower = Eigen::VectorXd::Zero(size), upper = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(size);
    Eigen::VectorXd x = rhs;
    for (Index i = 0; i < size; ++i) {
      if (fixed[i])
        continue;
      diag[i] = d[i];
      lap.for_each_neighbour(i, [&](Index j, double c) {
        diag[i] += dt * c;
        if (j == i - 1)
          lower[i] = -dt * c;
        else if (j == i + 1)
          upper[i] = -dt * c;
        else
          throw Error("invalid-grid", "radial stencil is not tridiagonal");
      });
    }
    solve_tridiagonal(lower, std::move(diag), upper, x);
    return x;
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(size) * 5);
  for (Index k = 0; k < size; ++k) {
    if (fixed[k]) {
      entries.emplace_back(k, k, 1.0);
      continue;
    }
    double centre = d[k];
    lap.for_each_neighbour(k, [&](Index j, double c) {
      centre += dt * c;
      entries.emplace_back(k, j, -dt * c);
    });
    entries.emplace_back(k, k, centre);
  }
  Eigen::SparseMatrix<double> a(size, size);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw Error("newton-diverged", "sparse factorisation failed");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw Error("newton-diverged", "sparse solve failed");
  return x;
}

} // namespace ricci2d::detail
