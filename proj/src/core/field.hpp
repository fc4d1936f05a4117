#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/spectral.hpp"

namespace hesslab {

/// One value per grid point. Exterior points carry 0 and are never read.
class ScalarField {
public:
  explicit ScalarField(std::shared_ptr<const Grid> grid);
  ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values);

  /// Samples f at every interior and boundary point.
  static ScalarField sample(std::shared_ptr<const Grid> grid, const std::function<double(std::span<const double>)>& f);

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator[](std::size_t idx) { return values_[idx]; }

private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// Central second differences; the mixed entries use the four diagonal
/// neighbours. Throws a discretization error if the stencil reaches an
/// exterior point.
SymMatrix hessian_at(const ScalarField& u, std::size_t idx);

/// Central first differences.
std::vector<double> gradient_at(const ScalarField& u, std::size_t idx);

/// Snapshot file "HESS1": magic, version byte, reserved u16, int32 n,
/// int32 domain type, int32 shape[n], double h, double origin[n], domain
/// parameters (radius, or lo[n] and hi[n]), uint64 count, count doubles in
/// row-major order. Little-endian.
void write_snapshot(const std::string& path, const ScalarField& u);
ScalarField read_snapshot(const std::string& path);

/// One row per interior point: x_1..x_n, u, lambda_1..lambda_n, sigma_{n-1}.
void write_field_csv(std::ostream& os, const ScalarField& u);

} // namespace hesslab
