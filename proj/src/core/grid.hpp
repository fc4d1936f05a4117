#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hesslab {

enum class DomainType : std::int32_t { box = 0, ball = 1 };

struct Domain {
  DomainType type = DomainType::ball;
  double radius = 1.0;       // ball
  std::vector<double> lo, hi; // box

  static Domain make_ball(double radius);
  static Domain make_box(std::vector<double> lo, std::vector<double> hi);
  bool contains(std::span<const double> x) const;
};

enum class PointKind : std::uint8_t { exterior = 0, boundary = 1, interior = 2 };

/// Dirichlet closure of one boundary point b:
///   u(b) = (1 - w) g(crossing) + w u(partner)
/// where `crossing` is where the line through b and the interior point
/// `partner` meets the domain boundary. Box boundary points sit on the
/// boundary, so w = 0 and crossing = b.
struct BoundaryClosure {
  std::size_t point = 0;
  std::size_t partner = 0;
  double w = 0.0;
  std::vector<double> crossing;
};

/// Uniform tensor grid with spacing h and a domain mask. Interior points are
/// the unknowns; boundary points are the non-interior points reached by the
/// 3^n-point stencil of some interior point.
class Grid {
public:
  /// Ball of radius R sampled by `points` per axis on [-R, R]^n. A point is
  /// interior iff |x| < R - h/2.
  static Grid ball(int n, double radius, int points);
  /// Box with `points` along axis 0; the other axes use the same spacing and
  /// must have extents that are multiples of it.
  static Grid box(int n, std::vector<double> lo, std::vector<double> hi, int points);
  /// Rebuilds the grid described by a snapshot header.
  static Grid from_descriptor(const Domain& domain, std::span<const std::int32_t> shape, double h,
                              std::span<const double> origin);

  int dim() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  const Domain& domain() const noexcept { return domain_; }
  std::span<const std::int32_t> shape() const noexcept { return shape_; }
  std::span<const double> origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return mask_.size(); }
  std::size_t stride(int axis) const { return strides_[axis]; }

  PointKind kind(std::size_t idx) const { return mask_[idx]; }
  std::span<const std::size_t> interior() const noexcept { return interior_; }
  std::span<const BoundaryClosure> closures() const noexcept { return closures_; }
  /// Position of `idx` in interior(), or npos.
  std::size_t unknown(std::size_t idx) const { return unknown_[idx]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void coords(std::size_t idx, std::span<double> x) const;
  std::vector<double> coords(std::size_t idx) const;
  std::vector<int> multi_index(std::size_t idx) const;

  /// Index of idx + offset (per-axis steps), or npos outside the array.
  std::size_t shifted(std::size_t idx, std::span<const int> offset) const;

  /// True when every 3^n neighbour of an interior point is interior.
  bool deep_interior(std::size_t idx) const;

private:
  Grid() = default;
  void build_mask();
  void build_closures();

  int n_ = 0;
  double h_ = 0.0;
  Domain domain_;
  std::vector<std::int32_t> shape_;
  std::vector<double> origin_;
  std::vector<std::size_t> strides_;
  std::vector<PointKind> mask_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> unknown_;
  std::vector<BoundaryClosure> closures_;
};

/// All offsets in {-1, 0, 1}^n except 0.
std::vector<std::vector<int>> neighbour_offsets(int n);

} // namespace hesslab
