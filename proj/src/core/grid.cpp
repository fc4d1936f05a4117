#include "core/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace hesslab {

Domain Domain::make_ball(double radius) {
  require(std::isfinite(radius) && radius > 0.0, ErrorKind::config, "ball radius must be positive");
  Domain d;
  d.type = DomainType::ball;
  d.radius = radius;
  return d;
}

Domain Domain::make_box(std::vector<double> lo, std::vector<double> hi) {
  require(lo.size() == hi.size() && !lo.empty(), ErrorKind::config, "box bounds have mismatched lengths");
  for (std::size_t i = 0; i < lo.size(); ++i)
    require(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] < hi[i], ErrorKind::config,
            "box bounds must satisfy lo < hi");
  Domain d;
  d.type = DomainType::box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

bool Domain::contains(std::span<const double> x) const {
  if (type == DomainType::ball) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return r2 <= radius * radius;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

std::vector<std::vector<int>> neighbour_offsets(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> o(n, -1);
  while (true) {
    bool zero = true;
    for (int v : o) zero = zero && v == 0;
    if (!zero) out.push_back(o);
    int a = 0;
    while (a < n && o[a] == 1) o[a++] = -1;
    if (a == n) break;
    ++o[a];
  }
  return out;
}

namespace {

void check_dim(int n) {
  require(n >= 2 && n <= 4, ErrorKind::config, "grid dimension must be 2, 3 or 4");
}

} // namespace

Grid Grid::ball(int n, double radius, int points) {
  check_dim(n);
  require(points >= 9, ErrorKind::config,
          "ball grid needs at least 9 points per axis for the interior mask, got " + std::to_string(points));
  Grid g;
  g.n_ = n;
  g.domain_ = Domain::make_ball(radius);
  g.h_ = 2.0 * radius / (points - 1);
  g.shape_.assign(n, points);
  g.origin_.assign(n, -radius);
  g.build_mask();
  g.build_closures();
  return g;
}

Grid Grid::box(int n, std::vector<double> lo, std::vector<double> hi, int points) {
  check_dim(n);
  require(static_cast<int>(lo.size()) == n, ErrorKind::config, "box bounds must have n entries");
  require(points >= 3, ErrorKind::config, "box grid needs at least 3 points per axis");
  Grid g;
  g.n_ = n;
  g.domain_ = Domain::make_box(std::move(lo), std::move(hi));
  g.h_ = (g.domain_.hi[0] - g.domain_.lo[0]) / (points - 1);
  g.origin_ = g.domain_.lo;
  for (int a = 0; a < n; ++a) {
    const double cells = (g.domain_.hi[a] - g.domain_.lo[a]) / g.h_;
    const double rounded = std::round(cells);
    require(std::abs(cells - rounded) < 1e-9 * std::max(1.0, cells) && rounded >= 2.0, ErrorKind::config,
            "box extents must be integer multiples of the spacing");
    g.shape_.push_back(static_cast<std::int32_t>(rounded) + 1);
  }
  g.build_mask();
  g.build_closures();
  return g;
}

Grid Grid::from_descriptor(const Domain& domain, std::span<const std::int32_t> shape, double h,
                           std::span<const double> origin) {
  const int n = static_cast<int>(shape.size());
  check_dim(n);
  require(origin.size() == shape.size(), ErrorKind::data, "grid descriptor: origin length mismatch");
  require(std::isfinite(h) && h > 0.0, ErrorKind::data, "grid descriptor: spacing must be positive");
  for (auto s : shape) require(s >= 3 && s <= 4096, ErrorKind::data, "grid descriptor: bad shape");
  Grid g;
  if (domain.type == DomainType::ball) {
    g = ball(n, domain.radius, shape[0]);
  } else {
    g = box(n, domain.lo, domain.hi, shape[0]);
  }
  for (int a = 0; a < n; ++a) {
    require(g.shape_[a] == shape[a], ErrorKind::data, "grid descriptor: shape does not match the domain");
    require(std::abs(g.origin_[a] - origin[a]) <= 1e-12 * (1.0 + std::abs(origin[a])), ErrorKind::data,
            "grid descriptor: origin does not match the domain");
  }
  require(std::abs(g.h_ - h) <= 1e-12 * h, ErrorKind::data, "grid descriptor: spacing does not match the domain");
  return g;
}

void Grid::coords(std::size_t idx, std::span<double> x) const {
  for (int a = n_ - 1; a >= 0; --a) {
    const auto i = idx % shape_[a];
    idx /= shape_[a];
    x[a] = origin_[a] + h_ * static_cast<double>(i);
  }
}

std::vector<double> Grid::coords(std::size_t idx) const {
  std::vector<double> x(n_);
  coords(idx, x);
  return x;
}

std::vector<int> Grid::multi_index(std::size_t idx) const {
  std::vector<int> m(n_);
  for (int a = n_ - 1; a >= 0; --a) {
    m[a] = static_cast<int>(idx % shape_[a]);
    idx /= shape_[a];
  }
  return m;
}

std::size_t Grid::shifted(std::size_t idx, std::span<const int> offset) const {
  std::size_t out = idx;
  std::size_t rem = idx;
  for (int a = n_ - 1; a >= 0; --a) {
    const auto i = static_cast<long long>(rem % shape_[a]);
    rem /= shape_[a];
    const long long j = i + offset[a];
    if (j < 0 || j >= shape_[a]) return npos;
    out = static_cast<std::size_t>(static_cast<long long>(out) + offset[a] * static_cast<long long>(strides_[a]));
  }
  return out;
}

bool Grid::deep_interior(std::size_t idx) const {
  if (mask_[idx] != PointKind::interior) return false;
  for (const auto& o : neighbour_offsets(n_)) {
    const auto j = shifted(idx, o);
    if (j == npos || mask_[j] != PointKind::interior) return false;
  }
  return true;
}

void Grid::build_mask() {
  strides_.assign(n_, 1);
  for (int a = n_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * shape_[a + 1];
  std::size_t total = 1;
  for (auto s : shape_) total *= static_cast<std::size_t>(s);
  mask_.assign(total, PointKind::exterior);

  const double cut = domain_.radius - 0.5 * h_;
  std::vector<double> x(n_);
  for (std::size_t idx = 0; idx < total; ++idx) {
    bool inside;
    if (domain_.type == DomainType::ball) {
      coords(idx, x);
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      inside = r2 < cut * cut;
    } else {
      const auto m = multi_index(idx);
      inside = true;
      for (int a = 0; a < n_; ++a) inside = inside && m[a] > 0 && m[a] < shape_[a] - 1;
    }
    if (inside) mask_[idx] = PointKind::interior;
  }

  const auto offsets = neighbour_offsets(n_);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (mask_[idx] != PointKind::interior) continue;
    for (const auto& o : offsets) {
      const auto j = shifted(idx, o);
      require(j != npos, ErrorKind::discretization, "grid: interior stencil leaves the array");
      if (mask_[j] == PointKind::exterior) mask_[j] = PointKind::boundary;
    }
  }

  unknown_.assign(total, npos);
  interior_.clear();
  for (std::size_t idx = 0; idx < total; ++idx)
    if (mask_[idx] == PointKind::interior) {
      unknown_[idx] = interior_.size();
      interior_.push_back(idx);
    }
  require(!interior_.empty(), ErrorKind::config, "grid: the mask has no interior points");
}

void Grid::build_closures() {
  closures_.clear();
  const auto offsets = neighbour_offsets(n_);
  std::vector<double> xb(n_);
  for (std::size_t idx = 0; idx < mask_.size(); ++idx) {
    if (mask_[idx] != PointKind::boundary) continue;
    coords(idx, xb);
    BoundaryClosure c;
    c.point = idx;
    if (domain_.type == DomainType::box) {
      c.partner = npos;
      c.w = 0.0;
      c.crossing = xb;
      closures_.push_back(std::move(c));
      continue;
    }

    // Linear interpolation along a lattice line between the sphere crossing
    // and an interior point. The line is the lattice direction closest to the
    // inward normal; ties go to the nearer partner, then the nearer crossing.
    const double R = domain_.radius;
    double x2 = 0.0;
    for (int a = 0; a < n_; ++a) x2 += xb[a] * xb[a];
    const double xnorm = std::sqrt(x2);
    double best_cos = -2.0, best_tie = std::numeric_limits<double>::infinity();
    for (const auto& s : offsets) {
      double s2 = 0.0, xs = 0.0;
      for (int a = 0; a < n_; ++a) {
        s2 += s[a] * s[a];
        xs += xb[a] * s[a] * h_;
      }
      const double cosv = xnorm > 0.0 ? -xs / (h_ * std::sqrt(s2) * xnorm) : 1.0;
      if (cosv < best_cos - 1e-12) continue;
      const double qa = s2 * h_ * h_, qb = 2.0 * xs, qc = x2 - R * R;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) continue;
      const double t_lo = (-qb - std::sqrt(disc)) / (2.0 * qa);
      for (int mult = 1; mult <= 2; ++mult) {
        std::vector<int> step(s);
        for (int& v : step) v *= mult;
        const auto q = shifted(idx, step);
        if (q == npos || mask_[q] != PointKind::interior) continue;
        if (!(t_lo < mult)) continue;
        const double w = -t_lo / (mult - t_lo);
        if (std::abs(w) > 1.0) continue;
        const double tie = mult + std::abs(t_lo);
        if (cosv > best_cos + 1e-12 || tie < best_tie) {
          best_cos = std::max(best_cos, cosv);
          best_tie = tie;
          c.partner = q;
          c.w = w;
          c.crossing.resize(n_);
          for (int a = 0; a < n_; ++a) c.crossing[a] = xb[a] + t_lo * s[a] * h_;
        }
      }
    }
    require(std::isfinite(best_tie), ErrorKind::discretization,
            "grid: boundary point without an admissible interpolation partner");
    closures_.push_back(std::move(c));
  }
}

} // namespace hesslab
