#include "core/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/error.hpp"
#include "core/format.hpp"

namespace hesslab {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

ScalarField::ScalarField(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

ScalarField::ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_->size(), ErrorKind::argument, "ScalarField: value count does not match the grid");
}

ScalarField ScalarField::sample(std::shared_ptr<const Grid> grid,
                                const std::function<double(std::span<const double>)>& f) {
  ScalarField u(std::move(grid));
  const auto& g = u.grid();
  std::vector<double> x(g.dim());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.kind(idx) == PointKind::exterior) continue;
    g.coords(idx, x);
    u[idx] = f(x);
  }
  return u;
}

namespace {

double at(const ScalarField& u, std::size_t idx, std::ptrdiff_t step) {
  const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + step);
  if (u.grid().kind(j) == PointKind::exterior)
    fail(ErrorKind::discretization, "stencil reaches an exterior grid point");
  return u[j];
}

} // namespace

SymMatrix hessian_at(const ScalarField& u, std::size_t idx) {
  const auto& g = u.grid();
  require(idx < g.size() && g.kind(idx) == PointKind::interior, ErrorKind::discretization,
          "hessian_at: point is not interior");
  const int n = g.dim();
  const double h2 = g.h() * g.h();
  const double c = u[idx];
  SymMatrix H(n);
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::ptrdiff_t>(g.stride(i));
    H.set(i, i, (at(u, idx, si) - 2.0 * c + at(u, idx, -si)) / h2);
    for (int j = i + 1; j < n; ++j) {
      const auto sj = static_cast<std::ptrdiff_t>(g.stride(j));
      H.set(i, j, (at(u, idx, si + sj) + at(u, idx, -si - sj) - at(u, idx, si - sj) - at(u, idx, -si + sj)) /
                      (4.0 * h2));
    }
  }
  return H;
}

std::vector<double> gradient_at(const ScalarField& u, std::size_t idx) {
  const auto& g = u.grid();
  require(idx < g.size() && g.kind(idx) == PointKind::interior, ErrorKind::discretization,
          "gradient_at: point is not interior");
  std::vector<double> grad(g.dim());
  for (int i = 0; i < g.dim(); ++i) {
    const auto si = static_cast<std::ptrdiff_t>(g.stride(i));
    grad[i] = (at(u, idx, si) - at(u, idx, -si)) / (2.0 * g.h());
  }
  return grad;
}

namespace {

constexpr char kMagic[5] = {'H', 'E', 'S', 'S', '1'};
constexpr std::uint8_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::data, path + ": truncated header while reading " + what);
  return v;
}

} // namespace

void write_snapshot(const std::string& path, const ScalarField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  const auto& g = u.grid();
  os.write(kMagic, sizeof kMagic);
  put(os, kVersion);
  put(os, std::uint16_t{0});
  put(os, static_cast<std::int32_t>(g.dim()));
  put(os, static_cast<std::int32_t>(g.domain().type));
  for (auto s : g.shape()) put(os, s);
  put(os, g.h());
  for (double o : g.origin()) put(os, o);
  if (g.domain().type == DomainType::ball) {
    put(os, g.domain().radius);
  } else {
    for (double v : g.domain().lo) put(os, v);
    for (double v : g.domain().hi) put(os, v);
  }
  put(os, static_cast<std::uint64_t>(u.values().size()));
  os.write(reinterpret_cast<const char*>(u.values().data()),
           static_cast<std::streamsize>(u.values().size() * sizeof(double)));
  if (!os) fail(ErrorKind::io, "write failed for " + path);
}

ScalarField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot open " + path);
  char magic[5];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    fail(ErrorKind::data, path + ": bad magic (expected HESS1)");
  const auto version = get<std::uint8_t>(is, path, "version");
  if (version != kVersion) fail(ErrorKind::data, path + ": unsupported version " + std::to_string(version));
  get<std::uint16_t>(is, path, "reserved");
  const auto n = get<std::int32_t>(is, path, "dimension");
  if (n < 2 || n > 4) fail(ErrorKind::data, path + ": dimension " + std::to_string(n) + " out of range");
  const auto type = get<std::int32_t>(is, path, "domain type");
  if (type != 0 && type != 1) fail(ErrorKind::data, path + ": unknown domain type " + std::to_string(type));
  std::vector<std::int32_t> shape(n);
  for (auto& s : shape) s = get<std::int32_t>(is, path, "shape");
  const auto h = get<double>(is, path, "spacing");
  std::vector<double> origin(n);
  for (auto& o : origin) o = get<double>(is, path, "origin");
  Domain domain;
  if (type == 1) {
    domain = Domain::make_ball(get<double>(is, path, "radius"));
  } else {
    std::vector<double> lo(n), hi(n);
    for (auto& v : lo) v = get<double>(is, path, "box lo");
    for (auto& v : hi) v = get<double>(is, path, "box hi");
    domain = Domain::make_box(lo, hi);
  }
  const auto count = get<std::uint64_t>(is, path, "count");
  std::uint64_t expected = 1;
  for (auto s : shape) expected *= static_cast<std::uint64_t>(s > 0 ? s : 0);
  if (count != expected)
    fail(ErrorKind::data, path + ": payload count " + std::to_string(count) + " does not match shape product " +
                              std::to_string(expected));
  auto grid = std::make_shared<const Grid>(Grid::from_descriptor(domain, shape, h, origin));
  std::vector<double> values(count);
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) fail(ErrorKind::data, path + ": payload truncated");
  if (is.peek() != std::char_traits<char>::eof()) fail(ErrorKind::data, path + ": trailing bytes after payload");
  return ScalarField(std::move(grid), std::move(values));
}

void write_field_csv(std::ostream& os, const ScalarField& u) {
  const auto& g = u.grid();
  const int n = g.dim();
  for (int i = 1; i <= n; ++i) os << 'x' << i << ',';
  os << 'u';
  for (int i = 1; i <= n; ++i) os << ",lambda_" << i;
  os << ",sigma_" << n - 1 << '\n';
  std::vector<double> x(n);
  for (std::size_t idx : g.interior()) {
    g.coords(idx, x);
    const auto eig = eigen_decompose(hessian_at(u, idx));
    write_joined(os, x);
    os << ',' << fmt(u[idx]) << ',';
    write_joined(os, eig.lambda.values());
    os << ',' << fmt(sigma(eig.lambda, n - 1)) << '\n';
  }
}

} // namespace hesslab
