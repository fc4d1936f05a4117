#include "core/problem.hpp"

#include <cmath>
#include <fstream>

#include "core/error.hpp"

namespace hesslab {

const char* to_string(PsiKind k) noexcept {
  switch (k) {
  case PsiKind::constant: return "constant";
  case PsiKind::radial_power: return "radial_power";
  case PsiKind::exp_u: return "exp_u";
  case PsiKind::gradient_power: return "gradient_power";
  }
  return "unknown";
}

const char* to_string(BoundaryKind k) noexcept {
  switch (k) {
  case BoundaryKind::zero: return "zero";
  case BoundaryKind::quadratic: return "quadratic";
  case BoundaryKind::cubic_perturbation: return "cubic_perturbation";
  }
  return "unknown";
}

Psi::Value Psi::eval(std::span<const double> x, double u, std::span<const double> grad) const {
  Value v;
  switch (kind) {
  case PsiKind::constant:
    v.value = c;
    break;
  case PsiKind::radial_power: {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - (center.empty() ? 0.0 : center[i]);
      r2 += d * d;
    }
    v.value = c * std::pow(1.0 + r2, s);
    break;
  }
  case PsiKind::exp_u:
    v.value = c * std::exp(s * u);
    v.du = s * v.value;
    break;
  case PsiKind::gradient_power: {
    double p2 = 0.0;
    for (double g : grad) p2 += g * g;
    const double base = std::pow(1.0 + p2, s - 1.0);
    v.value = c * base * (1.0 + p2);
    for (std::size_t i = 0; i < grad.size(); ++i) v.dgrad[i] = 2.0 * c * s * base * grad[i];
    break;
  }
  }
  return v;
}

double cubic_phi(std::span<const double> y) {
  double v = y[0] * y[0] * y[0] - 3.0 * y[0] * y[1] * y[1];
  if (y.size() >= 3) v += y[1] * y[2];
  return v;
}

double BoundaryData::operator()(std::span<const double> x) const {
  switch (kind) {
  case BoundaryKind::zero:
    return 0.0;
  case BoundaryKind::quadratic: {
    double v = c;
    for (std::size_t i = 0; i < x.size(); ++i) {
      v += 0.5 * a[i] * x[i] * x[i];
      if (!b.empty()) v += b[i] * x[i];
    }
    return v;
  }
  case BoundaryKind::cubic_perturbation: {
    if (eps == 0.0) return 0.0;
    std::array<double, 4> y{};
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / scale;
    return eps * std::pow(scale, growth) * cubic_phi(std::span<const double>(y.data(), x.size()));
  }
  }
  return 0.0;
}

void ProblemSpec::validate() const {
  require(n == 3 || n == 4, ErrorKind::config, "problem: n must be 3 or 4");
  require(std::isfinite(psi.c) && psi.c > 0.0, ErrorKind::config, "psi: the coefficient c must be positive");
  require(std::isfinite(psi.s), ErrorKind::config, "psi: the exponent s must be finite");
  if (psi.kind == PsiKind::radial_power && !psi.center.empty())
    require(static_cast<int>(psi.center.size()) == n, ErrorKind::config, "psi: center must have n entries");
  if (boundary.kind == BoundaryKind::quadratic) {
    require(static_cast<int>(boundary.a.size()) == n, ErrorKind::config, "boundary: a must have n entries");
    require(boundary.b.empty() || static_cast<int>(boundary.b.size()) == n, ErrorKind::config,
            "boundary: b must have n entries");
  }
  if (boundary.kind == BoundaryKind::cubic_perturbation)
    require(std::isfinite(boundary.eps) && boundary.scale > 0.0 && std::isfinite(boundary.growth),
            ErrorKind::config, "boundary: cubic_perturbation needs finite eps, growth and scale > 0");
  if (domain.type == DomainType::box)
    require(static_cast<int>(domain.lo.size()) == n, ErrorKind::config, "domain: box bounds must have n entries");
  require(solver.tol > 0.0 && solver.max_iter >= 0 && solver.damping > 0.0 && solver.damping < 1.0 &&
              solver.max_halvings >= 0 && solver.linear_tol > 0.0 && solver.linear_max_iter > 0 &&
              solver.threads >= 1,
          ErrorKind::config, "solver: invalid settings");
  if (domain.type == DomainType::ball)
    require(grid_points >= 9, ErrorKind::config,
            "grid too coarse for the ball mask: need at least 9 points per axis, got " + std::to_string(grid_points));
  const std::size_t total = static_cast<std::size_t>(std::pow(static_cast<double>(grid_points), n));
  require(total <= 20'000'000, ErrorKind::config, "grid too large");
}

std::shared_ptr<const Grid> ProblemSpec::make_grid() const {
  validate();
  if (domain.type == DomainType::ball) return std::make_shared<const Grid>(Grid::ball(n, domain.radius, grid_points));
  return std::make_shared<const Grid>(Grid::box(n, domain.lo, domain.hi, grid_points));
}

namespace {

std::vector<double> number_or_array(const nlohmann::json& v, int n) {
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  return v.get<std::vector<double>>();
}

} // namespace

ProblemSpec ProblemSpec::from_json(const nlohmann::json& j) {
  ProblemSpec p;
  try {
    p.n = j.at("n").get<int>();
    const auto& d = j.at("domain");
    const auto type = d.at("type").get<std::string>();
    if (type == "ball") {
      p.domain = Domain::make_ball(d.at("radius").get<double>());
    } else if (type == "box") {
      std::vector<double> lo, hi;
      for (const auto& b : d.at("bounds")) {
        const auto pair = b.get<std::vector<double>>();
        require(pair.size() == 2, ErrorKind::config, "domain: each box bound is [lo, hi]");
        lo.push_back(pair[0]);
        hi.push_back(pair[1]);
      }
      p.domain = Domain::make_box(lo, hi);
    } else {
      fail(ErrorKind::config, "domain: unknown type '" + type + "'");
    }
    p.grid_points = j.at("grid_points").get<int>();

    if (j.contains("psi")) {
      const auto& ps = j.at("psi");
      const auto kind = ps.at("kind").get<std::string>();
      const auto params = ps.value("params", nlohmann::json::object());
      if (kind == "constant") p.psi.kind = PsiKind::constant;
      else if (kind == "radial_power") p.psi.kind = PsiKind::radial_power;
      else if (kind == "exp_u") p.psi.kind = PsiKind::exp_u;
      else if (kind == "gradient_power") p.psi.kind = PsiKind::gradient_power;
      else fail(ErrorKind::config, "psi: unknown kind '" + kind + "'");
      p.psi.c = params.value("c", 1.0);
      p.psi.s = params.value("s", 0.0);
      if (params.contains("center")) p.psi.center = params.at("center").get<std::vector<double>>();
    }

    if (j.contains("boundary")) {
      const auto& bd = j.at("boundary");
      const auto kind = bd.at("kind").get<std::string>();
      const auto params = bd.value("params", nlohmann::json::object());
      if (kind == "zero") {
        p.boundary.kind = BoundaryKind::zero;
      } else if (kind == "quadratic") {
        p.boundary.kind = BoundaryKind::quadratic;
        p.boundary.a = number_or_array(params.value("a", nlohmann::json(0.0)), p.n);
        if (params.contains("b")) p.boundary.b = number_or_array(params.at("b"), p.n);
        p.boundary.c = params.value("c", 0.0);
      } else if (kind == "cubic_perturbation") {
        p.boundary.kind = BoundaryKind::cubic_perturbation;
        p.boundary.eps = params.value("eps", 0.0);
        p.boundary.scale = params.value("scale", p.domain.type == DomainType::ball ? p.domain.radius : 1.0);
        p.boundary.growth = params.value("growth", 1.0);
      } else {
        fail(ErrorKind::config, "boundary: unknown kind '" + kind + "'");
      }
    }

    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      p.solver.tol = s.value("tol", p.solver.tol);
      p.solver.max_iter = s.value("max_iter", p.solver.max_iter);
      p.solver.damping = s.value("damping", p.solver.damping);
      p.solver.max_halvings = s.value("max_halvings", p.solver.max_halvings);
      p.solver.linear_tol = s.value("linear_tol", p.solver.linear_tol);
      p.solver.linear_max_iter = s.value("linear_max_iter", p.solver.linear_max_iter);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("problem config: ") + e.what());
  }
  p.validate();
  return p;
}

ProblemSpec ProblemSpec::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::config, "cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, path + ": " + e.what());
  }
  // A run manifest embeds the config it was produced from.
  if (j.contains("config") && j.contains("config_digest")) j = j.at("config");
  return from_json(j);
}

nlohmann::json ProblemSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  if (domain.type == DomainType::ball) {
    j["domain"] = {{"type", "ball"}, {"radius", domain.radius}};
  } else {
    nlohmann::json bounds = nlohmann::json::array();
    for (std::size_t i = 0; i < domain.lo.size(); ++i) bounds.push_back({domain.lo[i], domain.hi[i]});
    j["domain"] = {{"type", "box"}, {"bounds", bounds}};
  }
  j["grid_points"] = grid_points;
  nlohmann::json pp = {{"c", psi.c}, {"s", psi.s}};
  if (!psi.center.empty()) pp["center"] = psi.center;
  j["psi"] = {{"kind", to_string(psi.kind)}, {"params", pp}};
  nlohmann::json bp = nlohmann::json::object();
  if (boundary.kind == BoundaryKind::quadratic) {
    bp["a"] = boundary.a;
    if (!boundary.b.empty()) bp["b"] = boundary.b;
    bp["c"] = boundary.c;
  } else if (boundary.kind == BoundaryKind::cubic_perturbation) {
    bp = {{"eps", boundary.eps}, {"scale", boundary.scale}, {"growth", boundary.growth}};
  }
  j["boundary"] = {{"kind", to_string(boundary.kind)}, {"params", bp}};
  j["solver"] = {{"tol", solver.tol},
                 {"max_iter", solver.max_iter},
                 {"damping", solver.damping},
                 {"max_halvings", solver.max_halvings},
                 {"linear_tol", solver.linear_tol},
                 {"linear_max_iter", solver.linear_max_iter}};
  return j;
}

ProblemSpec radial_problem(int n, double radius, int points) {
  ProblemSpec p;
  p.n = n;
  p.domain = Domain::make_ball(radius);
  p.grid_points = points;
  return p;
}

} // namespace hesslab
