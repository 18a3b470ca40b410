#include "hughes/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace hughes {

VelocityModel::VelocityModel(Kind kind, double v_max, double rho_max,
                             std::function<double(double)> custom)
    : kind_(kind), v_max_(v_max), rho_max_(rho_max) {
  if (!(rho_max > 0.0)) {
    throw std::invalid_argument(fmt::format("rho_max must be > 0, got {}", rho_max));
  }
  if (custom) {
    custom_ = std::make_shared<const std::function<double(double)>>(std::move(custom));
  }
}

VelocityModel VelocityModel::affine(double v_max, double rho_max) {
  if (!(v_max > 0.0)) {
    throw std::invalid_argument(fmt::format("v_max must be > 0, got {}", v_max));
  }
  return VelocityModel(Kind::Affine, v_max, rho_max, {});
}

VelocityModel VelocityModel::custom(double rho_max, std::function<double(double)> v) {
  if (!v) throw std::invalid_argument("custom velocity law is empty");
  const double v0 = v(0.0);
  if (!(v0 > 0.0)) {
    throw std::invalid_argument(fmt::format("custom law needs v(0) > 0, got {}", v0));
  }
  return VelocityModel(Kind::Custom, v0, rho_max, std::move(v));
}

VelocityModel VelocityModel::tabulated(std::vector<double> rho_nodes,
                                       std::vector<double> values) {
  if (rho_nodes.size() < 2 || rho_nodes.size() != values.size()) {
    throw std::invalid_argument("tabulated law needs >= 2 matching nodes and values");
  }
  if (rho_nodes.front() != 0.0) {
    throw std::invalid_argument("tabulated law must start at rho = 0");
  }
  for (std::size_t k = 1; k < rho_nodes.size(); ++k) {
    if (!(rho_nodes[k] > rho_nodes[k - 1])) {
      throw std::invalid_argument("tabulated density nodes must be strictly increasing");
    }
  }
  const double rho_max = rho_nodes.back();
  auto law = [nodes = std::move(rho_nodes), vals = std::move(values)](double rho) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), rho);
    if (it == nodes.begin()) return vals.front();
    if (it == nodes.end()) return vals.back();
    const auto k = static_cast<std::size_t>(it - nodes.begin());
    const double w = (rho - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
    return vals[k - 1] + w * (vals[k] - vals[k - 1]);
  };
  return custom(rho_max, std::move(law));
}

double VelocityModel::raw_v(double rho) const noexcept {
  if (kind_ == Kind::Affine) return v_max_ * (1.0 - rho / rho_max_);
  return (*custom_)(rho);
}

double VelocityModel::eval_v(double rho) const {
  if (!(rho >= 0.0 && rho <= rho_max_)) {
    throw std::domain_error(
        fmt::format("density {} outside [0, {}]", rho, rho_max_));
  }
  return raw_v(rho);
}

double VelocityModel::eval_v_plus(double rho) const noexcept {
  if (rho >= rho_max_) return 0.0;
  const double v = raw_v(std::max(rho, 0.0));
  return v > 0.0 ? v : 0.0;
}

double VelocityModel::critical_density() const {
  if (kind_ == Kind::Affine) return 0.5 * rho_max_;
  constexpr std::size_t kGrid = 1001;
  double best_rho = 0.0;
  double best_f = -1.0;
  for (std::size_t k = 0; k < kGrid; ++k) {
    const double rho = rho_max_ * static_cast<double>(k) / (kGrid - 1);
    const double f = rho * raw_v(rho);
    if (f > best_f) {
      best_f = f;
      best_rho = rho;
    }
  }
  return best_rho;
}

bool AssumptionReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

// `excess` > 0 is a violation; callers shift by the tolerance so that strict
// conditions (x < 0) require x < -tol and weak ones (x <= 0) allow x <= tol.
void note(AssumptionCheck& check, double excess, double rho) {
  if (excess > 0.0) {
    check.passed = false;
    if (excess > check.worst_violation) {
      check.worst_violation = excess;
      check.worst_rho = rho;
    }
  }
}

}  // namespace

AssumptionReport validate_assumptions(const VelocityModel& model,
                                      std::size_t grid_points, double tolerance) {
  if (grid_points < 3) {
    throw std::invalid_argument("validate_assumptions needs at least 3 grid points");
  }
  AssumptionReport report;
  report.grid_points = grid_points;
  report.tolerance = tolerance;

  const double rho_max = model.rho_max();
  const double h = rho_max / static_cast<double>(grid_points - 1);
  std::vector<double> rho(grid_points), v(grid_points), f(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    rho[k] = (k + 1 == grid_points) ? rho_max : h * static_cast<double>(k);
    v[k] = model.eval_v(rho[k]);
    f[k] = rho[k] * v[k];
  }

  AssumptionCheck endpoints{"endpoints"};
  note(endpoints, tolerance - v.front(), 0.0);
  note(endpoints, std::abs(v.back()) - tolerance, rho_max);

  AssumptionCheck decreasing{"v_decreasing"};
  for (std::size_t k = 0; k + 1 < grid_points; ++k) {
    note(decreasing, v[k + 1] - v[k] + tolerance, rho[k]);
  }

  AssumptionCheck concave{"flux_concave"};
  for (std::size_t k = 1; k + 1 < grid_points; ++k) {
    note(concave, f[k - 1] - 2.0 * f[k] + f[k + 1] + tolerance, rho[k]);
  }

  // rho v'(rho) with one-sided differences at the ends.
  std::vector<double> g(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    double dv = 0.0;
    if (k == 0) {
      dv = (v[1] - v[0]) / h;
    } else if (k + 1 == grid_points) {
      dv = (v[k] - v[k - 1]) / h;
    } else {
      dv = (v[k + 1] - v[k - 1]) / (2.0 * h);
    }
    g[k] = rho[k] * dv;
  }
  AssumptionCheck monotone{"rho_dv_monotone"};
  for (std::size_t k = 0; k + 1 < grid_points; ++k) {
    note(monotone, g[k + 1] - g[k] - tolerance, rho[k]);
  }

  report.checks = {endpoints, decreasing, concave, monotone};
  return report;
}

}  // namespace hughes
