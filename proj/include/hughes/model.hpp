#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hughes {

/// Left and right exits of the corridor (-1, 1).
inline constexpr double kCorridorLeft = -1.0;
inline constexpr double kCorridorRight = 1.0;

/// Speed-density relation v(rho) on [0, rho_max].
///
/// The affine law v(rho) = v_max (1 - rho / rho_max) is the one the SIMD
/// kernels are specialised for; custom laws go through a scalar callable.
class VelocityModel {
 public:
  enum class Kind { Affine, Custom };

  static VelocityModel affine(double v_max, double rho_max);

  /// Closed-form custom law. v(0) is taken as v_max.
  static VelocityModel custom(double rho_max, std::function<double(double)> v);

  /// Tabulated law, linearly interpolated between (rho_nodes[k], values[k]).
  /// Nodes must start at 0, end at rho_max and be strictly increasing.
  static VelocityModel tabulated(std::vector<double> rho_nodes,
                                 std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  bool is_affine() const noexcept { return kind_ == Kind::Affine; }
  double v_max() const noexcept { return v_max_; }
  double rho_max() const noexcept { return rho_max_; }

  /// v(rho); throws std::domain_error outside [0, rho_max].
  double eval_v(double rho) const;

  /// [v(rho)]_+ for any rho >= 0. Above rho_max the value is 0.
  double eval_v_plus(double rho) const noexcept;

  /// f(rho) = rho v(rho).
  double flux(double rho) const { return rho * eval_v(rho); }

  /// Unique maximiser of f on [0, rho_max]: rho_max / 2 for the affine law,
  /// argmax on a 1001-point grid otherwise.
  double critical_density() const;

 private:
  VelocityModel(Kind kind, double v_max, double rho_max,
                std::function<double(double)> custom);

  double raw_v(double rho) const noexcept;

  Kind kind_;
  double v_max_;
  double rho_max_;
  std::shared_ptr<const std::function<double(double)>> custom_;
};

/// Linear running cost c(rho) = 1 + alpha rho.
struct CostModel {
  double alpha = 0.0;

  double operator()(double rho) const noexcept { return 1.0 + alpha * rho; }
};

struct ModelConfig {
  VelocityModel velocity = VelocityModel::affine(1.0, 1.0);
  CostModel cost{};
  // The corridor is always (kCorridorLeft, kCorridorRight).
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  /// Largest violation of the sign condition (0 when passed).
  double worst_violation = 0.0;
  /// Grid density where the worst violation occurs.
  double worst_rho = 0.0;
};

struct AssumptionReport {
  std::size_t grid_points = 0;
  double tolerance = 0.0;
  std::vector<AssumptionCheck> checks;

  bool all_passed() const noexcept;
  const AssumptionCheck* find(const std::string& name) const noexcept;
};

inline constexpr std::size_t kDefaultAssumptionGrid = 1001;
inline constexpr double kDefaultAssumptionTolerance = 1e-9;

/// Finite-difference checks of the structural assumptions on a uniform grid
/// of [0, rho_max]:
///   "endpoints"         v(0) = v_max > 0 and v(rho_max) = 0
///   "v_decreasing"      v[k+1] - v[k] < 0
///   "flux_concave"      f[k-1] - 2 f[k] + f[k+1] < 0
///   "rho_dv_monotone"   rho v'(rho) non-increasing (central differences)
/// Sign conditions are tested against `tolerance`.
AssumptionReport validate_assumptions(
    const VelocityModel& model,
    std::size_t grid_points = kDefaultAssumptionGrid,
    double tolerance = kDefaultAssumptionTolerance);

}  // namespace hughes
