#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cmclab/grid.hpp"
#include "cmclab/log_series.hpp"

namespace cmclab {

/// Closed-form CMC graphs: tilted planes u = a + p.x' + c t and sphere caps
/// u = q_y + s sqrt(R^2 - |x' - q'|^2 - (t - a)^2).
class ExactSolution {
 public:
  enum class Kind { Plane, Sphere };

  static ExactSolution plane(double a, std::vector<double> p, double c);
  /// branch is +1 or -1; H is calibrated against the operator on construction.
  static ExactSolution sphere(std::vector<double> center, double y_offset, double height, double radius, int branch);

  Kind kind() const { return kind_; }
  int n() const { return static_cast<int>(p_.size()) + 1; }
  int dim() const { return n() - 1; }
  double H() const { return H_; }

  // Plane parameters (a, p, c) or sphere (q_y, q', height a, R, branch).
  double offset() const { return a_; }
  const std::vector<double>& slope() const { return p_; }
  double c() const { return c_; }
  const std::vector<double>& center() const { return p_; }
  double height() const { return height_; }
  double radius() const { return R_; }
  int branch() const { return branch_; }

  bool in_domain(std::span<const double> x, double t) const;
  double value(std::span<const double> x, double t) const;
  /// (D_x' u, u_t).
  Eigen::VectorXd gradient(std::span<const double> x, double t) const;
  Eigen::MatrixXd hessian(std::span<const double> x, double t) const;
  double trace(std::span<const double> x) const { return value(x, 0.0); }

  /// Expression strings for the boundary trace and for the constant H.
  std::string phi_expr() const;
  std::string H_expr() const;

  /// Exact t-Taylor expansion at x0' (no log terms), coefficients as jets of
  /// order jet_order. Spheres reject base points within 10% of the trace edge.
  LogSeries<double> taylor_at_boundary(std::span<const double> x0, int t_order, int jet_order, int log_cap = 0) const;

  GridField sample(const GridSpec& spec) const;

 private:
  double rho2(std::span<const double> x, double t) const;

  Kind kind_ = Kind::Plane;
  double a_ = 0.0;
  std::vector<double> p_;
  double c_ = 0.0;
  double height_ = 0.0;
  double R_ = 1.0;
  int branch_ = 1;
  double H_ = 0.0;
};

/// Signed H in {+a/R, -a/R} whose pointwise residual of t Q vanishes (<= 1e-10)
/// on a probe set; planes return c / sqrt(1 + |p|^2 + c^2). Throws
/// InconsistencyError when no candidate works.
double calibrate(const ExactSolution& sol);

}  // namespace cmclab
