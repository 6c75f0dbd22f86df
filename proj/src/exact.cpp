#include "cmclab/exact.hpp"

#include <cmath>
#include <cstdio>

#include "cmclab/operator.hpp"

namespace cmclab {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  return v < 0 ? "(" + s + ")" : s;
}

}  // namespace

ExactSolution ExactSolution::plane(double a, std::vector<double> p, double c) {
  if (p.empty()) throw PreconditionError("plane slope needs n - 1 >= 1 entries");
  ExactSolution s;
  s.kind_ = Kind::Plane;
  s.a_ = a;
  s.p_ = std::move(p);
  s.c_ = c;
  s.H_ = calibrate(s);
  return s;
}

ExactSolution ExactSolution::sphere(std::vector<double> center, double y_offset, double height, double radius,
                                    int branch) {
  if (center.empty()) throw PreconditionError("sphere center needs n - 1 >= 1 entries");
  if (!(height >= 0.0)) throw PreconditionError("sphere height must be >= 0");
  if (!(radius > height)) throw PreconditionError("sphere radius must exceed its height");
  if (branch != 1 && branch != -1) throw PreconditionError("sphere branch must be +1 or -1");
  ExactSolution s;
  s.kind_ = Kind::Sphere;
  s.p_ = std::move(center);
  s.a_ = y_offset;
  s.height_ = height;
  s.R_ = radius;
  s.branch_ = branch;
  s.H_ = calibrate(s);
  return s;
}

double ExactSolution::rho2(std::span<const double> x, double t) const {
  double r2 = R_ * R_ - (t - height_) * (t - height_);
  for (int i = 0; i < dim(); ++i) r2 -= (x[i] - p_[i]) * (x[i] - p_[i]);
  return r2;
}

bool ExactSolution::in_domain(std::span<const double> x, double t) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  return kind_ == Kind::Plane || rho2(x, t) > 0.0;
}

double ExactSolution::value(std::span<const double> x, double t) const {
  if (static_cast<int>(x.size()) != dim()) throw StructuralError("point has wrong dimension");
  if (kind_ == Kind::Plane) {
    double v = a_ + c_ * t;
    for (int i = 0; i < dim(); ++i) v += p_[i] * x[i];
    return v;
  }
  double r2 = rho2(x, t);
  if (!(r2 > 0.0)) throw DomainError("point outside the sphere graph domain");
  return a_ + branch_ * std::sqrt(r2);
}

Eigen::VectorXd ExactSolution::gradient(std::span<const double> x, double t) const {
  Eigen::VectorXd g(n());
  if (kind_ == Kind::Plane) {
    for (int i = 0; i < dim(); ++i) g[i] = p_[i];
    g[dim()] = c_;
    return g;
  }
  double r2 = rho2(x, t);
  if (!(r2 > 0.0)) throw DomainError("point outside the sphere graph domain");
  double r = std::sqrt(r2);
  for (int i = 0; i < dim(); ++i) g[i] = -branch_ * (x[i] - p_[i]) / r;
  g[dim()] = -branch_ * (t - height_) / r;
  return g;
}

Eigen::MatrixXd ExactSolution::hessian(std::span<const double> x, double t) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n(), n());
  if (kind_ == Kind::Plane) return h;
  double r2 = rho2(x, t);
  if (!(r2 > 0.0)) throw DomainError("point outside the sphere graph domain");
  double r = std::sqrt(r2);
  Eigen::VectorXd z(n());
  for (int i = 0; i < dim(); ++i) z[i] = x[i] - p_[i];
  z[dim()] = t - height_;
  h = -branch_ * (Eigen::MatrixXd::Identity(n(), n()) / r + z * z.transpose() / (r * r2));
  return h;
}

std::string ExactSolution::phi_expr() const {
  if (kind_ == Kind::Plane) {
    std::string s = num(a_);
    for (int i = 0; i < dim(); ++i) s += " + " + num(p_[i]) + "*x" + std::to_string(i + 1);
    return s;
  }
  std::string inner = num(R_ * R_ - height_ * height_);
  for (int i = 0; i < dim(); ++i) inner += " - (x" + std::to_string(i + 1) + " - " + num(p_[i]) + ")^2";
  return num(a_) + (branch_ > 0 ? " + " : " - ") + "sqrt(" + inner + ")";
}

std::string ExactSolution::H_expr() const { return num(H_); }

LogSeries<double> ExactSolution::taylor_at_boundary(std::span<const double> x0, int t_order, int jet_order,
                                                    int log_cap) const {
  if (static_cast<int>(x0.size()) != dim()) throw StructuralError("base point has wrong dimension");
  const int d = dim();
  using J = Jet<double>;
  using L = LogSeries<double>;
  if (kind_ == Kind::Plane) {
    J c0 = J::constant(d, jet_order, a_);
    for (int i = 0; i < d; ++i) c0 += p_[i] * J::variable(d, jet_order, i, x0[i]);
    L s = L::constant(c0, t_order, log_cap);
    if (t_order >= 1) s.set(1, 0, J::constant(d, jet_order, c_));
    return s;
  }
  double edge2 = R_ * R_ - height_ * height_;
  double dist2 = 0.0;
  for (int i = 0; i < d; ++i) dist2 += (x0[i] - p_[i]) * (x0[i] - p_[i]);
  if (!(std::sqrt(dist2) <= 0.9 * std::sqrt(edge2)))
    throw DomainError("base point within 10% of the sphere trace edge");
  // rho(x') + 2 a t - t^2 with rho = R^2 - a^2 - |x' - q'|^2.
  J rho = J::constant(d, jet_order, edge2);
  for (int i = 0; i < d; ++i) {
    J z = J::variable(d, jet_order, i, x0[i] - p_[i]);
    rho -= z * z;
  }
  L arg = L::constant(rho, t_order, log_cap);
  if (t_order >= 1) arg.set(1, 0, J::constant(d, jet_order, 2.0 * height_));
  if (t_order >= 2) arg.set(2, 0, J::constant(d, jet_order, -1.0));
  L root = sqrt(arg);
  L out = static_cast<double>(branch_) * root;
  out.set(0, 0, out.coeff(0, 0) + a_);
  return out;
}

GridField ExactSolution::sample(const GridSpec& spec) const {
  if (spec.n != n()) throw StructuralError("grid dimension does not match the exact solution");
  GridField u(spec);
  for (int idx = 0; idx < u.size(); ++idx) {
    auto x = u.coordinates(idx);
    double t = x.back();
    x.pop_back();
    u[idx] = value(x, t);
  }
  return u;
}

double calibrate(const ExactSolution& sol) {
  const int n = sol.n();
  if (sol.kind() == ExactSolution::Kind::Plane) {
    double p2 = 0.0;
    for (double v : sol.slope()) p2 += v * v;
    return sol.c() / std::sqrt(1.0 + p2 + sol.c() * sol.c());
  }
  const double a = sol.height(), R = sol.radius();
  if (a == 0.0) return 0.0;
  // Probe points on a small lattice well inside the graph domain.
  std::vector<std::pair<std::vector<double>, double>> probes;
  for (double f : {-0.3, 0.0, 0.25})
    for (double tf : {0.1, 0.35, 0.6}) {
      std::vector<double> x = sol.center();
      x[0] += f * R;
      double t = tf * (a + R);
      if (sol.in_domain(x, t) && std::sqrt(std::max(0.0, R * R - f * f * R * R - (t - a) * (t - a))) > 0.2 * R)
        probes.push_back({x, t});
    }
  for (double H : {a / R, -a / R}) {
    double worst = 0.0;
    for (const auto& [x, t] : probes)
      worst = std::max(worst, std::fabs(tQ_point(n, sol.gradient(x, t), sol.hessian(x, t), t, H)));
    if (worst <= 1e-10) return H;
  }
  throw InconsistencyError("no candidate H annihilates the sphere residual");
}

}  // namespace cmclab
