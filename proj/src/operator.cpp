#include "cmclab/operator.hpp"

#include <cmath>
#include <sstream>

namespace cmclab {

ProblemData ProblemData::make(int n, std::string_view phi, std::string_view H, std::vector<double> base_point) {
  if (n < 2) throw PreconditionError("dimension n must be >= 2");
  ProblemData d;
  d.n = n;
  d.phi = parse(phi, n - 1);
  if (d.phi.uses_t()) throw PreconditionError("phi must depend on x' only");
  d.H = parse(H, n - 1);
  if (base_point.empty()) base_point.assign(n - 1, 0.0);
  if (static_cast<int>(base_point.size()) != n - 1) throw PreconditionError("base point must have n - 1 entries");
  d.base_point = std::move(base_point);
  return d;
}

double ProblemData::H_at(std::span<const double> x, double t) const {
  double h = eval_real(H, x, t);
  if (!(std::fabs(h) < 1.0)) {
    std::ostringstream os;
    os << "|H| < 1 violated: H = " << h << " at t = " << t;
    throw DomainError(os.str());
  }
  return h;
}

double ProblemData::phi_at(std::span<const double> x) const { return eval_real(phi, x, 0.0); }

SeriesData<double> series_data(const ProblemData& data, int jet_order, int t_order) {
  SeriesData<double> sd;
  sd.n = data.n;
  sd.base_point = data.base_point;
  sd.phi = eval_jet(data.phi, data.base_point, 0.0, jet_order);
  sd.H = eval_t_series(data.H, data.base_point, t_order, jet_order);
  sd.validate();
  return sd;
}

Eigen::MatrixXd curvature_coefficients(const Eigen::VectorXd& p) {
  const double w = 1.0 + p.squaredNorm();
  return Eigen::MatrixXd::Identity(p.size(), p.size()) - p * p.transpose() / w;
}

double tQ_point(int n, const Eigen::VectorXd& p, const Eigen::MatrixXd& hess, double t, double H) {
  const double trace = (curvature_coefficients(p).array() * hess.array()).sum();
  const double root = std::sqrt(1.0 + p.squaredNorm());
  return t * trace - n * (p[n - 1] - H * root);
}

NodeDerivatives node_derivatives(const GridField& u, int idx) {
  const auto& spec = u.spec();
  const int n = spec.n;
  const auto m = u.multi_index(idx);
  const auto shape = spec.shape();
  NodeDerivatives nd{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  std::vector<std::vector<std::pair<int, double>>> first(n);
  for (int a = 0; a < n; ++a) {
    first[a] = first_derivative_stencil(shape[a], m[a], spec.spacing(a));
    for (auto [off, w] : first[a]) nd.grad[a] += w * u[idx + off * u.stride(a)];
    for (auto [off, w] : second_derivative_stencil(shape[a], m[a], spec.spacing(a)))
      nd.hess(a, a) += w * u[idx + off * u.stride(a)];
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double v = 0.0;
      for (auto [oa, wa] : first[a])
        for (auto [ob, wb] : first[b]) v += wa * wb * u[idx + oa * u.stride(a) + ob * u.stride(b)];
      nd.hess(a, b) = nd.hess(b, a) = v;
    }
  }
  return nd;
}

GridField tQ_grid(const GridField& u, const ProblemData& data) {
  if (u.spec().n != data.n) throw StructuralError("grid dimension does not match problem");
  GridField r(u.spec());
  for (int idx = 0; idx < u.size(); ++idx) {
    auto x = u.coordinates(idx);
    double t = x.back();
    auto nd = node_derivatives(u, idx);
    double H = data.H_at(std::span<const double>(x.data(), x.size() - 1), t);
    r[idx] = tQ_point(data.n, nd.grad, nd.hess, t, H);
  }
  return r;
}

GridField normal_ode_residual(const GridField& u, const ProblemData& data, std::span<const double> c1) {
  const auto& spec = u.spec();
  const int n = data.n;
  if (spec.n != n) throw StructuralError("grid dimension does not match problem");
  if (static_cast<int>(c1.size()) != spec.columns()) throw StructuralError("c1 must have one value per column");

  GridField v(spec);
  for (int idx = 0; idx < u.size(); ++idx) {
    auto x = u.column_point(u.column_of(idx));
    v[idx] = u[idx] - data.phi_at(x) - c1[u.column_of(idx)] * spec.t(u.t_index_of(idx));
  }

  GridField r(spec);
  for (int idx = 0; idx < u.size(); ++idx) {
    auto x = u.coordinates(idx);
    double t = x.back();
    double H = data.H_at(std::span<const double>(x.data(), x.size() - 1), t);
    auto du = node_derivatives(u, idx);
    auto dv = node_derivatives(v, idx);
    Eigen::MatrixXd A = curvature_coefficients(du.grad);
    double tangential = 0.0;
    for (int a = 0; a < n - 1; ++a) {
      tangential += 2.0 * A(a, n - 1) * du.hess(a, n - 1);
      for (int b = 0; b < n - 1; ++b) tangential += A(a, b) * du.hess(a, b);
    }
    double root = std::sqrt(1.0 + du.grad.squaredNorm());
    double c = c1[u.column_of(idx)];
    double F = (-tangential + (n / t) * (du.grad[n - 1] - H * root)) / A(n - 1, n - 1) -
               (n / t) * (du.grad[n - 1] - c);
    r[idx] = dv.hess(n - 1, n - 1) - (n / t) * dv.grad[n - 1] - F;
  }
  return r;
}

}  // namespace cmclab
