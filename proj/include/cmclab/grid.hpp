#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cmclab/errors.hpp"

namespace cmclab {

/// Tensor grid over the half-box [c - X, c + X]^(n-1) x [delta, T]. All
/// tangential axes share extent and node count. delta > 0 always.
struct GridSpec {
  int n = 2;
  std::vector<double> x_center;  // length n - 1
  double x_extent = 0.5;
  int nodes_x = 33;
  double delta = 0.05;
  double t_max = 0.5;
  int nodes_t = 33;

  int dim() const { return n - 1; }
  double h_prime() const { return 2.0 * x_extent / (nodes_x - 1); }
  double h_t() const { return (t_max - delta) / (nodes_t - 1); }
  int columns() const;
  int size() const { return columns() * nodes_t; }
  double x(int axis, int i) const { return x_center[axis] - x_extent + i * h_prime(); }
  double t(int it) const { return delta + it * h_t(); }
  /// Node counts along each axis, tangential first, t last.
  std::vector<int> shape() const;
  double spacing(int axis) const { return axis == dim() ? h_t() : h_prime(); }

  /// Throws on delta <= 0, fewer than 3 nodes per axis, or bad extents.
  void validate() const;
};

/// Discrete u on a GridSpec. Linear index: t slowest, x1 fastest.
class GridField {
 public:
  GridField() = default;
  explicit GridField(GridSpec spec);
  GridField(GridSpec spec, Eigen::VectorXd values);

  const GridSpec& spec() const { return spec_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](int idx) const { return values_[idx]; }
  double& operator[](int idx) { return values_[idx]; }

  int size() const { return static_cast<int>(values_.size()); }
  int index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(int idx) const;
  int column_of(int idx) const { return idx % spec_.columns(); }
  int t_index_of(int idx) const { return idx / spec_.columns(); }
  int node(int column, int it) const { return it * spec_.columns() + column; }
  /// Tangential coordinates of a column.
  std::vector<double> column_point(int column) const;
  /// Tangential coordinates of a node followed by t.
  std::vector<double> coordinates(int idx) const;
  bool on_boundary(int idx) const;
  /// Linear offset of one step along `axis`.
  int stride(int axis) const;

 private:
  GridSpec spec_;
  Eigen::VectorXd values_;
};

/// `# n=..., h_prime=..., h_t=..., delta=...` then rows x1,...,t,u with 17 significant digits.
void write_csv(std::ostream& os, const GridField& u);
void write_csv(const std::string& path, const GridField& u);
GridField read_csv(std::istream& is);
GridField read_csv(const std::string& path);

/// Finite-difference weights (offset, weight) along one axis of N nodes with
/// spacing h at position k: centered inside, second-order one-sided at the ends.
std::vector<std::pair<int, double>> first_derivative_stencil(int N, int k, double h);
std::vector<std::pair<int, double>> second_derivative_stencil(int N, int k, double h);

}  // namespace cmclab
